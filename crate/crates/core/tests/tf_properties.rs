//! Property tests for the polynomial / transfer-function layer.

use indiloop_core::{pade2, poly_roots, routh_stable, Polynomial64, Rational64, TfExpr64};
use num_complex::Complex64;
use proptest::prelude::*;

fn poly(coeffs: Vec<f64>) -> Polynomial64 {
    Polynomial64::new(coeffs)
}

/// Random delay-free expression trees: atoms with strictly stable
/// denominators, sums, products, scales and contractive feedback loops.
fn tf_expr_strategy() -> impl Strategy<Value = TfExpr64> {
    let atom = (
        prop::collection::vec(-4.0f64..4.0, 1..=3),
        prop::collection::vec(0.2f64..8.0, 1..=2),
    )
        .prop_map(|(num, poles)| {
            let mut den = Polynomial64::one();
            for p in poles {
                den = den.mul(&Polynomial64::linear(p, 1.0));
            }
            TfExpr64::atom(Rational64::new(poly(num), den).unwrap())
        });
    let leaf = prop_oneof![
        atom,
        (-3.0f64..3.0).prop_map(TfExpr64::scale),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..=3).prop_map(TfExpr64::sum),
            prop::collection::vec(inner.clone(), 2..=3).prop_map(TfExpr64::product),
            (inner.clone(), -0.4f64..0.4).prop_map(|(g, k)| {
                // Keep the loop contractive so the closure stays well posed.
                TfExpr64::feedback(g, TfExpr64::scale(k))
            }),
        ]
    })
}

/// Random real polynomials built from explicit roots, so the stability
/// ground truth is known by construction.
fn rooted_poly_strategy() -> impl Strategy<Value = (Polynomial64, f64)> {
    (
        prop::collection::vec(-3.0f64..3.0, 0..=3),
        prop::collection::vec((-3.0f64..3.0, 0.05f64..3.0), 0..=2),
        0.5f64..3.0,
    )
        .prop_filter("need degree >= 1", |(re, pairs, _)| {
            re.len() + 2 * pairs.len() >= 1
        })
        .prop_map(|(real_roots, pairs, lead)| {
            let mut p = Polynomial64::constant(lead);
            let mut max_re = f64::NEG_INFINITY;
            for &r in &real_roots {
                p = p.mul(&Polynomial64::linear(-r, 1.0));
                max_re = max_re.max(r);
            }
            for &(re, im) in &pairs {
                // (s - (re + j im))(s - (re - j im)) = s^2 - 2 re s + re^2 + im^2
                p = p.mul(&poly(vec![re * re + im * im, -2.0 * re, 1.0]));
                max_re = max_re.max(re);
            }
            (p, max_re)
        })
}

proptest! {
    /// Pade-2 is all-pass on the imaginary axis for every delay.
    #[test]
    fn pade2_all_pass(tau in 0.0f64..2.0, omega in 1e-3f64..1e4) {
        let p = pade2(tau).unwrap();
        let mag = p.eval_jw(omega).unwrap().norm();
        prop_assert!((mag - 1.0).abs() < 1e-12);
    }

    /// For delay-free expressions, exact tree evaluation and the collapsed
    /// rational agree (away from ill-conditioned closed-loop poles).
    #[test]
    fn rationalize_matches_exact_eval(expr in tf_expr_strategy(), seed in 0usize..1000) {
        let rat = expr.rationalize().unwrap();
        for k in 0..50 {
            let w = 1e-2 * 10f64.powf(((seed * 37 + k * 113) % 5000) as f64 / 1000.0);
            let exact = expr.eval_exact(w);
            let collapsed = rat.eval_jw(w);
            match (exact, collapsed) {
                (Ok(a), Ok(b)) => {
                    // Guard against evaluation right at a collapsed pole,
                    // where both routes are unbounded.
                    let den_mag = rat.den().eval(Complex64::new(0.0, w)).norm();
                    let den_scale = rat.den().max_coeff_magnitude();
                    if den_mag > 1e-6 * den_scale {
                        prop_assert!(
                            (a - b).norm() <= 1e-10 * (1.0 + a.norm()),
                            "w = {w}: {a} vs {b}"
                        );
                    }
                }
                _ => {}
            }
        }
    }

    /// Routh verdicts agree with the sign of the largest root real part for
    /// rooted random polynomials, outside the boundary band.
    #[test]
    fn routh_agrees_with_roots((p, max_re) in rooted_poly_strategy()) {
        prop_assume!(max_re.abs() > 1e-6);
        let report = routh_stable(&p).unwrap();
        prop_assume!(!report.epsilon_used);
        prop_assert_eq!(report.stable, max_re < 0.0, "poly {:?}", p.coeffs());
    }

}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// The residual acceptance bound of the root finder holds for random
    /// dense polynomials up to degree 8.
    #[test]
    fn root_residual_bound_holds(
        mut coeffs in prop::collection::vec(-5.0f64..5.0, 2..=9),
        lead_sign in prop::bool::ANY,
    ) {
        // Make the leading coefficient well separated from zero.
        let last = coeffs.len() - 1;
        coeffs[last] = if lead_sign { 1.0 } else { -1.0 } * (coeffs[last].abs() + 0.5);
        let p = poly(coeffs);
        // poly_roots validates the bound internally and errors otherwise.
        let roots = poly_roots(&p).unwrap();
        prop_assert_eq!(roots.len(), p.degree());
    }
}

