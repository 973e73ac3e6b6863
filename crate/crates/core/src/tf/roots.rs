use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tf::poly::Polynomial;

const MAX_ITERATIONS: usize = 200;

/// All complex roots of a real polynomial of degree >= 1.
///
/// Uses the Aberth-Ehrlich simultaneous iteration (no companion matrix, no
/// linear-algebra dependency) with a 200-iteration cap. Exact zero roots are
/// deflated first so characteristic polynomials with a free `s` factor pose
/// no problem. Every returned root is validated against the residual bound
///
/// `|p(r)| / (max|c_i| * max(1, |r|)^degree) < 1e-8`
///
/// and the call fails if any root violates it.
pub fn poly_roots<T: Scalar>(p: &Polynomial<T>) -> Result<Vec<Complex<T>>> {
    poly_roots_with_bound(p, residual_bound::<T>())
}

/// [`poly_roots`] with an explicit residual acceptance bound.
pub fn poly_roots_with_bound<T: Scalar>(
    p: &Polynomial<T>,
    bound: T,
) -> Result<Vec<Complex<T>>> {
    p.ensure_nonzero()?;
    if p.degree() == 0 {
        return Err(Error::InvalidParameter(
            "poly_roots requires degree >= 1".into(),
        ));
    }

    let mut coeffs: Vec<T> = p.coeffs().to_vec();
    let mut roots: Vec<Complex<T>> = Vec::with_capacity(p.degree());

    // Deflate exact zero roots.
    while coeffs.len() > 1 && coeffs[0] == T::zero() {
        roots.push(Complex::new(T::zero(), T::zero()));
        coeffs.remove(0);
    }

    let degree = coeffs.len() - 1;
    match degree {
        0 => {}
        1 => roots.push(Complex::new(-coeffs[0] / coeffs[1], T::zero())),
        2 => roots.extend(quadratic_roots(coeffs[0], coeffs[1], coeffs[2])),
        _ => roots.extend(aberth(&coeffs)?),
    }

    // Residual acceptance test on the original polynomial.
    let max_c = p.max_coeff_magnitude();
    let deg = p.degree() as i32;
    let mut worst = T::zero();
    for &r in &roots {
        let scale = max_c * T::one().max(r.norm()).powi(deg);
        let res = p.eval(r).norm() / scale;
        worst = worst.max(res);
    }
    if worst > bound || !worst.is_finite() {
        return Err(Error::RootFinding {
            residual: worst.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(roots)
}

/// Largest real part over all roots.
pub fn max_real_part<T: Scalar>(p: &Polynomial<T>) -> Result<T> {
    max_real_part_with_bound(p, residual_bound::<T>())
}

/// [`max_real_part`] with an explicit residual acceptance bound.
pub fn max_real_part_with_bound<T: Scalar>(p: &Polynomial<T>, bound: T) -> Result<T> {
    let roots = poly_roots_with_bound(p, bound)?;
    Ok(roots
        .iter()
        .fold(T::neg_infinity(), |m, r| m.max(r.re)))
}

fn residual_bound<T: Scalar>() -> T {
    // 1e-8 for f64; widened for narrower scalar types.
    T::of(1e-8).max(T::epsilon() * T::of(50.0))
}

fn quadratic_roots<T: Scalar>(c0: T, c1: T, c2: T) -> [Complex<T>; 2] {
    let two = T::of(2.0);
    let disc = c1 * c1 - T::of(4.0) * c2 * c0;
    if disc >= T::zero() {
        // Avoid cancellation: compute the larger-magnitude root first.
        let sq = disc.sqrt();
        let q = if c1 >= T::zero() {
            -(c1 + sq) / two
        } else {
            -(c1 - sq) / two
        };
        let r1 = q / c2;
        let r2 = if q == T::zero() { T::zero() } else { c0 / q };
        [
            Complex::new(r1, T::zero()),
            Complex::new(r2, T::zero()),
        ]
    } else {
        let re = -c1 / (two * c2);
        let im = (-disc).sqrt() / (two * c2);
        [Complex::new(re, im), Complex::new(re, -im)]
    }
}

fn aberth<T: Scalar>(coeffs: &[T]) -> Result<Vec<Complex<T>>> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let monic: Vec<Complex<T>> = coeffs
        .iter()
        .map(|&c| Complex::new(c / lead, T::zero()))
        .collect();
    let deriv: Vec<Complex<T>> = monic
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * T::of(i as f64))
        .collect();

    // Initial guesses on a circle inside the Cauchy bound, with an angular
    // offset so no guess starts on the real axis.
    let cauchy = T::one()
        + monic[..degree]
            .iter()
            .fold(T::zero(), |m, c| m.max(c.norm()));
    let inner = monic[0].norm().powf(T::one() / T::of(degree as f64));
    let radius = (inner + cauchy * T::of(0.5)) * T::of(0.5);
    let radius = if radius > T::zero() { radius } else { T::of(0.5) };
    let mut z: Vec<Complex<T>> = (0..degree)
        .map(|k| {
            let theta = T::of(2.0) * T::PI() * T::of(k as f64) / T::of(degree as f64)
                + T::of(0.7);
            Complex::new(radius * theta.cos(), radius * theta.sin())
        })
        .collect();

    let tol = T::epsilon() * T::of(64.0);
    for _ in 0..MAX_ITERATIONS {
        let mut max_step = T::zero();
        for k in 0..degree {
            let zk = z[k];
            let pv = eval_c(&monic, zk);
            let pd = eval_c(&deriv, zk);
            if pd.norm_sqr() == T::zero() {
                // Derivative vanished; nudge off the critical point.
                z[k] = zk + Complex::new(tol + tol, tol);
                max_step = T::infinity();
                continue;
            }
            let w = pv / pd;
            let mut sigma = Complex::new(T::zero(), T::zero());
            for (j, &zj) in z.iter().enumerate() {
                if j != k {
                    let diff = zk - zj;
                    if diff.norm_sqr() == T::zero() {
                        continue;
                    }
                    sigma = sigma + Complex::new(T::one(), T::zero()) / diff;
                }
            }
            let denom = Complex::new(T::one(), T::zero()) - w * sigma;
            let step = if denom.norm_sqr() == T::zero() { w } else { w / denom };
            z[k] = zk - step;
            if !z[k].re.is_finite() || !z[k].im.is_finite() {
                return Err(Error::RootFinding { residual: f64::NAN });
            }
            max_step = max_step.max(step.norm() / (T::one() + z[k].norm()));
        }
        if max_step < tol {
            break;
        }
    }
    Ok(z)
}

fn eval_c<T: Scalar>(coeffs: &[Complex<T>], z: Complex<T>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}
