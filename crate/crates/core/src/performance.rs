//! Closed-loop performance functions: tracking error, sensitivity,
//! disturbance and noise transfer, with or without hedging, plus the
//! identities that tie them to the open loop.

use crate::blocks::{block_tfs, LoopConfig, PlantModel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::synthesis::{closed_loop, pch_ratio};
use crate::tf::{log_space, Polynomial, Rational, TfExpr};

/// Sensitivity and disturbance/noise transfer set for one configuration.
///
/// Each member is wired from the block diagram along its own signal path, so
/// the construction-time identity checks (`S (1 + L_u) = 1`, `T_yd = P S`,
/// `T_yn = S - 1`) genuinely cross two routes.
#[derive(Debug, Clone)]
pub struct PerformanceSet<T> {
    /// Sensitivity `S = 1/(1 + L_u)`.
    pub s: TfExpr<T>,
    /// Command to tracking error (reference minus measured output).
    pub t_ec: TfExpr<T>,
    /// Plant-input disturbance to output, `P/(1 + L_u)`.
    pub t_yd: TfExpr<T>,
    /// Measurement noise to output, `S - 1`.
    pub t_yn: TfExpr<T>,
    pub pch: bool,
}

/// Build the performance set and verify the three structural identities on a
/// 50-point grid; a residual above 1e-8 is a wiring bug, reported as an
/// error rather than a value.
pub fn performance_set<T: Scalar>(
    cfg: &LoopConfig<T>,
    plant: &PlantModel<T>,
) -> Result<PerformanceSet<T>> {
    let blocks = block_tfs(cfg)?;
    let loops = closed_loop(cfg, plant)?;
    let l_u = loops.l_u.clone();
    let c_bar = loops.c_bar.clone();

    let s = TfExpr::feedback(TfExpr::one(), l_u.clone());

    // T_ec = K_r/(s+K_r) * [1 - (K_p+s)/(K_p+sF) * L_u/(1+L_u)]
    let reference = Rational::new(
        Polynomial::constant(cfg.k_r),
        Polynomial::linear(cfg.k_r, T::one()),
    )?;
    let lead = Rational::new(
        Polynomial::linear(cfg.k_p, T::one()),
        Polynomial::one(),
    )?
    .mul(&reciprocal(&cfg.error_plus_derivative())?);
    let t_ec = TfExpr::atom(reference).times(
        TfExpr::one().plus(
            TfExpr::atom(lead)
                .times(TfExpr::feedback(l_u.clone(), TfExpr::one()))
                .neg(),
        ),
    );

    // Disturbance enters at the plant input; the loop seen from there is the
    // controller chain Ga*C_bar*H.
    let t_yd = TfExpr::feedback(
        plant.tf_expr(),
        blocks.ga.clone().times(c_bar.clone()).times(blocks.h.clone()),
    );

    // Noise path: -H*C_bar*Ga*P closed over the same loop.
    let t_yn = blocks
        .h
        .clone()
        .times(c_bar)
        .times(blocks.ga)
        .times(plant.tf_expr())
        .times(TfExpr::feedback(TfExpr::one(), l_u.clone()))
        .neg();

    let set = PerformanceSet {
        s,
        t_ec,
        t_yd,
        t_yn,
        pch: cfg.pch,
    };
    set.verify_identities(&l_u, plant)?;
    Ok(set)
}

fn reciprocal<T: Scalar>(r: &Rational<T>) -> Result<Rational<T>> {
    Rational::new(r.den().clone(), r.num().clone())
}

impl<T: Scalar> PerformanceSet<T> {
    fn verify_identities(&self, l_u: &TfExpr<T>, plant: &PlantModel<T>) -> Result<()> {
        let tol = T::of(1e-8);
        let one = num_complex::Complex::new(T::one(), T::zero());
        let p = plant.tf();
        for w in log_space(T::of(1e-2), T::of(1e3), 50) {
            let s_v = self.s.eval_exact(w)?;
            let l_v = l_u.eval_exact(w)?;
            let r1 = (s_v * (one + l_v) - one).norm();
            if r1 > tol {
                return Err(Error::IdentityCheck {
                    what: "S*(1+L_u) = 1",
                    omega: w.to_f64().unwrap_or(f64::NAN),
                    residual: r1.to_f64().unwrap_or(f64::NAN),
                });
            }
            let p_v = p.eval_jw(w)?;
            let yd_v = self.t_yd.eval_exact(w)?;
            let r2 = (yd_v - p_v * s_v).norm() / (T::one() + (p_v * s_v).norm());
            if r2 > tol {
                return Err(Error::IdentityCheck {
                    what: "T_yd = P*S",
                    omega: w.to_f64().unwrap_or(f64::NAN),
                    residual: r2.to_f64().unwrap_or(f64::NAN),
                });
            }
            let yn_v = self.t_yn.eval_exact(w)?;
            let r3 = (yn_v - (s_v - one)).norm();
            if r3 > tol {
                return Err(Error::IdentityCheck {
                    what: "T_yn = S - 1",
                    omega: w.to_f64().unwrap_or(f64::NAN),
                    residual: r3.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }
}

/// Magnitude curves of `S`, `T_yd`, `T_yn` with hedging off and on, plus the
/// ratio-function bound that orders the two loop gains.
#[derive(Debug, Clone)]
pub struct PchComparison<T> {
    pub omegas: Vec<T>,
    pub s_off: Vec<T>,
    pub s_on: Vec<T>,
    pub t_yd_off: Vec<T>,
    pub t_yd_on: Vec<T>,
    pub t_yn_off: Vec<T>,
    pub t_yn_on: Vec<T>,
    /// `|R(jw)|` over the grid.
    pub ratio_mag: Vec<T>,
    /// `|R| <= 1` everywhere (expected when `K_p > K_r`).
    pub ratio_below_one: bool,
    /// `|R| >= 1` everywhere (expected when `K_p < K_r`).
    pub ratio_above_one: bool,
    /// `|L_u_pch| <= |L_u|` at every grid point.
    pub hedged_loop_gain_below: bool,
}

/// Compare the performance functions with hedging on and off. The
/// assertable consequence of the ratio function is the pointwise loop-gain
/// ordering, which the report carries along with the raw curves.
pub fn pch_performance_delta<T: Scalar>(
    cfg: &LoopConfig<T>,
    plant: &PlantModel<T>,
    omegas: &[T],
) -> Result<PchComparison<T>> {
    let off_cfg = LoopConfig { pch: false, ..cfg.clone() };
    let on_cfg = LoopConfig { pch: true, ..cfg.clone() };
    let off = performance_set(&off_cfg, plant)?;
    let on = performance_set(&on_cfg, plant)?;
    let ratio = pch_ratio(cfg)?;
    let l_off = crate::synthesis::open_loop(&off_cfg, plant)?;
    let l_on = crate::synthesis::open_loop(&on_cfg, plant)?;

    let mags = |e: &TfExpr<T>| -> Result<Vec<T>> {
        omegas.iter().map(|&w| Ok(e.eval_exact(w)?.norm())).collect()
    };
    let s_off = mags(&off.s)?;
    let s_on = mags(&on.s)?;
    let t_yd_off = mags(&off.t_yd)?;
    let t_yd_on = mags(&on.t_yd)?;
    let t_yn_off = mags(&off.t_yn)?;
    let t_yn_on = mags(&on.t_yn)?;

    let mut ratio_mag = Vec::with_capacity(omegas.len());
    let mut below = true;
    let mut above = true;
    let mut hedged_below = true;
    let slack = T::one() + T::of(1e-12);
    for &w in omegas {
        let r = ratio.eval_jw(w)?.norm();
        ratio_mag.push(r);
        if r > slack {
            below = false;
        }
        if r < T::one() / slack {
            above = false;
        }
        let a = l_off.eval_exact(w)?.norm();
        let b = l_on.eval_exact(w)?.norm();
        if b > a * slack {
            hedged_below = false;
        }
    }

    Ok(PchComparison {
        omegas: omegas.to_vec(),
        s_off,
        s_on,
        t_yd_off,
        t_yd_on,
        t_yn_off,
        t_yn_on,
        ratio_mag,
        ratio_below_one: below,
        ratio_above_one: above,
        hedged_loop_gain_below: hedged_below,
    })
}
