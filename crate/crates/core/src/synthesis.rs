//! Builds the transfer functions of the incremental control loop from a
//! configuration and a plant: equivalent controller, open loop broken at the
//! plant input, closed loops, ideal-case PID reduction, the synchronized and
//! asynchronous delay equivalents, and the hedging ratio function.

use crate::blocks::{block_tfs, LoopConfig, PlantModel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tf::{pade2_polys, Polynomial, Rational, TfExpr};

/// Open- and closed-loop transfer functions for one configuration.
#[derive(Debug, Clone)]
pub struct LoopSet<T> {
    /// Equivalent controller.
    pub c_bar: TfExpr<T>,
    /// Open loop broken at the plant input: `Ga * C_bar * H * P`.
    pub l_u: TfExpr<T>,
    /// Command to plant output.
    pub t_yc: TfExpr<T>,
    /// Command to measured output (`H * T_yc`).
    pub t_ymc: TfExpr<T>,
    pub pch: bool,
}

fn gam_loop_is_singular<T: Scalar>(cfg: &LoopConfig<T>) -> bool {
    let gam_unity = (!cfg.comp_filter || cfg.t_diff == T::zero())
        && (!cfg.comp_sensor || cfg.t_sensor == T::zero())
        && cfg.tau_am == T::zero();
    gam_unity && cfg.t_act == T::zero() && cfg.tau_a == T::zero()
}

/// `1 / (1 - Ga*Gam)` kept structurally as a feedback node so exact delay
/// evaluation stays available (the denominator is transcendental).
fn inner_allocation_loop<T: Scalar>(
    ga: &TfExpr<T>,
    gam: &TfExpr<T>,
) -> TfExpr<T> {
    TfExpr::feedback(TfExpr::one(), ga.clone().times(gam.clone()).neg())
}

/// Equivalent incremental controller. With hedging off this is
///
/// `C_bar = kvt * (K_p + s F) / (B_hat * (1 - Ga*Gam))`
///
/// and with hedging on the `(s + K_r) / (K_p kvt + s + K_r (1 - kvt))`
/// factor is included, where `kvt` is `T_act*K_v` for the modified law and 1
/// for the conventional law.
pub fn equivalent_controller<T: Scalar>(cfg: &LoopConfig<T>) -> Result<TfExpr<T>> {
    cfg.validate()?;
    if gam_loop_is_singular(cfg) {
        return Err(Error::SingularStructure(
            "1 - Ga*Gam vanishes identically (instantaneous actuator and measurement path)"
                .into(),
        ));
    }
    let blocks = block_tfs(cfg)?;
    let kvt = cfg.kvt();
    let gain = TfExpr::scale(kvt / cfg.b_hat);
    let err_path = TfExpr::atom(cfg.error_plus_derivative());
    let inner = inner_allocation_loop(&blocks.ga, &blocks.gam);
    let base = gain.times(err_path).times(inner);
    if !cfg.pch {
        return Ok(base);
    }
    let hedge = Rational::new(
        Polynomial::linear(cfg.k_r, T::one()),
        pch_denominator(cfg),
    )?;
    Ok(base.times(TfExpr::atom(hedge)))
}

/// `K_p*kvt + s + K_r*(1 - kvt)` — the extra closed-loop factor that
/// hedging introduces.
fn pch_denominator<T: Scalar>(cfg: &LoopConfig<T>) -> Polynomial<T> {
    let kvt = cfg.kvt();
    Polynomial::linear(cfg.k_p * kvt + cfg.k_r * (T::one() - kvt), T::one())
}

/// Open-loop transfer function broken at the plant input.
pub fn open_loop<T: Scalar>(
    cfg: &LoopConfig<T>,
    plant: &PlantModel<T>,
) -> Result<TfExpr<T>> {
    let blocks = block_tfs(cfg)?;
    let c_bar = equivalent_controller(cfg)?;
    Ok(blocks
        .ga
        .times(c_bar)
        .times(blocks.h)
        .times(plant.tf_expr()))
}

/// Closed-loop transfer functions from command to output and to measured
/// output, together with the open loop they close over.
pub fn closed_loop<T: Scalar>(
    cfg: &LoopConfig<T>,
    plant: &PlantModel<T>,
) -> Result<LoopSet<T>> {
    let blocks = block_tfs(cfg)?;
    let c_bar = equivalent_controller(cfg)?;
    let l_u = blocks
        .ga
        .clone()
        .times(c_bar.clone())
        .times(blocks.h.clone())
        .times(plant.tf_expr());

    let kvt = cfg.kvt();
    let inner = inner_allocation_loop(&blocks.ga, &blocks.gam);
    let kp_plus_s = Polynomial::linear(cfg.k_p, T::one());

    // Forward path from the reference model's pseudo command to the output,
    // divided by B_hat*(1 - Ga*Gam); closing over L_u yields T_yc.
    let t_yc = if !cfg.pch {
        let reference = Rational::new(
            Polynomial::constant(cfg.k_r),
            Polynomial::linear(cfg.k_r, T::one()),
        )?;
        TfExpr::atom(reference)
            .times(TfExpr::scale(kvt / cfg.b_hat))
            .times(blocks.ga.clone())
            .times(plant.tf_expr())
            .times(TfExpr::atom(Rational::from_poly(kp_plus_s)))
            .times(inner)
            .times(TfExpr::feedback(TfExpr::one(), l_u.clone()))
    } else {
        let lead = Rational::new(
            kp_plus_s.scale(cfg.k_r),
            pch_denominator(cfg),
        )?;
        TfExpr::atom(lead)
            .times(TfExpr::scale(kvt / cfg.b_hat))
            .times(blocks.ga.clone())
            .times(plant.tf_expr())
            .times(inner)
            .times(TfExpr::feedback(TfExpr::one(), l_u.clone()))
    };

    let t_ymc = blocks.h.clone().times(t_yc.clone());
    Ok(LoopSet {
        c_bar,
        l_u,
        t_yc,
        t_ymc,
        pch: cfg.pch,
    })
}

/// Ideal-case PID coefficients `(C_P, C_I, C_D)` of the equivalent
/// controller:
///
/// `C_P = (K_p T_act + 1) K_v / B_hat`, `C_I = K_v K_p / B_hat`,
/// `C_D = T_act K_v / B_hat`.
///
/// Refuses configurations that are not the ideal case — no silent
/// approximation.
pub fn pid_reduction<T: Scalar>(cfg: &LoopConfig<T>) -> Result<(T, T, T)> {
    cfg.validate()?;
    let ideal = cfg.t_sensor == T::zero()
        && cfg.tau_s == T::zero()
        && cfg.t_diff == T::zero()
        && cfg.tau_am == T::zero()
        && cfg.tau_a == T::zero();
    if !ideal {
        return Err(Error::InvalidParameter(
            "pid_reduction requires the ideal case (unity sensor, filter and measurement dynamics)"
                .into(),
        ));
    }
    if cfg.t_act == T::zero() {
        return Err(Error::SingularStructure(
            "ideal case with T_act = 0 has no PID form (1 - Ga*Gam vanishes)".into(),
        ));
    }
    // Effective K_v absorbs the conventional-law substitution kvt = 1.
    let kv_eff = cfg.kvt() / cfg.t_act;
    let c_p = (cfg.k_p * cfg.t_act + T::one()) * kv_eff / cfg.b_hat;
    let c_i = kv_eff * cfg.k_p / cfg.b_hat;
    let c_d = cfg.t_act * kv_eff / cfg.b_hat;
    Ok((c_p, c_i, c_d))
}

/// Synchronized-delay equivalent (Pade form):
///
/// `Gamma1(s) = (12 - 6 tau1 s + tau1^2 s^2) / (12 + 12 tau1/T_act + 6 tau1 s + tau1^2 s^2)`
pub fn gamma1<T: Scalar>(tau1: T, t_act: T) -> Result<Rational<T>> {
    if tau1 < T::zero() {
        return Err(Error::NegativeDelay(tau1.to_f64().unwrap_or(f64::NAN)));
    }
    if !(t_act > T::zero()) {
        return Err(Error::InvalidParameter("gamma1 requires T_act > 0".into()));
    }
    let (num, den) = pade2_polys(tau1);
    let shift = Polynomial::constant(T::of(12.0) * tau1 / t_act);
    Rational::new(num, den.add(&shift))
}

/// Asynchronous-delay equivalent (Pade form):
///
/// `Gamma2(s) = (12 - 6 tau1 s + tau1^2 s^2)(12 + 6 tau2 s + tau2^2 s^2) /
///  [(12 + 6 tau1 s + tau1^2 s^2)(12 + 12 tau2/T_act + 6 tau2 s + tau2^2 s^2)]`
pub fn gamma2<T: Scalar>(tau1: T, tau2: T, t_act: T) -> Result<Rational<T>> {
    if tau1 < T::zero() || tau2 < T::zero() {
        return Err(Error::NegativeDelay(
            tau1.min(tau2).to_f64().unwrap_or(f64::NAN),
        ));
    }
    if !(t_act > T::zero()) {
        return Err(Error::InvalidParameter("gamma2 requires T_act > 0".into()));
    }
    let (n1, d1) = pade2_polys(tau1);
    let (_, d2) = pade2_polys(tau2);
    let shift = Polynomial::constant(T::of(12.0) * tau2 / t_act);
    let num = n1.mul(&d2);
    let den = d1.mul(&d2.add(&shift));
    Rational::new(num, den)
}

/// Hedging ratio `R(s) = L_u_pch / L_u = (s + K_r) / (s + K_r + kvt*(K_p - K_r))`.
pub fn pch_ratio<T: Scalar>(cfg: &LoopConfig<T>) -> Result<Rational<T>> {
    cfg.validate()?;
    Rational::new(
        Polynomial::linear(cfg.k_r, T::one()),
        pch_denominator(cfg),
    )
}
