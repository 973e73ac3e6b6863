//! Numerical and closed-form stability assessment: gain/phase/time-delay
//! margins, the roll-mode closed-form margins, synchronized-delay Routh
//! bound, asynchronous-delay stability grids and compensation comparisons.

use num_complex::Complex;

use crate::blocks::{LoopConfig, PlantModel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::synthesis::open_loop;
use crate::tf::response::principal_angle;
use crate::tf::{log_space, max_real_part, pade2_polys, Polynomial, TfExpr};

/// Real-part guard band for stability verdicts: a configuration counts as
/// stable only when every root satisfies `Re < -STABILITY_GUARD_BAND`.
pub const STABILITY_GUARD_BAND: f64 = 1e-9;

/// Classical margin set for one open loop.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginReport<T> {
    /// Gain margin as a ratio; `+inf` when the phase never crosses an odd
    /// multiple of -180 degrees on the searched band.
    pub gain_margin: T,
    /// Phase margin in degrees at the gain crossover yielding the smallest
    /// time-delay margin; `None` when there is no gain crossover in band.
    pub phase_margin_deg: Option<T>,
    /// `phase_margin(rad) / gain_crossover`, minimized over gain crossovers.
    pub time_delay_margin: Option<T>,
    /// Gain crossover used for the margin values above (rad/s).
    pub gain_crossover: Option<T>,
    /// All phase crossover frequencies found in band (rad/s).
    pub phase_crossovers: Vec<T>,
}

impl<T: Scalar> MarginReport<T> {
    pub fn gain_margin_db(&self) -> T {
        T::of(20.0) * self.gain_margin.log10()
    }
}

/// Margin search over `band` with the default 801-point scan density.
pub fn margins<T: Scalar>(expr: &TfExpr<T>, band: (T, T)) -> Result<MarginReport<T>> {
    margins_with_points(expr, band, 801)
}

/// Margin search with an explicit log-scan density (refined adaptively where
/// the phase moves quickly, then bisected to 1e-6 relative frequency).
pub fn margins_with_points<T: Scalar>(
    expr: &TfExpr<T>,
    band: (T, T),
    points: usize,
) -> Result<MarginReport<T>> {
    let (lo, hi) = band;
    if !(lo > T::zero() && hi > lo) {
        return Err(Error::InvalidParameter(
            "margin band must satisfy 0 < lo < hi".into(),
        ));
    }
    let points = points.max(801);

    // Scan, refining segments until the principal phase step is small and
    // consistent with a midpoint probe (catches full-turn aliasing that the
    // base grid cannot see).
    let base = log_space(lo, hi, points);
    let mut samples: Vec<(T, Complex<T>)> = Vec::with_capacity(2 * points);
    let first = expr.eval_exact(base[0])?;
    samples.push((base[0], first));
    for pair in base.windows(2) {
        let b_val = expr.eval_exact(pair[1])?;
        let (a_w, a_val) = *samples.last().expect("nonempty");
        refine_segment(expr, a_w, a_val, pair[1], b_val, 0, &mut samples)?;
    }

    // Unwrapped phase along the refined grid.
    let mut phases: Vec<T> = Vec::with_capacity(samples.len());
    let mut prev = samples[0].1.arg();
    phases.push(prev);
    for &(_, v) in samples.iter().skip(1) {
        let p = prev + principal_angle(v.arg() - prev);
        phases.push(p);
        prev = p;
    }

    // Gain crossovers: sign changes of ln|L|.
    let mut gain_crossovers: Vec<T> = Vec::new();
    for i in 0..samples.len() - 1 {
        let fa = samples[i].1.norm().ln();
        let fb = samples[i + 1].1.norm().ln();
        if fa == T::zero() {
            gain_crossovers.push(samples[i].0);
        } else if fa * fb < T::zero() {
            gain_crossovers.push(bisect_unit_gain(
                expr,
                samples[i].0,
                samples[i + 1].0,
                fa,
            )?);
        }
    }
    if samples.last().map(|s| s.1.norm().ln()) == Some(T::zero()) {
        gain_crossovers.push(samples.last().expect("nonempty").0);
    }

    // Phase crossovers: unwrapped phase through any odd multiple of pi.
    let mut phase_crossovers: Vec<T> = Vec::new();
    let mut gm = T::infinity();
    for i in 0..samples.len() - 1 {
        let (pa, pb) = (phases[i], phases[i + 1]);
        for target in odd_pi_targets(pa, pb) {
            let (w, mag) = bisect_phase_target(
                expr,
                samples[i].0,
                samples[i + 1].0,
                samples[i].1,
                pa,
                target,
            )?;
            phase_crossovers.push(w);
            if mag > T::zero() {
                gm = gm.min(T::one() / mag);
            }
        }
    }

    // Phase margin and delay margin from the gain crossovers: the margin at
    // each crossover only needs the principal phase there.
    let mut best: Option<(T, T, T)> = None; // (tdm, pm_rad, omega)
    for &w in &gain_crossovers {
        let v = expr.eval_exact(w)?;
        let pm = principal_angle(v.arg() + T::PI());
        let tdm = pm / w;
        if best.map_or(true, |(t, _, _)| tdm < t) {
            best = Some((tdm, pm, w));
        }
    }

    let (time_delay_margin, phase_margin_deg, gain_crossover) = match best {
        Some((tdm, pm, w)) => (
            Some(tdm),
            Some(pm * T::of(180.0) / T::PI()),
            Some(w),
        ),
        None => (None, None, None),
    };

    Ok(MarginReport {
        gain_margin: gm,
        phase_margin_deg,
        time_delay_margin,
        gain_crossover,
        phase_crossovers,
    })
}

fn refine_segment<T: Scalar>(
    expr: &TfExpr<T>,
    a_w: T,
    a_val: Complex<T>,
    b_w: T,
    b_val: Complex<T>,
    depth: usize,
    out: &mut Vec<(T, Complex<T>)>,
) -> Result<()> {
    let m_w = (a_w * b_w).sqrt();
    if depth >= 30 || !(m_w > a_w && m_w < b_w) {
        out.push((b_w, b_val));
        return Ok(());
    }
    let m_val = expr.eval_exact(m_w)?;
    let d_am = principal_angle(m_val.arg() - a_val.arg());
    let d_mb = principal_angle(b_val.arg() - m_val.arg());
    let d_ab = principal_angle(b_val.arg() - a_val.arg());
    let threshold = T::of(0.45);
    let consistent = (d_am + d_mb - d_ab).abs() < T::of(1e-9);
    if d_am.abs() > threshold || d_mb.abs() > threshold || !consistent {
        refine_segment(expr, a_w, a_val, m_w, m_val, depth + 1, out)?;
        refine_segment(expr, m_w, m_val, b_w, b_val, depth + 1, out)?;
    } else {
        out.push((m_w, m_val));
        out.push((b_w, b_val));
    }
    Ok(())
}

fn bisect_unit_gain<T: Scalar>(
    expr: &TfExpr<T>,
    mut a: T,
    mut b: T,
    mut fa: T,
) -> Result<T> {
    let tol = T::of(1e-6);
    for _ in 0..100 {
        if (b - a) <= tol * a {
            break;
        }
        let m = (a * b).sqrt();
        let fm = expr.eval_exact(m)?.norm().ln();
        if fm == T::zero() {
            return Ok(m);
        }
        if fa * fm < T::zero() {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok((a * b).sqrt())
}

/// Odd multiples of pi strictly inside the phase interval.
fn odd_pi_targets<T: Scalar>(pa: T, pb: T) -> Vec<T> {
    let (lo, hi) = if pa <= pb { (pa, pb) } else { (pb, pa) };
    let pi = T::PI();
    let two = T::of(2.0);
    // Smallest odd k with k*pi >= lo.
    let mut k = (lo / pi).ceil();
    let k_int = k.to_f64().unwrap_or(0.0) as i64;
    if k_int % 2 == 0 {
        k = k + T::one();
    }
    let mut out = Vec::new();
    let mut target = k * pi;
    while target <= hi {
        if target > lo {
            out.push(target);
        }
        target = target + two * pi;
    }
    out
}

fn bisect_phase_target<T: Scalar>(
    expr: &TfExpr<T>,
    mut a: T,
    mut b: T,
    a_val: Complex<T>,
    a_phase: T,
    target: T,
) -> Result<(T, T)> {
    // Phase continuation relative to the left endpoint: the refined segments
    // are narrow enough that the phase moves by less than pi inside one.
    let phase_at = |v: Complex<T>| a_phase + principal_angle(v.arg() - a_val.arg());
    let mut fa = a_phase - target;
    let tol = T::of(1e-6);
    let mut m = (a * b).sqrt();
    for _ in 0..100 {
        if (b - a) <= tol * a {
            break;
        }
        m = (a * b).sqrt();
        let v = expr.eval_exact(m)?;
        let fm = phase_at(v) - target;
        if fm == T::zero() {
            break;
        }
        if fa * fm < T::zero() {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let v = expr.eval_exact(m)?;
    Ok((m, v.norm()))
}

/// Closed-form margins of the ideal roll-mode incremental loop:
///
/// `GM = inf`,
/// `PM = atan(w_c/K_p) - atan(L_p/w_c)`,
/// `TDM = PM(rad)/w_c`,
///
/// with the magnitude crossover
///
/// `w_c^2 = [K_v^2 - (L_p*rho)^2 + sqrt((K_v^2 - (L_p*rho)^2)^2 + 4 rho^2 K_p^2 K_v^2)] / 2`
///
/// where `rho` is the effectiveness estimate ratio (estimate over true).
pub fn roll_margins_closed_form<T: Scalar>(
    k_p: T,
    k_v: T,
    l_p: T,
    effectiveness_ratio: T,
) -> Result<MarginReport<T>> {
    if !(k_p > T::zero() && k_v > T::zero()) {
        return Err(Error::InvalidParameter(
            "closed-form roll margins require K_p > 0 and K_v > 0".into(),
        ));
    }
    let rho = effectiveness_ratio;
    let a = k_v * k_v - (l_p * rho) * (l_p * rho);
    let disc = (a * a + T::of(4.0) * rho * rho * k_p * k_p * k_v * k_v).sqrt();
    let w_c = ((a + disc) / T::of(2.0)).sqrt();
    let pm = (w_c / k_p).atan() - (l_p / w_c).atan();
    Ok(MarginReport {
        gain_margin: T::infinity(),
        phase_margin_deg: Some(pm * T::of(180.0) / T::PI()),
        time_delay_margin: Some(pm / w_c),
        gain_crossover: Some(w_c),
        phase_crossovers: Vec::new(),
    })
}

/// Characteristic polynomial of the synchronized-delay closed loop in Pade
/// form, generalized so the plant numerator's monic factor multiplies the
/// gain term (for the roll plant the quartic expands coefficient-exactly):
///
/// `det(s) = det(sI-A) [s(12 + 6 tau1 s + tau1^2 s^2) + 12 (tau1/T_act) s]
///           + K_v (K_p + s)(12 - 6 tau1 s + tau1^2 s^2) * monic`
///
/// Requires `B_hat = C*B` (the derivation substitutes `B_hat/P = det(sI-A)`).
/// The `tau1 = 0` limit returns the 12-normalized ideal characteristic
/// polynomial `s*det(sI-A) + K_v(K_p+s)*monic`.
pub fn sync_delay_char_poly<T: Scalar>(
    cfg: &LoopConfig<T>,
    plant: &PlantModel<T>,
    tau1: T,
) -> Result<Polynomial<T>> {
    cfg.validate()?;
    if tau1 < T::zero() {
        return Err(Error::NegativeDelay(tau1.to_f64().unwrap_or(f64::NAN)));
    }
    if !(cfg.t_act > T::zero()) {
        return Err(Error::InvalidParameter(
            "sync_delay_char_poly requires T_act > 0".into(),
        ));
    }
    let cb = plant.cb();
    if ((cfg.b_hat - cb) / cb).abs() > T::of(1e-12) {
        return Err(Error::InvalidParameter(
            "sync_delay_char_poly requires B_hat = C*B".into(),
        ));
    }
    let det_a = plant.char_poly();
    let monic = plant.numerator().scale(T::one() / cb);
    let kv_eff = cfg.kvt() / cfg.t_act;
    let kp_plus_s = Polynomial::linear(cfg.k_p, T::one());
    if tau1 == T::zero() {
        return Ok(det_a
            .mul(&Polynomial::s())
            .add(&kp_plus_s.mul(&monic).scale(kv_eff)));
    }
    let (pn, pd) = pade2_polys(tau1);
    let bracket = Polynomial::s()
        .mul(&pd.add(&Polynomial::constant(T::of(12.0) * tau1 / cfg.t_act)));
    Ok(det_a
        .mul(&bracket)
        .add(&kp_plus_s.mul(&pn).mul(&monic).scale(kv_eff)))
}

/// Largest synchronized delay the roll-mode loop tolerates:
///
/// `tau1 < (2 K_v - 2 L_p) / (K_p K_v + 2 L_p / T_act)` when
/// `K_p K_v > -2 L_p / T_act`, unbounded otherwise.
///
/// The closed form assumes `K_v <= 1/T_act`; callers can check
/// [`LoopConfig::warnings`] for violations of that practical assumption.
pub fn sync_delay_bound<T: Scalar>(k_p: T, k_v: T, l_p: T, t_act: T) -> T {
    let denom = k_p * k_v + T::of(2.0) * l_p / t_act;
    if denom > T::zero() {
        (T::of(2.0) * k_v - T::of(2.0) * l_p) / denom
    } else {
        T::infinity()
    }
}

/// Characteristic polynomial of the closed loop with independent Pade-2
/// substituted delays `tau1` (forward path, `tau_a + tau_s`) and `tau2`
/// (measurement path, `tau_a + tau_am`), including whatever sensor/filter
/// lags and compensation the configuration selects:
///
/// `B_hat [(T_act s + 1) d2 Dgam - n2] d1 D_F D_H D_P
///  + kvt N_KF N_P n1 d2 Dgam`
///
/// where `n_i/d_i` are the Pade pairs, `D_P`/`N_P` the plant denominator and
/// numerator, `N_KF/D_F = K_p + s F(s)`, `D_H` the sensor lag and `Dgam` the
/// compensated lags. Only the loop denominator structure is rationalized, so
/// the spurious right-half-plane zeros of forward-path Pade numerators never
/// enter the verdict.
pub fn delay_char_poly<T: Scalar>(
    cfg: &LoopConfig<T>,
    plant: &PlantModel<T>,
    tau1: T,
    tau2: T,
) -> Result<Polynomial<T>> {
    cfg.validate()?;
    if tau1 < T::zero() || tau2 < T::zero() {
        return Err(Error::NegativeDelay(
            tau1.min(tau2).to_f64().unwrap_or(f64::NAN),
        ));
    }
    let (n1, d1) = pade2_polys(tau1);
    let (n2, d2) = pade2_polys(tau2);
    let d_f = Polynomial::linear(T::one(), cfg.t_diff);
    let d_h = Polynomial::linear(T::one(), cfg.t_sensor);
    let mut d_gam = Polynomial::one();
    if cfg.comp_filter && cfg.t_diff > T::zero() {
        d_gam = d_gam.mul(&d_f);
    }
    if cfg.comp_sensor && cfg.t_sensor > T::zero() {
        d_gam = d_gam.mul(&d_h);
    }
    let t_act_term = Polynomial::linear(T::one(), cfg.t_act);
    let n_kf = Polynomial::linear(cfg.k_p, T::one() + cfg.k_p * cfg.t_diff);

    let loop_den = t_act_term
        .mul(&d2)
        .mul(&d_gam)
        .sub(&n2)
        .mul(&d1)
        .mul(&d_f)
        .mul(&d_h)
        .mul(&plant.char_poly())
        .scale(cfg.b_hat);
    let loop_num = n_kf
        .mul(&plant.numerator())
        .mul(&n1)
        .mul(&d2)
        .mul(&d_gam)
        .scale(cfg.kvt());
    Ok(loop_den.add(&loop_num))
}

/// One stability verdict grid over `(tau1, tau2)`.
#[derive(Debug, Clone)]
pub struct StabilityGrid<T> {
    pub tau1_values: Vec<T>,
    pub tau2_values: Vec<T>,
    /// `stable[i][j]` for `tau1_values[i]`, `tau2_values[j]`.
    pub stable: Vec<Vec<bool>>,
    /// Largest root real part per cell; NaN when root finding failed.
    pub max_real_part: Vec<Vec<T>>,
    /// Cells whose root finding failed; they are counted as not stable.
    pub indeterminate: Vec<(usize, usize)>,
    /// Human-readable snapshot of the configuration the grid was built for.
    pub config_label: String,
}

impl<T: Scalar> StabilityGrid<T> {
    pub fn stable_count(&self) -> usize {
        self.stable
            .iter()
            .map(|row| row.iter().filter(|&&s| s).count())
            .sum()
    }
}

/// Numerical tolerances for grid verdicts: the root-real-part guard band and
/// the root-finder residual acceptance bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridTolerances<T> {
    pub guard: T,
    pub root_residual_bound: T,
}

impl<T: Scalar> Default for GridTolerances<T> {
    fn default() -> Self {
        GridTolerances {
            guard: T::of(STABILITY_GUARD_BAND),
            root_residual_bound: T::of(1e-8).max(T::epsilon() * T::of(50.0)),
        }
    }
}

/// Sweep the delay plane and classify each cell by the sign of the largest
/// characteristic root. Root-finding failures are marked indeterminate and
/// never counted stable.
pub fn delay_stability_grid<T: Scalar>(
    cfg: &LoopConfig<T>,
    plant: &PlantModel<T>,
    tau1s: &[T],
    tau2s: &[T],
) -> Result<StabilityGrid<T>> {
    delay_stability_grid_with(cfg, plant, tau1s, tau2s, &GridTolerances::default())
}

/// [`delay_stability_grid`] with explicit tolerances.
pub fn delay_stability_grid_with<T: Scalar>(
    cfg: &LoopConfig<T>,
    plant: &PlantModel<T>,
    tau1s: &[T],
    tau2s: &[T],
    tol: &GridTolerances<T>,
) -> Result<StabilityGrid<T>> {
    if tau1s.is_empty() || tau2s.is_empty() {
        return Err(Error::InvalidParameter("grid axes must be nonempty".into()));
    }
    if tau1s.iter().chain(tau2s).any(|&t| t < T::zero()) {
        return Err(Error::InvalidParameter("grid delays must be >= 0".into()));
    }
    let guard = tol.guard;
    let mut stable = Vec::with_capacity(tau1s.len());
    let mut max_re = Vec::with_capacity(tau1s.len());
    let mut indeterminate = Vec::new();
    for (i, &t1) in tau1s.iter().enumerate() {
        let mut s_row = Vec::with_capacity(tau2s.len());
        let mut r_row = Vec::with_capacity(tau2s.len());
        for (j, &t2) in tau2s.iter().enumerate() {
            let p = delay_char_poly(cfg, plant, t1, t2)?;
            match crate::tf::max_real_part_with_bound(&p, tol.root_residual_bound) {
                Ok(re) => {
                    s_row.push(re < -guard);
                    r_row.push(re);
                }
                Err(_) => {
                    s_row.push(false);
                    r_row.push(T::nan());
                    indeterminate.push((i, j));
                }
            }
        }
        stable.push(s_row);
        max_re.push(r_row);
    }
    Ok(StabilityGrid {
        tau1_values: tau1s.to_vec(),
        tau2_values: tau2s.to_vec(),
        stable,
        max_real_part: max_re,
        indeterminate,
        config_label: format!(
            "k_p={} k_v={} t_act={} t_sensor={} t_diff={} comp=({},{}) plant={}",
            cfg.k_p,
            cfg.k_v,
            cfg.t_act,
            cfg.t_sensor,
            cfg.t_diff,
            cfg.comp_filter,
            cfg.comp_sensor,
            plant.label
        ),
    })
}

/// Closed-loop stability of `1 + L = 0` after Pade rationalization of the
/// whole loop expression.
pub fn rationalized_loop_stable<T: Scalar>(l_u: &TfExpr<T>) -> Result<bool> {
    let r = l_u.rationalize()?;
    let char_poly = r.closed_loop_char_poly();
    Ok(max_real_part(&char_poly)? < -T::of(STABILITY_GUARD_BAND))
}

/// A single ordering violation between two compensation variants.
#[derive(Debug, Clone)]
pub struct ChainViolation<T> {
    pub omega: T,
    /// Which pair failed: 0 = variants 1 vs 2, 1 = variants 2 vs 3.
    pub pair: usize,
    pub lhs: T,
    pub rhs: T,
}

/// Comparison of the three compensation variants of the actuator-measurement
/// loop: none, filter lag only, filter and sensor lags.
#[derive(Debug, Clone)]
pub struct CompensationReport<T> {
    pub omegas: Vec<T>,
    /// Loop magnitudes per variant, `|L_u1|, |L_u2|, |L_u3|`.
    pub magnitudes: [Vec<T>; 3],
    /// Unwrapped phases per variant (rad).
    pub phases: [Vec<T>; 3],
    pub margins: [MarginReport<T>; 3],
    /// Violations of `|L_u1| > |L_u2| > |L_u3|`.
    pub magnitude_violations: Vec<ChainViolation<T>>,
    /// Violations of `angle L_u3 > angle L_u2 > angle L_u1`.
    pub phase_violations: Vec<ChainViolation<T>>,
    pub gm_nondecreasing: bool,
    pub pm_nondecreasing: bool,
    pub tdm_nondecreasing: bool,
}

impl<T: Scalar> CompensationReport<T> {
    pub fn orderings_hold(&self) -> bool {
        self.magnitude_violations.is_empty() && self.phase_violations.is_empty()
    }
}

/// Evaluate the compensation variants over `omegas` and check both ordering
/// chains pointwise plus the nondecreasing-margin conclusion. Transport
/// delays are zeroed for the comparison (the variant expressions are the
/// delay-free ones; delays would shift every variant identically in phase
/// but distort the measurement-loop comparison).
pub fn compensation_compare<T: Scalar>(
    cfg: &LoopConfig<T>,
    plant: &PlantModel<T>,
    omegas: &[T],
) -> Result<CompensationReport<T>> {
    if !(cfg.t_sensor > T::zero() && cfg.t_diff > T::zero()) {
        return Err(Error::InvalidParameter(
            "compensation comparison requires T_sensor > 0 and T_diff > 0".into(),
        ));
    }
    let variants = [(false, false), (true, false), (true, true)];
    let mut mags: Vec<Vec<T>> = Vec::with_capacity(3);
    let mut phases: Vec<Vec<T>> = Vec::with_capacity(3);
    let mut margin_reports = Vec::with_capacity(3);
    for (comp_filter, comp_sensor) in variants {
        let v_cfg = LoopConfig {
            comp_filter,
            comp_sensor,
            tau_a: T::zero(),
            tau_s: T::zero(),
            tau_am: T::zero(),
            ..cfg.clone()
        };
        let l_u = open_loop(&v_cfg, plant)?;
        let fr = crate::tf::freq_response(&l_u, omegas)?;
        mags.push(fr.magnitudes());
        phases.push(fr.phases_rad_unwrapped());
        margin_reports.push(margins(&l_u, (T::of(1e-3), T::of(1e4)))?);
    }

    let mut magnitude_violations = Vec::new();
    let mut phase_violations = Vec::new();
    for (k, &w) in omegas.iter().enumerate() {
        for pair in 0..2 {
            if !(mags[pair][k] > mags[pair + 1][k]) {
                magnitude_violations.push(ChainViolation {
                    omega: w,
                    pair,
                    lhs: mags[pair][k],
                    rhs: mags[pair + 1][k],
                });
            }
            if !(phases[pair + 1][k] > phases[pair][k]) {
                phase_violations.push(ChainViolation {
                    omega: w,
                    pair,
                    lhs: phases[pair + 1][k],
                    rhs: phases[pair][k],
                });
            }
        }
    }

    let opt_nondecreasing = |get: fn(&MarginReport<T>) -> Option<T>| {
        let a = get(&margin_reports[0]);
        let b = get(&margin_reports[1]);
        let c = get(&margin_reports[2]);
        match (a, b, c) {
            (Some(a), Some(b), Some(c)) => a <= b && b <= c,
            _ => false,
        }
    };
    let gm_nondecreasing = margin_reports[0].gain_margin <= margin_reports[1].gain_margin
        && margin_reports[1].gain_margin <= margin_reports[2].gain_margin;
    let pm_nondecreasing = opt_nondecreasing(|m| m.phase_margin_deg);
    let tdm_nondecreasing = opt_nondecreasing(|m| m.time_delay_margin);

    let margins: [MarginReport<T>; 3] = margin_reports
        .try_into()
        .expect("exactly three variants");
    let magnitudes: [Vec<T>; 3] = mags.try_into().expect("three magnitude tracks");
    let phases: [Vec<T>; 3] = phases.try_into().expect("three phase tracks");

    Ok(CompensationReport {
        omegas: omegas.to_vec(),
        magnitudes,
        phases,
        margins,
        magnitude_violations,
        phase_violations,
        gm_nondecreasing,
        pm_nondecreasing,
        tdm_nondecreasing,
    })
}
