//! Constructors for every block of the loop diagram: plant, actuator, sensor,
//! filter, actuator-measurement path and reference model, plus the scenario
//! signal generators (square-wave command, 1-cos gusts, measurement noise).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tf::{Polynomial, Rational, TfExpr};

/// Named plant parameterizations, kept alongside the realized matrices so
/// Monte-Carlo robustness runs can rebuild perturbed plants.
#[derive(Debug, Clone, PartialEq)]
pub enum PlantKind<T> {
    Roll { l_p: T, l_da: T },
    ShortPeriod { z_alpha: T, z_eta: T, m_alpha: T, m_q: T, m_eta: T },
    Generic,
}

/// SISO LTI plant `x' = Ax + Bu, y = Cx` with relative degree one
/// (`C*B != 0`).
#[derive(Debug, Clone)]
pub struct PlantModel<T> {
    pub a: Vec<Vec<T>>,
    pub b: Vec<T>,
    pub c: Vec<T>,
    pub n: usize,
    pub label: String,
    /// Optional gust input direction: `x' = Ax + Bu + gust_map * alpha_g`.
    pub gust_map: Option<Vec<T>>,
    pub kind: PlantKind<T>,
}

impl<T: Scalar> PlantModel<T> {
    pub fn new_generic(
        a: Vec<Vec<T>>,
        b: Vec<T>,
        c: Vec<T>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let n = a.len();
        if n == 0 || a.iter().any(|row| row.len() != n) || b.len() != n || c.len() != n {
            return Err(Error::InvalidParameter(
                "plant matrices must be square and consistently sized".into(),
            ));
        }
        let model = PlantModel {
            a,
            b,
            c,
            n,
            label: label.into(),
            gust_map: None,
            kind: PlantKind::Generic,
        };
        if model.cb() == T::zero() {
            return Err(Error::InvalidParameter(
                "plant must have C*B != 0 (relative degree one)".into(),
            ));
        }
        Ok(model)
    }

    /// Control effectiveness `C*B`.
    pub fn cb(&self) -> T {
        self.c
            .iter()
            .zip(&self.b)
            .fold(T::zero(), |acc, (&ci, &bi)| acc + ci * bi)
    }

    /// Characteristic polynomial `det(sI - A)` by the Faddeev-LeVerrier
    /// recursion (also yields the adjugate used for the numerator).
    pub fn char_poly(&self) -> Polynomial<T> {
        self.faddeev().0
    }

    /// Numerator polynomial `C adj(sI - A) B`. Its leading coefficient is
    /// `C*B` for relative-degree-one plants.
    pub fn numerator(&self) -> Polynomial<T> {
        self.faddeev().1
    }

    /// Transfer function `P(s) = C adj(sI - A) B / det(sI - A)`.
    pub fn tf(&self) -> Rational<T> {
        let (den, num) = self.faddeev();
        Rational::new(num, den).expect("det(sI - A) is monic, never zero")
    }

    pub fn tf_expr(&self) -> TfExpr<T> {
        TfExpr::atom(self.tf())
    }

    /// Returns `(det(sI-A), C adj(sI-A) B)`.
    fn faddeev(&self) -> (Polynomial<T>, Polynomial<T>) {
        let n = self.n;
        // M_1 = I; c_{n-k} accumulated from traces of A*M_k.
        let mut m = identity::<T>(n);
        let mut char_coeffs = vec![T::zero(); n + 1];
        char_coeffs[n] = T::one();
        // adj(sI - A) = sum_k M_{k+1} s^{n-1-k}
        let mut num_coeffs = vec![T::zero(); n];
        for k in 0..n {
            num_coeffs[n - 1 - k] = self.c_m_b(&m);
            let am = mat_mul(&self.a, &m);
            let c = -trace(&am) / T::of((k + 1) as f64);
            char_coeffs[n - 1 - k] = c;
            m = mat_add_scaled_identity(&am, c);
        }
        (Polynomial::new(char_coeffs), Polynomial::new(num_coeffs))
    }

    fn c_m_b(&self, m: &[Vec<T>]) -> T {
        let mut acc = T::zero();
        for (i, &ci) in self.c.iter().enumerate() {
            for (j, &bj) in self.b.iter().enumerate() {
                acc = acc + ci * m[i][j] * bj;
            }
        }
        acc
    }
}

fn identity<T: Scalar>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect()
}

fn mat_mul<T: Scalar>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(T::zero(), |acc, k| acc + a[i][k] * b[k][j])
                })
                .collect()
        })
        .collect()
}

fn mat_add_scaled_identity<T: Scalar>(a: &[Vec<T>], c: T) -> Vec<Vec<T>> {
    let mut out = a.to_vec();
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = row[i] + c;
    }
    out
}

fn trace<T: Scalar>(a: &[Vec<T>]) -> T {
    (0..a.len()).fold(T::zero(), |acc, i| acc + a[i][i])
}

/// Roll-mode plant `p' = L_p p + L_da da`, output `p`.
pub fn make_roll<T: Scalar>(l_p: T, l_da: T) -> Result<PlantModel<T>> {
    if l_da == T::zero() {
        return Err(Error::InvalidParameter(
            "roll control effectiveness L_da must be nonzero".into(),
        ));
    }
    Ok(PlantModel {
        a: vec![vec![l_p]],
        b: vec![l_da],
        c: vec![T::one()],
        n: 1,
        label: "roll".into(),
        gust_map: None,
        kind: PlantKind::Roll { l_p, l_da },
    })
}

/// Short-period pitch plant with pitch rate `q` as the output:
///
/// `alpha' = Z_alpha*alpha + q + Z_eta*eta`
/// `q'     = M_alpha*alpha + M_q*q + M_eta*eta`
///
/// so `C*B = M_eta`. A vertical gust enters as an equivalent
/// angle-of-attack perturbation through the `Z_alpha`/`M_alpha` channels.
pub fn make_short_period<T: Scalar>(
    z_alpha: T,
    z_eta: T,
    m_alpha: T,
    m_q: T,
    m_eta: T,
) -> Result<PlantModel<T>> {
    if m_eta == T::zero() {
        return Err(Error::InvalidParameter(
            "pitch control effectiveness M_eta must be nonzero (C*B = M_eta)".into(),
        ));
    }
    Ok(PlantModel {
        a: vec![vec![z_alpha, T::one()], vec![m_alpha, m_q]],
        b: vec![z_eta, m_eta],
        c: vec![T::zero(), T::one()],
        n: 2,
        label: "short_period".into(),
        gust_map: Some(vec![z_alpha, m_alpha]),
        kind: PlantKind::ShortPeriod { z_alpha, z_eta, m_alpha, m_q, m_eta },
    })
}

/// Which incremental law the allocation uses. The conventional law is the
/// modified law with the `T_act*K_v` factor pinned to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlLaw {
    Conventional,
    Modified,
}

/// All controller and hardware parameters of the loop.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopConfig<T> {
    /// Error gain (1/s).
    pub k_p: T,
    /// Pseudo-control gain (1/s).
    pub k_v: T,
    /// Reference-model gain (1/s).
    pub k_r: T,
    /// Actuator time constant (s).
    pub t_act: T,
    /// Actuator transport delay (s).
    pub tau_a: T,
    /// Sensor time constant (s).
    pub t_sensor: T,
    /// Sensor transport delay (s).
    pub tau_s: T,
    /// Derivative-filter time constant (s).
    pub t_diff: T,
    /// Actuator-measurement transport delay (s).
    pub tau_am: T,
    /// Control-effectiveness estimate (plant units).
    pub b_hat: T,
    pub law: ControlLaw,
    pub pch: bool,
    /// Include the derivative-filter lag in the actuator-measurement path.
    pub comp_filter: bool,
    /// Include the sensor lag in the actuator-measurement path.
    pub comp_sensor: bool,
}

impl<T: Scalar> LoopConfig<T> {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("t_act", self.t_act),
            ("tau_a", self.tau_a),
            ("t_sensor", self.t_sensor),
            ("tau_s", self.tau_s),
            ("t_diff", self.t_diff),
            ("tau_am", self.tau_am),
        ] {
            if v < T::zero() || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "loop parameter {name} must be finite and >= 0"
                )));
            }
        }
        if self.b_hat == T::zero() {
            return Err(Error::InvalidParameter("b_hat must be nonzero".into()));
        }
        if !(self.k_r > T::zero()) {
            return Err(Error::InvalidParameter("k_r must be > 0".into()));
        }
        Ok(())
    }

    /// Non-fatal advisories, e.g. the practical assumption `K_v <= 1/T_act`.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.t_act > T::zero() && self.k_v * self.t_act > T::one() {
            out.push(format!(
                "K_v = {} exceeds 1/T_act = {}; the synchronized-delay bound assumes K_v <= 1/T_act",
                self.k_v,
                T::one() / self.t_act
            ));
        }
        out
    }

    /// Effective `T_act*K_v` factor of the allocation: 1 for the
    /// conventional law, `T_act*K_v` for the modified law.
    pub fn kvt(&self) -> T {
        match self.law {
            ControlLaw::Conventional => T::one(),
            ControlLaw::Modified => self.t_act * self.k_v,
        }
    }

    /// `K_p + s*F(s)` as a rational: `(K_p + (1 + K_p*T_diff)*s) / (T_diff*s + 1)`.
    pub fn error_plus_derivative(&self) -> Rational<T> {
        let num = Polynomial::linear(self.k_p, T::one() + self.k_p * self.t_diff);
        let den = Polynomial::linear(T::one(), self.t_diff);
        Rational::new(num, den).expect("denominator nonzero")
    }
}

/// The four hardware blocks as expression trees.
#[derive(Debug, Clone)]
pub struct LoopBlocks<T> {
    /// Actuator `Ga(s) = exp(-tau_a s) / (T_act s + 1)`.
    pub ga: TfExpr<T>,
    /// Sensor `H(s) = exp(-tau_s s) / (T_sensor s + 1)`.
    pub h: TfExpr<T>,
    /// Derivative low-pass `F(s) = 1 / (T_diff s + 1)`.
    pub f: TfExpr<T>,
    /// Actuator measurement path `Gam(s) = exp(-tau_am s)` times the
    /// compensated lags selected by the config flags.
    pub gam: TfExpr<T>,
}

fn first_order_lag<T: Scalar>(t: T) -> TfExpr<T> {
    if t == T::zero() {
        TfExpr::one()
    } else {
        TfExpr::atom(
            Rational::new(Polynomial::one(), Polynomial::linear(T::one(), t))
                .expect("denominator nonzero"),
        )
    }
}

fn delayed_lag<T: Scalar>(tau: T, t: T) -> Result<TfExpr<T>> {
    let lag = first_order_lag(t);
    if tau == T::zero() {
        Ok(lag)
    } else {
        Ok(TfExpr::delay(tau)?.times(lag))
    }
}

/// Build the hardware blocks for a configuration.
pub fn block_tfs<T: Scalar>(cfg: &LoopConfig<T>) -> Result<LoopBlocks<T>> {
    cfg.validate()?;
    let ga = delayed_lag(cfg.tau_a, cfg.t_act)?;
    let h = delayed_lag(cfg.tau_s, cfg.t_sensor)?;
    let f = first_order_lag(cfg.t_diff);
    let mut gam = if cfg.tau_am == T::zero() {
        TfExpr::one()
    } else {
        TfExpr::delay(cfg.tau_am)?
    };
    if cfg.comp_filter && cfg.t_diff > T::zero() {
        gam = gam.times(first_order_lag(cfg.t_diff));
    }
    if cfg.comp_sensor && cfg.t_sensor > T::zero() {
        gam = gam.times(first_order_lag(cfg.t_sensor));
    }
    Ok(LoopBlocks { ga, h, f, gam })
}

/// 1-cos discrete gust specification. Distances are converted to time using
/// the airspeed (`x = V * (t - start_time)`).
#[derive(Debug, Clone, PartialEq)]
pub struct GustSpec<T> {
    /// Horizontal gradient distance (m).
    pub d_x: T,
    /// Vertical gradient distance (m).
    pub d_z: T,
    /// Peak horizontal gust (m/s).
    pub u_m: T,
    /// Peak vertical gust (m/s).
    pub w_m: T,
    /// Airspeed (m/s).
    pub airspeed: T,
    /// Gust onset time (s).
    pub start_time: T,
}

impl<T: Scalar> GustSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.d_x > T::zero() && self.d_z > T::zero()) {
            return Err(Error::InvalidParameter("gust gradient distances must be > 0".into()));
        }
        if !(self.airspeed > T::zero()) {
            return Err(Error::InvalidParameter("airspeed must be > 0".into()));
        }
        if self.u_m < T::zero() || self.w_m < T::zero() {
            return Err(Error::InvalidParameter("gust peak velocities must be >= 0".into()));
        }
        Ok(())
    }
}

/// `(u_g, w_g)` at time `t`. Each component follows
/// `v_m/2 * (1 - cos(pi x / d))` on `0 <= x <= d` and is zero outside.
pub fn gust_profile<T: Scalar>(t: T, g: &GustSpec<T>) -> (T, T) {
    let x = g.airspeed * (t - g.start_time);
    let half = T::of(0.5);
    let shape = |d: T, peak: T| {
        if x < T::zero() || x > d {
            T::zero()
        } else {
            peak * half * (T::one() - (T::PI() * x / d).cos())
        }
    };
    (shape(g.d_x, g.u_m), shape(g.d_z, g.w_m))
}

/// Two-way square wave: `+amplitude` on `[0, interval)`, `-amplitude` on
/// `[interval, 2*interval)`, and so on.
pub fn command_square<T: Scalar>(t: T, amplitude: T, interval: T) -> T {
    if t < T::zero() {
        return T::zero();
    }
    let cycles = (t / interval).floor().to_f64().unwrap_or(0.0) as i64;
    if cycles % 2 == 0 {
        amplitude
    } else {
        -amplitude
    }
}

/// Additive measurement-noise specification. The variance is per sample in
/// the sensed output's units squared.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec<T> {
    pub variance: T,
    pub seed: u64,
    /// Sample rate in Hz; a sample is held between draws. Defaults to the
    /// simulation rate when built from a scenario.
    pub sample_rate: T,
}

impl<T: Scalar> NoiseSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if self.variance < T::zero() {
            return Err(Error::InvalidParameter("noise variance must be >= 0".into()));
        }
        if !(self.sample_rate > T::zero()) {
            return Err(Error::InvalidParameter("noise sample rate must be > 0".into()));
        }
        Ok(())
    }
}

/// White measurement noise, seeded and bit-reproducible. Samples are
/// standard normal draws scaled by `sqrt(variance)`, so two generators with
/// the same seed and different variances produce proportional sequences.
#[derive(Debug, Clone)]
pub struct NoiseGenerator<T> {
    rng: ChaCha8Rng,
    sigma: T,
}

impl<T: Scalar> NoiseGenerator<T> {
    pub fn new(variance: T, seed: u64) -> Result<Self> {
        if variance < T::zero() {
            return Err(Error::InvalidParameter("noise variance must be >= 0".into()));
        }
        Ok(NoiseGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            sigma: variance.sqrt(),
        })
    }

    pub fn next_sample(&mut self) -> T {
        // Draw in f64 so the underlying stream is scalar-type independent.
        let z: f64 = StandardNormal.sample(&mut self.rng);
        self.sigma * T::of(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn roll_plant_tf() {
        let m = make_roll(-2.0f64, 10.0).unwrap();
        assert_eq!(m.cb(), 10.0);
        let tf = m.tf();
        // L_da / (s - L_p)
        assert_eq!(tf.num().coeffs(), &[10.0]);
        assert_eq!(tf.den().coeffs(), &[2.0, 1.0]);
        // DC gain L_da / (-L_p) = 5
        assert_relative_eq!(tf.eval_jw(0.0).unwrap().re, 5.0, epsilon = 1e-14);
        // pole at s = L_p
        assert_relative_eq!(m.char_poly().eval_real(-2.0), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn short_period_cb_is_m_eta() {
        let m = make_short_period(-1.2f64, -0.1, -8.0, -1.5, -12.0).unwrap();
        assert_eq!(m.cb(), -12.0);
        assert_eq!(m.n, 2);
    }

    #[test]
    fn short_period_char_poly_matches_closed_form() {
        let (za, ze, ma, mq, me) = (-1.2f64, -0.1, -8.0, -1.5, -12.0);
        let m = make_short_period(za, ze, ma, mq, me).unwrap();
        // det(sI - A) = s^2 - (Z_alpha + M_q) s + (Z_alpha M_q - M_alpha)
        let p = m.char_poly();
        assert_relative_eq!(p.coeffs()[2], 1.0, epsilon = 1e-14);
        assert_relative_eq!(p.coeffs()[1], -(za + mq), epsilon = 1e-14);
        assert_relative_eq!(p.coeffs()[0], za * mq - ma, epsilon = 1e-14);
        // numerator = M_eta s + (M_alpha Z_eta - Z_alpha M_eta)
        let num = m.numerator();
        assert_relative_eq!(num.coeffs()[1], me, epsilon = 1e-14);
        assert_relative_eq!(num.coeffs()[0], ma * ze - za * me, epsilon = 1e-14);
    }

    #[test]
    fn rejects_zero_effectiveness() {
        assert!(make_roll(-2.0f64, 0.0).is_err());
        assert!(make_short_period(-1.2f64, -0.1, -8.0, -1.5, 0.0).is_err());
    }

    #[test]
    fn gust_profile_shape() {
        let g = GustSpec {
            d_x: 120.0f64,
            d_z: 80.0,
            u_m: 3.5,
            w_m: 3.0,
            airspeed: 40.0,
            start_time: 0.0,
        };
        // x = d_x/2 at t = 1.5 s: u_g = u_m/2
        let (u, _) = gust_profile(1.5, &g);
        assert_relative_eq!(u, 1.75, epsilon = 1e-12);
        // x = d_x at t = 3 s: u_g = u_m
        let (u, _) = gust_profile(3.0, &g);
        assert_relative_eq!(u, 3.5, epsilon = 1e-12);
        // before onset and past the gradient distance: zero
        let g2 = GustSpec { start_time: 1.0, ..g };
        assert_eq!(gust_profile(0.5, &g2), (0.0, 0.0));
        assert_eq!(gust_profile(100.0, &g2), (0.0, 0.0));
    }

    #[test]
    fn square_wave_alternates() {
        assert_eq!(command_square(1.0f64, 10.0, 3.0), 10.0);
        assert_eq!(command_square(4.0f64, 10.0, 3.0), -10.0);
        assert_eq!(command_square(7.0f64, 10.0, 3.0), 10.0);
    }

    #[test]
    fn noise_reproducible() {
        let mut a = NoiseGenerator::<f64>::new(4e-7, 99).unwrap();
        let mut b = NoiseGenerator::<f64>::new(4e-7, 99).unwrap();
        for _ in 0..64 {
            assert_eq!(a.next_sample(), b.next_sample());
        }
    }

    #[test]
    fn noise_scales_with_sigma() {
        let mut a = NoiseGenerator::<f64>::new(1.0, 7).unwrap();
        let mut b = NoiseGenerator::<f64>::new(4.0, 7).unwrap();
        for _ in 0..16 {
            let x = a.next_sample();
            let y = b.next_sample();
            assert_relative_eq!(y, 2.0 * x, epsilon = 1e-15);
        }
    }
}
