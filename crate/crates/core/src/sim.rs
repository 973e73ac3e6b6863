//! Fixed-step time-domain simulation of the full block diagram (reference
//! model, hedging, error gain, incremental allocation, actuator with delay,
//! plant, sensor with delay, derivative filter, actuator-measurement path)
//! and the evaluation-metric battery.
//!
//! Integration is explicit fourth-order with transport delays realized as
//! integer-step ring buffers; the step size must divide every delay.
//! Internally everything runs in radians; traces and metrics are reported in
//! degrees.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::blocks::{
    command_square, gust_profile, make_roll, make_short_period, GustSpec, LoopConfig,
    NoiseGenerator, NoiseSpec, PlantKind, PlantModel,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::stability::margins;
use crate::synthesis::open_loop;

const DIVERGENCE_BOUND: f64 = 1e6;

/// Which evaluation scenario a run belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Tracking,
    Disturbance,
    Noise,
    Robustness,
}

/// Command signal driving the reference model.
#[derive(Debug, Clone, PartialEq)]
pub enum CommandSignal<T> {
    Zero,
    /// Two-way square wave (amplitude in deg/s, interval in s).
    Square { amplitude_deg_s: T, interval: T },
    /// Sinusoid (amplitude in deg/s, frequency in rad/s); used for
    /// frequency-domain cross-validation.
    Sine { amplitude_deg_s: T, omega: T },
}

/// One simulation scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SimScenario<T> {
    pub kind: ScenarioKind,
    pub duration: T,
    pub dt: T,
    pub command: CommandSignal<T>,
    pub gust: Option<GustSpec<T>>,
    pub noise: Option<NoiseSpec<T>>,
    pub mc_samples: usize,
    pub mc_seed: u64,
    /// Relative half-widths of the uniform plant-parameter perturbations
    /// drawn by the robustness scenario.
    pub uncertainty: Vec<(PlantParam, T)>,
}

impl<T: Scalar> SimScenario<T> {
    pub fn tracking(amplitude_deg_s: T, interval: T, duration: T, dt: T) -> Self {
        SimScenario {
            kind: ScenarioKind::Tracking,
            duration,
            dt,
            command: CommandSignal::Square { amplitude_deg_s, interval },
            gust: None,
            noise: None,
            mc_samples: 0,
            mc_seed: 0,
            uncertainty: Vec::new(),
        }
    }

    pub fn disturbance(gust: GustSpec<T>, duration: T, dt: T) -> Self {
        SimScenario {
            kind: ScenarioKind::Disturbance,
            duration,
            dt,
            command: CommandSignal::Zero,
            gust: Some(gust),
            noise: None,
            mc_samples: 0,
            mc_seed: 0,
            uncertainty: Vec::new(),
        }
    }

    pub fn noise(spec: NoiseSpec<T>, duration: T, dt: T) -> Self {
        SimScenario {
            kind: ScenarioKind::Noise,
            duration,
            dt,
            command: CommandSignal::Zero,
            gust: None,
            noise: Some(spec),
            mc_samples: 0,
            mc_seed: 0,
            uncertainty: Vec::new(),
        }
    }

    pub fn robustness(
        tracking: &SimScenario<T>,
        mc_samples: usize,
        mc_seed: u64,
        uncertainty: Vec<(PlantParam, T)>,
    ) -> Self {
        SimScenario {
            kind: ScenarioKind::Robustness,
            mc_samples,
            mc_seed,
            uncertainty,
            ..tracking.clone()
        }
    }

    fn validate(&self, cfg: &LoopConfig<T>) -> Result<()> {
        if !(self.dt > T::zero()) {
            return Err(Error::InvalidParameter("dt must be > 0".into()));
        }
        if self.duration < T::of(10.0) * self.dt {
            return Err(Error::InvalidParameter(
                "duration must be at least 10 steps".into(),
            ));
        }
        let tenth = T::of(0.1);
        for (name, tc) in [
            ("t_act", cfg.t_act),
            ("t_sensor", cfg.t_sensor),
            ("t_diff", cfg.t_diff),
        ] {
            if tc > T::zero() && self.dt > tc * tenth {
                return Err(Error::InvalidParameter(format!(
                    "dt must be at most {name}/10 = {}",
                    tc * tenth
                )));
            }
        }
        for (name, tau) in [
            ("tau_a", cfg.tau_a),
            ("tau_s", cfg.tau_s),
            ("tau_am", cfg.tau_am),
        ] {
            delay_steps(tau, self.dt)
                .map_err(|_| Error::Config(format!("dt does not divide {name} = {tau}")))?;
        }
        if cfg.t_act == T::zero() && cfg.tau_a == T::zero() {
            return Err(Error::InvalidParameter(
                "simulation requires actuator dynamics (T_act > 0 or tau_a > 0)".into(),
            ));
        }
        if let Some(g) = &self.gust {
            g.validate()?;
        }
        if let Some(n) = &self.noise {
            n.validate()?;
        }
        Ok(())
    }
}

fn delay_steps<T: Scalar>(tau: T, dt: T) -> Result<usize> {
    let ratio = (tau / dt).to_f64().ok_or(Error::NonFinite("delay step ratio"))?;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(Error::Config(format!(
            "delay is not an integer number of steps (tau/dt = {ratio})"
        )));
    }
    Ok(rounded as usize)
}

/// Recorded time histories, one row per step. Angles are in degrees,
/// deflections in degrees, the hedge signal in deg/s^2.
#[derive(Debug, Clone)]
pub struct SimTrace<T> {
    pub time: Vec<T>,
    /// Reference-model state (deg/s).
    pub r: Vec<T>,
    /// Plant output (deg/s).
    pub y: Vec<T>,
    /// Measured output including noise (deg/s).
    pub y_m: Vec<T>,
    /// Commanded deflection (deg).
    pub u_c: Vec<T>,
    /// Actuator state (deg).
    pub u: Vec<T>,
    /// Actuator-measurement path output (deg).
    pub u_hat: Vec<T>,
    /// Applied hedge signal (deg/s^2); zero when hedging is off.
    pub v_h: Vec<T>,
}

impl<T: Scalar> SimTrace<T> {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }
}

/// Simple integer-step delay line holding the most recent `steps + 1`
/// samples; reads interpolate linearly for the half-step stage times of the
/// integrator.
struct DelayLine<T> {
    buf: Vec<T>,
}

impl<T: Scalar> DelayLine<T> {
    fn new(steps: usize) -> Self {
        DelayLine { buf: vec![T::zero(); steps + 1] }
    }

    /// Value at `t_now + frac*dt - steps*dt` for `frac` in [0, 1].
    fn read(&self, frac: T) -> T {
        if self.buf.len() == 1 {
            return self.buf[0];
        }
        self.buf[0] * (T::one() - frac) + self.buf[1] * frac
    }

    fn push(&mut self, v: T) {
        self.buf.rotate_left(1);
        let last = self.buf.len() - 1;
        self.buf[last] = v;
    }
}

/// State-vector layout; indices are fixed at construction.
struct Layout {
    n_plant: usize,
    r: usize,
    u_act: Option<usize>,
    x_sensor: Option<usize>,
    x_filter: Option<usize>,
    x_gam_filter: Option<usize>,
    x_gam_sensor: Option<usize>,
    len: usize,
}

impl Layout {
    fn new<T: Scalar>(cfg: &LoopConfig<T>, n_plant: usize) -> Self {
        let mut next = n_plant;
        let r = next;
        next += 1;
        let mut take = |cond: bool| {
            if cond {
                let i = next;
                next += 1;
                Some(i)
            } else {
                None
            }
        };
        let u_act = take(cfg.t_act > T::zero());
        let x_sensor = take(cfg.t_sensor > T::zero());
        let x_filter = take(cfg.t_diff > T::zero());
        let x_gam_filter = take(cfg.comp_filter && cfg.t_diff > T::zero());
        let x_gam_sensor = take(cfg.comp_sensor && cfg.t_sensor > T::zero());
        Layout {
            n_plant,
            r,
            u_act,
            x_sensor,
            x_filter,
            x_gam_filter,
            x_gam_sensor,
            len: next,
        }
    }
}

struct StepOutputs<T> {
    y: T,
    y_m: T,
    u_c: T,
    u_act: T,
    u_hat: T,
    v_h_applied: T,
}

struct Simulator<'a, T> {
    cfg: &'a LoopConfig<T>,
    plant: &'a PlantModel<T>,
    layout: Layout,
    act_line: Option<DelayLine<T>>,
    sens_line: Option<DelayLine<T>>,
    sensd_line: Option<DelayLine<T>>,
    gam_line: Option<DelayLine<T>>,
}

impl<'a, T: Scalar> Simulator<'a, T> {
    fn new(cfg: &'a LoopConfig<T>, plant: &'a PlantModel<T>, dt: T) -> Result<Self> {
        let layout = Layout::new(cfg, plant.n);
        let line = |tau: T| -> Result<Option<DelayLine<T>>> {
            let steps = delay_steps(tau, dt)?;
            Ok(if steps == 0 { None } else { Some(DelayLine::new(steps)) })
        };
        Ok(Simulator {
            cfg,
            plant,
            layout,
            act_line: line(cfg.tau_a)?,
            sens_line: line(cfg.tau_s)?,
            sensd_line: line(cfg.tau_s)?,
            gam_line: line(cfg.tau_am)?,
        })
    }

    /// Block-diagram algebra and state derivatives at one integrator stage.
    /// `frac` selects where delayed signals are read inside the step.
    fn rhs(
        &self,
        state: &[T],
        command: T,
        alpha_g: T,
        noise: T,
        frac: T,
    ) -> (Vec<T>, StepOutputs<T>) {
        let cfg = self.cfg;
        let lay = &self.layout;
        let n = lay.n_plant;

        // Plant output.
        let y = dot(&self.plant.c, &state[..n]);

        // Plant input: delayed actuator state.
        let u_act = lay.u_act.map(|i| state[i]).unwrap_or(T::zero());
        let u_p = match (&self.act_line, lay.u_act) {
            (Some(line), _) => line.read(frac),
            (None, Some(i)) => state[i],
            (None, None) => unreachable!("validated: T_act > 0 or tau_a > 0"),
        };

        // Plant derivative (gust enters as an angle-of-attack equivalent).
        let mut x_dot = vec![T::zero(); n];
        for i in 0..n {
            let mut acc = dot(&self.plant.a[i], &state[..n]) + self.plant.b[i] * u_p;
            if let Some(map) = &self.plant.gust_map {
                acc = acc + map[i] * alpha_g;
            }
            x_dot[i] = acc;
        }
        let y_dot = dot(&self.plant.c, &x_dot);

        // Sensor lag.
        let (s_out, s_dot) = match lay.x_sensor {
            Some(i) => {
                let xs = state[i];
                ((xs), (y - xs) / cfg.t_sensor)
            }
            None => (y, y_dot),
        };

        // Sensor transport delay, then additive noise.
        let y_m_clean = match &self.sens_line {
            Some(line) => line.read(frac),
            None => s_out,
        };
        let y_m_dot = match &self.sensd_line {
            Some(line) => line.read(frac),
            None => s_dot,
        };
        let y_m = y_m_clean + noise;

        // Output-derivative estimate: through the filter when present,
        // otherwise the clean delayed derivative (white noise cannot be
        // differentiated).
        let v_a_hat = match lay.x_filter {
            Some(i) => (y_m - state[i]) / cfg.t_diff,
            None => y_m_dot,
        };

        // Actuator measurement path: compensated lags plus delay.
        let g1 = match lay.x_gam_filter {
            Some(i) => state[i],
            None => u_p,
        };
        let g2 = match lay.x_gam_sensor {
            Some(i) => state[i],
            None => g1,
        };
        let u_hat = match &self.gam_line {
            Some(line) => line.read(frac),
            None => g2,
        };

        // Incremental control law.
        let r = state[lay.r];
        let v_r = cfg.k_r * (command - r);
        let v_c = v_r + cfg.k_p * (r - y_m);
        let delta_u_c = cfg.kvt() / cfg.b_hat * (v_c - v_a_hat);
        let u_c = u_hat + delta_u_c;
        let v_h = cfg.b_hat * delta_u_c;
        let v_h_applied = if cfg.pch { v_h } else { T::zero() };

        // Derivatives.
        let mut ds = vec![T::zero(); lay.len];
        ds[..n].copy_from_slice(&x_dot);
        ds[lay.r] = v_r - v_h_applied;
        if let Some(i) = lay.u_act {
            ds[i] = (u_c - state[i]) / cfg.t_act;
        }
        if let Some(i) = lay.x_sensor {
            ds[i] = (y - state[i]) / cfg.t_sensor;
        }
        if let Some(i) = lay.x_filter {
            ds[i] = (y_m - state[i]) / cfg.t_diff;
        }
        if let Some(i) = lay.x_gam_filter {
            ds[i] = (u_p - state[i]) / cfg.t_diff;
        }
        if let Some(i) = lay.x_gam_sensor {
            ds[i] = (g1 - state[i]) / cfg.t_sensor;
        }

        let u_act_out = if lay.u_act.is_some() { u_act } else { u_c };
        (
            ds,
            StepOutputs {
                y,
                y_m,
                u_c,
                u_act: u_act_out,
                u_hat,
                v_h_applied,
            },
        )
    }

    /// Values fed into the delay lines after the state advanced to `t_new`.
    /// Every new sample is computed against the pre-push buffer contents
    /// before anything is pushed.
    fn push_lines(&mut self, state: &[T], command: T, alpha_g: T, noise: T) {
        let (_, out) = self.rhs(state, command, alpha_g, noise, T::one());
        let n = self.layout.n_plant;
        let y = out.y;

        let act_sample = match self.layout.u_act {
            Some(i) => state[i],
            None => out.u_c,
        };
        // Plant input at the new time, read from the not-yet-pushed line.
        let u_p_new = match &self.act_line {
            Some(line) => line.read(T::one()),
            None => act_sample,
        };

        let sensor_samples = if self.sens_line.is_some() || self.sensd_line.is_some() {
            Some(match self.layout.x_sensor {
                Some(i) => (state[i], (y - state[i]) / self.cfg.t_sensor),
                None => {
                    // Clean output derivative at the new state.
                    let mut y_dot = T::zero();
                    for i in 0..n {
                        let mut acc =
                            dot(&self.plant.a[i], &state[..n]) + self.plant.b[i] * u_p_new;
                        if let Some(map) = &self.plant.gust_map {
                            acc = acc + map[i] * alpha_g;
                        }
                        y_dot = y_dot + self.plant.c[i] * acc;
                    }
                    (y, y_dot)
                }
            })
        } else {
            None
        };

        let gam_sample = if self.gam_line.is_some() {
            let g1 = match self.layout.x_gam_filter {
                Some(i) => state[i],
                None => u_p_new,
            };
            Some(match self.layout.x_gam_sensor {
                Some(i) => state[i],
                None => g1,
            })
        } else {
            None
        };

        if let Some(line) = self.act_line.as_mut() {
            line.push(act_sample);
        }
        if let Some((s_out, s_dot)) = sensor_samples {
            if let Some(line) = self.sens_line.as_mut() {
                line.push(s_out);
            }
            if let Some(line) = self.sensd_line.as_mut() {
                line.push(s_dot);
            }
        }
        if let (Some(line), Some(sample)) = (self.gam_line.as_mut(), gam_sample) {
            line.push(sample);
        }
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

fn deg_to_rad<T: Scalar>(x: T) -> T {
    x * T::PI() / T::of(180.0)
}

fn rad_to_deg<T: Scalar>(x: T) -> T {
    x * T::of(180.0) / T::PI()
}

/// Run one scenario and return the recorded trace.
pub fn simulate<T: Scalar>(
    cfg: &LoopConfig<T>,
    plant: &PlantModel<T>,
    sc: &SimScenario<T>,
) -> Result<SimTrace<T>> {
    cfg.validate()?;
    sc.validate(cfg)?;
    let dt = sc.dt;
    let steps = (sc.duration / dt)
        .round()
        .to_f64()
        .ok_or(Error::NonFinite("step count"))? as usize;

    let command_at = |t: T| -> T {
        match &sc.command {
            CommandSignal::Zero => T::zero(),
            CommandSignal::Square { amplitude_deg_s, interval } => {
                deg_to_rad(command_square(t, *amplitude_deg_s, *interval))
            }
            CommandSignal::Sine { amplitude_deg_s, omega } => {
                deg_to_rad(*amplitude_deg_s) * (*omega * t).sin()
            }
        }
    };
    let alpha_g_at = |t: T| -> T {
        match &sc.gust {
            Some(g) => {
                let (_u_g, w_g) = gust_profile(t, g);
                // Vertical gust as an equivalent angle-of-attack change; the
                // horizontal component mainly changes airspeed and is only
                // logged by callers that care.
                w_g / g.airspeed
            }
            None => T::zero(),
        }
    };

    // Pre-drawn per-step noise samples, held between draws.
    let noise_samples: Option<Vec<T>> = match &sc.noise {
        Some(spec) => {
            spec.validate()?;
            let mut gen = NoiseGenerator::new(spec.variance, spec.seed)?;
            let hold = (T::one() / (spec.sample_rate * dt))
                .round()
                .to_f64()
                .unwrap_or(1.0)
                .max(1.0) as usize;
            let mut out = Vec::with_capacity(steps + 2);
            let mut current = T::zero();
            for k in 0..=steps + 1 {
                if k % hold == 0 {
                    current = gen.next_sample();
                }
                out.push(current);
            }
            Some(out)
        }
        None => None,
    };
    let noise_at = |k: usize| -> T {
        noise_samples
            .as_ref()
            .map(|v| v[k.min(v.len() - 1)])
            .unwrap_or(T::zero())
    };

    let mut simln = Simulator::new(cfg, plant, dt)?;
    let mut state = vec![T::zero(); simln.layout.len];
    let mut trace = SimTrace {
        time: Vec::with_capacity(steps + 1),
        r: Vec::with_capacity(steps + 1),
        y: Vec::with_capacity(steps + 1),
        y_m: Vec::with_capacity(steps + 1),
        u_c: Vec::with_capacity(steps + 1),
        u: Vec::with_capacity(steps + 1),
        u_hat: Vec::with_capacity(steps + 1),
        v_h: Vec::with_capacity(steps + 1),
    };

    let half = T::of(0.5);
    let sixth = T::of(1.0 / 6.0);
    let two = T::of(2.0);
    let bound = T::of(DIVERGENCE_BOUND);

    for k in 0..=steps {
        let t = dt * T::of(k as f64);
        let nk = noise_at(k);
        let (k1, out) = simln.rhs(&state, command_at(t), alpha_g_at(t), nk, T::zero());

        trace.time.push(t);
        trace.r.push(rad_to_deg(state[simln.layout.r]));
        trace.y.push(rad_to_deg(out.y));
        trace.y_m.push(rad_to_deg(out.y_m));
        trace.u_c.push(rad_to_deg(out.u_c));
        trace.u.push(rad_to_deg(out.u_act));
        trace.u_hat.push(rad_to_deg(out.u_hat));
        trace.v_h.push(rad_to_deg(out.v_h_applied));

        if !out.y.is_finite() || out.y.abs() > bound {
            return Err(Error::Divergence {
                time: t.to_f64().unwrap_or(f64::NAN),
            });
        }
        if k == steps {
            break;
        }

        let th = t + dt * half;
        let tn = t + dt;
        let ch = command_at(th);
        let cn = command_at(tn);
        let ah = alpha_g_at(th);
        let an = alpha_g_at(tn);

        let s2: Vec<T> = state
            .iter()
            .zip(&k1)
            .map(|(&s, &d)| s + d * dt * half)
            .collect();
        let (k2, _) = simln.rhs(&s2, ch, ah, nk, half);
        let s3: Vec<T> = state
            .iter()
            .zip(&k2)
            .map(|(&s, &d)| s + d * dt * half)
            .collect();
        let (k3, _) = simln.rhs(&s3, ch, ah, nk, half);
        let s4: Vec<T> = state
            .iter()
            .zip(&k3)
            .map(|(&s, &d)| s + d * dt)
            .collect();
        let (k4, _) = simln.rhs(&s4, cn, an, nk, T::one());

        for i in 0..state.len() {
            state[i] = state[i]
                + dt * sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]);
        }
        // The new sample at t + dt opens the next noise-hold interval.
        simln.push_lines(&state, cn, an, noise_at(k + 1));
    }

    Ok(trace)
}

/// Root mean square of a series.
pub fn rms<T: Scalar>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::zero();
    }
    let sum = xs.iter().fold(T::zero(), |acc, &x| acc + x * x);
    (sum / T::of(xs.len() as f64)).sqrt()
}

fn rms_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    let n = a.len().min(b.len());
    if n == 0 {
        return T::zero();
    }
    let sum = (0..n).fold(T::zero(), |acc, i| {
        let d = a[i] - b[i];
        acc + d * d
    });
    (sum / T::of(n as f64)).sqrt()
}

fn tracking_error<T: Scalar>(trace: &SimTrace<T>) -> Vec<T> {
    trace
        .r
        .iter()
        .zip(&trace.y_m)
        .map(|(&r, &ym)| r - ym)
        .collect()
}

/// Named plant parameters the robustness scenario may perturb.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlantParam {
    ZAlpha,
    ZEta,
    MAlpha,
    MQ,
    MEta,
    LP,
    LDa,
}

impl PlantParam {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "z_alpha" => Some(PlantParam::ZAlpha),
            "z_eta" => Some(PlantParam::ZEta),
            "m_alpha" => Some(PlantParam::MAlpha),
            "m_q" => Some(PlantParam::MQ),
            "m_eta" => Some(PlantParam::MEta),
            "l_p" => Some(PlantParam::LP),
            "l_da" => Some(PlantParam::LDa),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PlantParam::ZAlpha => "z_alpha",
            PlantParam::ZEta => "z_eta",
            PlantParam::MAlpha => "m_alpha",
            PlantParam::MQ => "m_q",
            PlantParam::MEta => "m_eta",
            PlantParam::LP => "l_p",
            PlantParam::LDa => "l_da",
        }
    }
}

fn perturbed_plant<T: Scalar>(
    base: &PlantModel<T>,
    perturbations: &[(PlantParam, T)],
) -> Result<PlantModel<T>> {
    match base.kind.clone() {
        PlantKind::Roll { mut l_p, mut l_da } => {
            for (param, factor) in perturbations {
                match param {
                    PlantParam::LP => l_p = l_p * *factor,
                    PlantParam::LDa => l_da = l_da * *factor,
                    other => {
                        return Err(Error::InvalidParameter(format!(
                            "parameter {} does not exist on the roll plant",
                            other.name()
                        )))
                    }
                }
            }
            make_roll(l_p, l_da)
        }
        PlantKind::ShortPeriod {
            mut z_alpha,
            mut z_eta,
            mut m_alpha,
            mut m_q,
            mut m_eta,
        } => {
            for (param, factor) in perturbations {
                match param {
                    PlantParam::ZAlpha => z_alpha = z_alpha * *factor,
                    PlantParam::ZEta => z_eta = z_eta * *factor,
                    PlantParam::MAlpha => m_alpha = m_alpha * *factor,
                    PlantParam::MQ => m_q = m_q * *factor,
                    PlantParam::MEta => m_eta = m_eta * *factor,
                    other => {
                        return Err(Error::InvalidParameter(format!(
                            "parameter {} does not exist on the short-period plant",
                            other.name()
                        )))
                    }
                }
            }
            make_short_period(z_alpha, z_eta, m_alpha, m_q, m_eta)
        }
        PlantKind::Generic => Err(Error::InvalidParameter(
            "robustness sampling needs a named plant parameterization".into(),
        )),
    }
}

/// Monte-Carlo robustness result.
#[derive(Debug, Clone)]
pub struct McResult<T> {
    /// Population standard deviation of the per-sample RMS tracking errors.
    pub sigma: T,
    /// RMS tracking error per included sample (deg/s).
    pub samples: Vec<T>,
    /// Samples excluded because their run diverged.
    pub excluded: usize,
}

/// Repeated tracking runs over plants drawn by perturbing each listed
/// stability derivative with an independent uniform relative perturbation.
/// The controller keeps the nominal configuration (that is the model
/// mismatch under test). Sample `i` uses the scenario RNG seed with stream
/// `i`, so results are reproducible and order-independent.
pub fn robustness_mc<T: Scalar>(
    cfg: &LoopConfig<T>,
    plant: &PlantModel<T>,
    sc: &SimScenario<T>,
) -> Result<McResult<T>> {
    if sc.mc_samples < 2 {
        return Err(Error::InvalidParameter(
            "robustness needs at least 2 Monte-Carlo samples".into(),
        ));
    }
    let tracking = SimScenario {
        kind: ScenarioKind::Tracking,
        mc_samples: 0,
        mc_seed: 0,
        uncertainty: Vec::new(),
        ..sc.clone()
    };
    let mut samples = Vec::with_capacity(sc.mc_samples);
    let mut excluded = 0usize;
    for i in 0..sc.mc_samples {
        let mut rng = ChaCha8Rng::seed_from_u64(sc.mc_seed);
        rng.set_stream(i as u64);
        let perturbations: Vec<(PlantParam, T)> = sc
            .uncertainty
            .iter()
            .map(|&(param, half_width)| {
                let u: f64 = rng.random();
                let factor = T::one() + half_width * T::of(2.0 * u - 1.0);
                (param, factor)
            })
            .collect();
        let sample_plant = perturbed_plant(plant, &perturbations)?;
        match simulate(cfg, &sample_plant, &tracking) {
            Ok(trace) => samples.push(rms(&tracking_error(&trace))),
            Err(Error::Divergence { .. }) => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    if samples.is_empty() {
        return Err(Error::Divergence { time: 0.0 });
    }
    let n = T::of(samples.len() as f64);
    let mean = samples.iter().fold(T::zero(), |a, &x| a + x) / n;
    let var = samples
        .iter()
        .fold(T::zero(), |a, &x| a + (x - mean) * (x - mean))
        / n;
    Ok(McResult {
        sigma: var.sqrt(),
        samples,
        excluded,
    })
}

/// The four evaluation scenarios; absent entries leave their metrics unset.
#[derive(Debug, Clone)]
pub struct ScenarioBattery<T> {
    pub tracking: Option<SimScenario<T>>,
    pub disturbance: Option<SimScenario<T>>,
    pub noise: Option<SimScenario<T>>,
    pub robustness: Option<SimScenario<T>>,
    /// Frequency band for the margin search.
    pub margin_band: (T, T),
}

/// The evaluation-metric set: stability margins plus RMS metrics from the
/// tracking, disturbance, noise and robustness scenarios. Metrics whose
/// scenario diverged (or was not run) are NaN and the divergent scenarios
/// are listed by name.
#[derive(Debug, Clone)]
pub struct MetricsReport<T> {
    pub gm_db: T,
    pub pm_deg: T,
    pub tdm_s: T,
    /// RMS tracking error (deg/s).
    pub rms_er: T,
    /// RMS input while tracking (deg).
    pub rms_ur: T,
    /// RMS error due to the gust disturbance (deg/s).
    pub rms_ed: T,
    /// RMS input due to the gust disturbance (deg).
    pub rms_ud: T,
    /// RMS error due to measurement noise (deg/s), baseline-subtracted.
    pub rms_en: T,
    /// RMS input due to measurement noise (deg), baseline-subtracted.
    pub rms_un: T,
    /// Standard deviation of RMS tracking error over the Monte-Carlo set.
    pub sigma_rms_er: T,
    pub divergent: Vec<String>,
    pub mc_excluded: usize,
}

impl<T: Scalar> MetricsReport<T> {
    pub fn any_divergent(&self) -> bool {
        !self.divergent.is_empty()
    }
}

/// Run the scenario battery plus the margin search for one configuration.
pub fn run_metrics<T: Scalar>(
    cfg: &LoopConfig<T>,
    plant: &PlantModel<T>,
    battery: &ScenarioBattery<T>,
) -> Result<MetricsReport<T>> {
    let l_u = open_loop(cfg, plant)?;
    let m = margins(&l_u, battery.margin_band)?;
    let nan = T::nan();
    let mut report = MetricsReport {
        gm_db: m.gain_margin_db(),
        pm_deg: m.phase_margin_deg.unwrap_or(nan),
        tdm_s: m.time_delay_margin.unwrap_or(nan),
        rms_er: nan,
        rms_ur: nan,
        rms_ed: nan,
        rms_ud: nan,
        rms_en: nan,
        rms_un: nan,
        sigma_rms_er: nan,
        divergent: Vec::new(),
        mc_excluded: 0,
    };

    if let Some(sc) = &battery.tracking {
        match simulate(cfg, plant, sc) {
            Ok(trace) => {
                report.rms_er = rms(&tracking_error(&trace));
                report.rms_ur = rms(&trace.u_c);
            }
            Err(Error::Divergence { .. }) => report.divergent.push("tracking".into()),
            Err(e) => return Err(e),
        }
    }
    if let Some(sc) = &battery.disturbance {
        match simulate(cfg, plant, sc) {
            Ok(trace) => {
                report.rms_ed = rms(&tracking_error(&trace));
                report.rms_ud = rms(&trace.u_c);
            }
            Err(Error::Divergence { .. }) => report.divergent.push("disturbance".into()),
            Err(e) => return Err(e),
        }
    }
    if let Some(sc) = &battery.noise {
        let baseline_sc = SimScenario { noise: None, ..sc.clone() };
        let run = simulate(cfg, plant, sc);
        let baseline = simulate(cfg, plant, &baseline_sc);
        match (run, baseline) {
            (Ok(noisy), Ok(clean)) => {
                report.rms_en =
                    rms_diff(&tracking_error(&noisy), &tracking_error(&clean));
                report.rms_un = rms_diff(&noisy.u_c, &clean.u_c);
            }
            (Err(Error::Divergence { .. }), _) | (_, Err(Error::Divergence { .. })) => {
                report.divergent.push("noise".into())
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
    }
    if let Some(sc) = &battery.robustness {
        match robustness_mc(cfg, plant, sc) {
            Ok(mc) => {
                report.sigma_rms_er = mc.sigma;
                report.mc_excluded = mc.excluded;
            }
            Err(Error::Divergence { .. }) => report.divergent.push("robustness".into()),
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}
