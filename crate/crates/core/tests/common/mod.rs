//! Shared helpers for the integration and acceptance suites.
#![allow(dead_code)] // each test binary uses its own subset

use indiloop_core::{LoopConfig, PlantModel, Rational64};
use indiloop_core::{make_roll, make_short_period, ControlLaw};

/// Desk short-period plant. Stand-in derivatives, not from any publication.
pub fn desk_plant() -> PlantModel<f64> {
    make_short_period(-1.2, -0.1, -8.0, -1.5, -12.0).unwrap()
}

/// Desk loop configuration matching the shipped default config file.
pub fn desk_cfg() -> LoopConfig<f64> {
    LoopConfig {
        k_p: 8.0,
        k_v: 50.0,
        k_r: 4.0,
        t_act: 0.02,
        tau_a: 0.005,
        t_sensor: 0.01,
        tau_s: 0.005,
        t_diff: 1.0 / 30.0,
        tau_am: 0.0,
        b_hat: -12.0,
        law: ControlLaw::Modified,
        pch: false,
        comp_filter: true,
        comp_sensor: true,
    }
}

/// Ideal-case configuration (unity sensor/filter/measurement dynamics).
pub fn ideal_cfg(k_p: f64, k_v: f64, t_act: f64, b_hat: f64) -> LoopConfig<f64> {
    LoopConfig {
        k_p,
        k_v,
        k_r: 4.0,
        t_act,
        tau_a: 0.0,
        t_sensor: 0.0,
        tau_s: 0.0,
        t_diff: 0.0,
        tau_am: 0.0,
        b_hat,
        law: ControlLaw::Modified,
        pch: false,
        comp_filter: false,
        comp_sensor: false,
    }
}

/// Roll plant used by the synchronized-delay studies.
pub fn roll_plant(l_p: f64, l_da: f64) -> PlantModel<f64> {
    make_roll(l_p, l_da).unwrap()
}

/// Unit-step response of a strictly proper rational transfer function,
/// integrated from its controllable canonical state-space realization with a
/// classic fixed-step fourth-order scheme. This is the oracle route used to
/// cross-validate the block-diagram simulator: it never touches the
/// simulator's wiring.
pub fn tf_step_response(tf: &Rational64, dt: f64, steps: usize) -> Vec<f64> {
    let den = tf.den().coeffs();
    let num = tf.num().coeffs();
    let n = den.len() - 1;
    assert!(n >= 1, "step oracle needs a strictly proper system");
    assert!(num.len() <= n, "step oracle needs a strictly proper system");
    let lead = den[n];
    let a_row: Vec<f64> = den[..n].iter().map(|c| -c / lead).collect();
    let b_out: Vec<f64> = (0..n)
        .map(|i| num.get(i).copied().unwrap_or(0.0) / lead)
        .collect();

    let deriv = |x: &[f64]| -> Vec<f64> {
        let mut d = vec![0.0; n];
        for i in 0..n - 1 {
            d[i] = x[i + 1];
        }
        d[n - 1] = a_row.iter().zip(x).map(|(a, xi)| a * xi).sum::<f64>() + 1.0;
        d
    };

    let mut x = vec![0.0f64; n];
    let mut out = Vec::with_capacity(steps + 1);
    for _ in 0..=steps {
        out.push(b_out.iter().zip(&x).map(|(b, xi)| b * xi).sum());
        let k1 = deriv(&x);
        let x2: Vec<f64> = x.iter().zip(&k1).map(|(xi, d)| xi + 0.5 * dt * d).collect();
        let k2 = deriv(&x2);
        let x3: Vec<f64> = x.iter().zip(&k2).map(|(xi, d)| xi + 0.5 * dt * d).collect();
        let k3 = deriv(&x3);
        let x4: Vec<f64> = x.iter().zip(&k3).map(|(xi, d)| xi + dt * d).collect();
        let k4 = deriv(&x4);
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    out
}
