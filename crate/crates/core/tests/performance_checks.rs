//! Performance-function checks: the identity suite, the finite-difference
//! sensitivity definition, and the hedging comparisons.

mod common;

use common::{desk_cfg, desk_plant};
use indiloop_core::*;
use num_complex::Complex64;

#[test]
fn identity_suite_both_hedging_states() {
    // S (1 + L_u) = 1, T_yd = P S, T_yn = S - 1 on a 100-point grid.
    let plant = desk_plant();
    for pch in [false, true] {
        let cfg = LoopConfig { pch, ..desk_cfg() };
        let set = performance_set(&cfg, &plant).unwrap();
        let l_u = open_loop(&cfg, &plant).unwrap();
        let p = plant.tf();
        let one = Complex64::new(1.0, 0.0);
        for w in log_space(1e-2, 1e3, 100) {
            let s_v = set.s.eval_exact(w).unwrap();
            let l_v = l_u.eval_exact(w).unwrap();
            assert!(
                (s_v * (one + l_v) - one).norm() < 1e-10,
                "pch={pch} w={w}"
            );
            let p_v = p.eval_jw(w).unwrap();
            let yd = set.t_yd.eval_exact(w).unwrap();
            assert!(
                (yd - p_v * s_v).norm() <= 1e-10 * (1.0 + (p_v * s_v).norm()),
                "pch={pch} w={w}"
            );
            let yn = set.t_yn.eval_exact(w).unwrap();
            assert!((yn - (s_v - one)).norm() < 1e-10, "pch={pch} w={w}");
        }
    }
}

#[test]
fn complementary_magnitude_inequality() {
    // T_yn = -L/(1+L) and S - T_yn = 1, so |T_yn| + |S| >= 1 pointwise.
    let plant = desk_plant();
    let set = performance_set(&desk_cfg(), &plant).unwrap();
    for w in log_space(1e-2, 1e3, 60) {
        let s_v = set.s.eval_exact(w).unwrap().norm();
        let yn_v = set.t_yn.eval_exact(w).unwrap().norm();
        assert!(s_v + yn_v >= 1.0 - 1e-12, "w = {w}");
    }
}

#[test]
fn tracking_error_vanishes_at_dc() {
    let plant = desk_plant();
    let set = performance_set(&desk_cfg(), &plant).unwrap();
    let v = set.t_ec.eval_exact(1e-6).unwrap();
    assert!(v.norm() < 1e-4, "T_ec(j*1e-6) = {v}");
}

#[test]
fn high_gain_limits() {
    // As the pseudo-control gain grows the sensitivity collapses and the
    // noise transfer approaches unit magnitude.
    let plant = desk_plant();
    let cfg = LoopConfig { k_v: 5000.0, t_act: 0.02, ..desk_cfg() };
    let set = performance_set(&cfg, &plant).unwrap();
    let w = 5.0;
    let s_mag = set.s.eval_exact(w).unwrap().norm();
    let yn_mag = set.t_yn.eval_exact(w).unwrap().norm();
    assert!(s_mag < 0.02, "|S| = {s_mag}");
    assert!((yn_mag - 1.0).abs() < 0.02, "|T_yn| = {yn_mag}");
}

/// Finite-difference sensitivity: perturb the plant multiplicatively,
/// recompute the closed loop with the controller held at its nominal
/// effectiveness estimate, and form ((dT/T)/(dP/P)).
fn sensitivity_fd(cfg: &LoopConfig<f64>, eps: f64, w: f64) -> Complex64 {
    let nominal = desk_plant();
    let scaled = make_short_period(
        -1.2,
        -0.1 * (1.0 + eps),
        -8.0,
        -1.5,
        -12.0 * (1.0 + eps),
    )
    .unwrap();
    let t0 = closed_loop(cfg, &nominal).unwrap().t_yc;
    let t1 = closed_loop(cfg, &scaled).unwrap().t_yc;
    let a = t0.eval_exact(w).unwrap();
    let b = t1.eval_exact(w).unwrap();
    (b / a - Complex64::new(1.0, 0.0)) / eps
}

#[test]
fn sensitivity_matches_finite_difference() {
    let plant = desk_plant();
    let cfg = desk_cfg();
    let set = performance_set(&cfg, &plant).unwrap();
    for w in [1.0, 10.0] {
        let s_v = set.s.eval_exact(w).unwrap();
        let fd = sensitivity_fd(&cfg, 0.01, w);
        assert!(
            (fd - s_v).norm() <= 0.02 * s_v.norm(),
            "w = {w}: fd {fd} vs S {s_v}"
        );
    }
}

#[test]
fn finite_difference_error_is_first_order() {
    // Halving the perturbation halves the error, within 20 percent slack.
    let plant = desk_plant();
    let cfg = desk_cfg();
    let set = performance_set(&cfg, &plant).unwrap();
    let w = 5.0;
    let s_v = set.s.eval_exact(w).unwrap();
    let e_full = (sensitivity_fd(&cfg, 0.02, w) - s_v).norm();
    let e_half = (sensitivity_fd(&cfg, 0.01, w) - s_v).norm();
    let ratio = e_half / e_full;
    assert!(
        (0.5 / 1.2..=0.5 * 1.2).contains(&ratio),
        "error ratio {ratio}"
    );
}

#[test]
fn hedging_comparison_identical_when_gains_match() {
    let plant = desk_plant();
    let cfg = LoopConfig { k_p: 4.0, k_r: 4.0, ..desk_cfg() };
    let omegas = log_space(1e-2, 1e3, 60);
    let rep = pch_performance_delta(&cfg, &plant, &omegas).unwrap();
    for k in 0..omegas.len() {
        assert!((rep.s_on[k] - rep.s_off[k]).abs() <= 1e-12 * (1.0 + rep.s_off[k]));
        assert!((rep.t_yd_on[k] - rep.t_yd_off[k]).abs() <= 1e-12 * (1.0 + rep.t_yd_off[k]));
        assert!((rep.t_yn_on[k] - rep.t_yn_off[k]).abs() <= 1e-12 * (1.0 + rep.t_yn_off[k]));
        assert!((rep.ratio_mag[k] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn hedging_loop_gain_ordering_follows_gain_relation() {
    let plant = desk_plant();
    let omegas = log_space(1e-2, 1e3, 80);

    // K_p = 8 > K_r = 4 with T_act K_v = 1: hedging shrinks the loop gain.
    let rep = pch_performance_delta(&desk_cfg(), &plant, &omegas).unwrap();
    assert!(rep.ratio_below_one);
    assert!(!rep.ratio_above_one);
    assert!(rep.hedged_loop_gain_below);

    // K_p = 2 < K_r = 4: the inequality direction reverses.
    let cfg = LoopConfig { k_p: 2.0, ..desk_cfg() };
    let rep = pch_performance_delta(&cfg, &plant, &omegas).unwrap();
    assert!(rep.ratio_above_one);
    assert!(!rep.ratio_below_one);
    assert!(!rep.hedged_loop_gain_below);
}
