//! Time-domain simulator checks: cross-validation against the rationalized
//! closed loop, scenario metrics, determinism and the delay-synchronization
//! findings.

mod common;

use common::{desk_cfg, desk_plant, roll_plant, tf_step_response};
use indiloop_core::blocks::NoiseSpec;
use indiloop_core::sim::CommandSignal;
use indiloop_core::*;

fn delay_free_cfg() -> LoopConfig<f64> {
    LoopConfig {
        tau_a: 0.0,
        tau_s: 0.0,
        tau_am: 0.0,
        ..desk_cfg()
    }
}

#[test]
fn step_response_matches_rationalized_closed_loop() {
    // Block-diagram simulation vs the state-space realization of the
    // collapsed command-to-output transfer function (independent route).
    let plant = desk_plant();
    let cfg = delay_free_cfg();
    let dt = 1e-4;
    let steps = 30_000;
    let t_yc = closed_loop(&cfg, &plant).unwrap().t_yc.rationalize().unwrap();
    let oracle = tf_step_response(&t_yc, dt, steps);

    // A square wave with a huge interval is a step.
    let sc = SimScenario::tracking(10.0, 1e9, 3.0, dt);
    let trace = simulate(&cfg, &plant, &sc).unwrap();
    let mut max_err = 0.0f64;
    for (k, &y) in trace.y.iter().enumerate() {
        max_err = max_err.max((y - 10.0 * oracle[k]).abs());
    }
    assert!(max_err < 1e-3, "max step error {max_err} deg/s");
}

#[test]
fn sinusoidal_steady_state_matches_frequency_response() {
    // With real transport delays in the loop: settle ten periods, then
    // compare the output amplitude against |T_yc(jw)|.
    let plant = desk_plant();
    let cfg = desk_cfg();
    let t_yc = closed_loop(&cfg, &plant).unwrap().t_yc;
    let dt = 1e-4;
    for omega in [1.0, 5.0, 20.0] {
        let period = 2.0 * std::f64::consts::PI / omega;
        let settle = 10.0 * period;
        let sc = SimScenario {
            kind: ScenarioKind::Tracking,
            duration: settle + period,
            dt,
            command: CommandSignal::Sine { amplitude_deg_s: 5.0, omega },
            gust: None,
            noise: None,
            mc_samples: 0,
            mc_seed: 0,
            uncertainty: vec![],
        };
        let trace = simulate(&cfg, &plant, &sc).unwrap();
        let start = (settle / dt) as usize;
        let peak = trace.y[start..]
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.abs()));
        let expected = 5.0 * t_yc.eval_exact(omega).unwrap().norm();
        assert!(
            (peak - expected).abs() <= 0.01 * expected,
            "omega {omega}: sim {peak} vs |T_yc| route {expected}"
        );
    }
}

#[test]
fn delay_line_timing_is_exact() {
    // With a pure-delay sensor (T_sensor = 0) the measurement is the output
    // shifted by exactly tau_s/dt steps, and with a stateless measurement
    // path the recorded u_hat is the delayed actuator state shifted by
    // exactly (tau_a + tau_am)/dt steps. These pin the ring-buffer timing
    // through both the actuator and measurement reads.
    let plant = desk_plant();
    let dt = 1e-4;
    let cfg = LoopConfig {
        tau_a: 0.004,
        t_sensor: 0.0,
        tau_s: 0.006,
        t_diff: 0.0,
        tau_am: 0.004,
        comp_filter: false,
        comp_sensor: false,
        ..desk_cfg()
    };
    let sc = SimScenario::tracking(10.0, 3.0, 2.0, dt);
    let trace = simulate(&cfg, &plant, &sc).unwrap();

    let m_s = (cfg.tau_s / dt).round() as usize;
    for k in m_s..trace.len() {
        assert!(
            (trace.y_m[k] - trace.y[k - m_s]).abs() < 1e-12,
            "sensor delay misaligned at step {k}"
        );
    }
    let m_am = ((cfg.tau_a + cfg.tau_am) / dt).round() as usize;
    for k in m_am..trace.len() {
        assert!(
            (trace.u_hat[k] - trace.u[k - m_am]).abs() < 1e-12,
            "measurement-path delay misaligned at step {k}"
        );
    }

    // The same configuration must still track the frequency-domain gain.
    let t_yc = closed_loop(&cfg, &plant).unwrap().t_yc;
    let omega = 12.0;
    let period = 2.0 * std::f64::consts::PI / omega;
    let settle = 10.0 * period;
    let sc = SimScenario {
        kind: ScenarioKind::Tracking,
        duration: settle + period,
        dt,
        command: CommandSignal::Sine { amplitude_deg_s: 5.0, omega },
        gust: None,
        noise: None,
        mc_samples: 0,
        mc_seed: 0,
        uncertainty: vec![],
    };
    let tr = simulate(&cfg, &plant, &sc).unwrap();
    let start = (settle / dt) as usize;
    let peak = tr.y[start..].iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let expected = 5.0 * t_yc.eval_exact(omega).unwrap().norm();
    assert!(
        (peak - expected).abs() <= 5e-3 * expected,
        "sim {peak} vs frequency-domain {expected}"
    );
}

#[test]
fn sinusoidal_consistency_across_varied_configurations() {
    // Five distinct stable configurations, three frequencies each: the
    // steady-state output amplitude tracks |T_yc(jw)| within one percent.
    let plant = desk_plant();
    let dt = 2e-4;
    let variants: [LoopConfig<f64>; 5] = [
        desk_cfg(),
        LoopConfig { k_p: 4.0, k_v: 30.0, tau_a: 0.004, tau_s: 0.006, ..desk_cfg() },
        LoopConfig { k_p: 12.0, t_sensor: 0.005, t_diff: 0.02, ..desk_cfg() },
        LoopConfig { pch: true, k_r: 6.0, ..desk_cfg() },
        LoopConfig {
            law: ControlLaw::Conventional,
            k_p: 6.0,
            tau_a: 0.0,
            tau_am: 0.004,
            ..desk_cfg()
        },
    ];
    for (idx, cfg) in variants.iter().enumerate() {
        let l_u = open_loop(cfg, &plant).unwrap();
        let m = margins(&l_u, (1e-3, 1e4)).unwrap();
        assert!(
            m.time_delay_margin.unwrap_or(-1.0) > 0.0,
            "variant {idx} must be stable"
        );
        let t_yc = closed_loop(cfg, &plant).unwrap().t_yc;
        for omega in [1.0, 5.0, 20.0] {
            let period = 2.0 * std::f64::consts::PI / omega;
            let settle = 10.0 * period;
            let sc = SimScenario {
                kind: ScenarioKind::Tracking,
                duration: settle + period,
                dt,
                command: CommandSignal::Sine { amplitude_deg_s: 5.0, omega },
                gust: None,
                noise: None,
                mc_samples: 0,
                mc_seed: 0,
                uncertainty: vec![],
            };
            let trace = simulate(cfg, &plant, &sc).unwrap();
            let start = (settle / dt) as usize;
            let peak = trace.y[start..]
                .iter()
                .fold(0.0f64, |m, &v| m.max(v.abs()));
            let expected = 5.0 * t_yc.eval_exact(omega).unwrap().norm();
            assert!(
                (peak - expected).abs() <= 0.01 * expected,
                "variant {idx}, omega {omega}: {peak} vs {expected}"
            );
        }
    }
}

#[test]
fn ideal_step_settles_at_reference_rate() {
    // Unity sensor/filter/measurement dynamics: output reaches the commanded
    // 10 deg/s within 2 percent by t = 5/K_r.
    let plant = desk_plant();
    let cfg = LoopConfig {
        t_sensor: 0.0,
        t_diff: 0.0,
        comp_filter: false,
        comp_sensor: false,
        ..delay_free_cfg()
    };
    let t_end = 5.0 / cfg.k_r;
    let sc = SimScenario::tracking(10.0, 1e9, t_end + 0.1, 1e-4);
    let trace = simulate(&cfg, &plant, &sc).unwrap();
    let idx = (t_end / 1e-4) as usize;
    assert!((trace.y[idx] - 10.0).abs() <= 0.2, "y = {}", trace.y[idx]);
}

#[test]
fn hedging_is_transparent_when_gains_match() {
    // K_p = K_r: the hedge decouples from the output path, so y and u_c
    // coincide between hedged and unhedged runs.
    let plant = desk_plant();
    let base = LoopConfig {
        k_p: 4.0,
        k_r: 4.0,
        t_sensor: 0.0,
        t_diff: 0.0,
        comp_filter: false,
        comp_sensor: false,
        ..delay_free_cfg()
    };
    let hedged = LoopConfig { pch: true, ..base.clone() };
    let sc = SimScenario::tracking(10.0, 3.0, 6.0, 1e-4);
    let a = simulate(&base, &plant, &sc).unwrap();
    let b = simulate(&hedged, &plant, &sc).unwrap();
    for k in 0..a.len() {
        assert!((a.y[k] - b.y[k]).abs() < 1e-9);
        assert!((a.u_c[k] - b.u_c[k]).abs() < 1e-9);
    }
}

#[test]
fn hedge_signal_bookkeeping() {
    // Recorded hedge equals CB (u_c - u_hat) at every step when the
    // effectiveness estimate matches the plant.
    let plant = desk_plant();
    let cfg = LoopConfig { pch: true, ..desk_cfg() };
    assert_eq!(cfg.b_hat, plant.cb());
    let sc = SimScenario::tracking(10.0, 3.0, 4.0, 1e-4);
    let trace = simulate(&cfg, &plant, &sc).unwrap();
    let cb = plant.cb();
    for k in 0..trace.len() {
        let residual = (trace.v_h[k] - cb * (trace.u_c[k] - trace.u_hat[k])).abs();
        assert!(residual < 1e-12, "step {k}: residual {residual}");
    }
}

#[test]
fn quiescent_battery_metrics_are_zero() {
    let plant = desk_plant();
    let cfg = desk_cfg();
    let dt = 2e-4;
    let still = SimScenario::tracking(0.0, 3.0, 4.0, dt);
    let no_gust = GustSpec {
        d_x: 120.0,
        d_z: 80.0,
        u_m: 0.0,
        w_m: 0.0,
        airspeed: 40.0,
        start_time: 1.0,
    };
    let battery = ScenarioBattery {
        tracking: Some(still.clone()),
        disturbance: Some(SimScenario::disturbance(no_gust, 4.0, dt)),
        noise: Some(SimScenario::noise(
            NoiseSpec { variance: 0.0, seed: 3, sample_rate: 1.0 / dt },
            4.0,
            dt,
        )),
        robustness: None,
        margin_band: (1e-3, 1e4),
    };
    let report = run_metrics(&cfg, &plant, &battery).unwrap();
    for v in [
        report.rms_er,
        report.rms_ur,
        report.rms_ed,
        report.rms_ud,
        report.rms_en,
        report.rms_un,
    ] {
        assert!(v.abs() < 1e-12, "metric {v}");
    }
    assert!(report.divergent.is_empty());
}

#[test]
fn noise_metric_scales_with_sigma() {
    // Same seed, four times the variance: the response doubles exactly by
    // linearity, comfortably inside the 10 percent check.
    let plant = desk_plant();
    let cfg = desk_cfg();
    let dt = 2e-4;
    let run = |variance: f64| {
        let battery = ScenarioBattery {
            tracking: None,
            disturbance: None,
            noise: Some(SimScenario::noise(
                NoiseSpec { variance, seed: 7, sample_rate: 1.0 / dt },
                6.0,
                dt,
            )),
            robustness: None,
            margin_band: (1e-3, 1e4),
        };
        run_metrics(&cfg, &plant, &battery).unwrap().rms_en
    };
    let base = run(4.0e-7);
    let scaled = run(16.0e-7);
    assert!(base > 0.0);
    assert!(((scaled / base) - 2.0).abs() < 0.2, "ratio {}", scaled / base);
}

#[test]
fn deterministic_traces_and_metrics() {
    let plant = desk_plant();
    let cfg = desk_cfg();
    let dt = 2e-4;
    let sc = SimScenario::noise(
        NoiseSpec { variance: 4e-7, seed: 11, sample_rate: 1.0 / dt },
        3.0,
        dt,
    );
    let a = simulate(&cfg, &plant, &sc).unwrap();
    let b = simulate(&cfg, &plant, &sc).unwrap();
    assert_eq!(a.y_m, b.y_m);
    assert_eq!(a.u_c, b.u_c);

    let tracking = SimScenario::tracking(10.0, 3.0, 6.0, dt);
    let mc = SimScenario::robustness(
        &tracking,
        6,
        42,
        vec![(PlantParam::MAlpha, 0.2), (PlantParam::MQ, 0.2), (PlantParam::MEta, 0.2)],
    );
    let r1 = robustness_mc(&cfg, &plant, &mc).unwrap();
    let r2 = robustness_mc(&cfg, &plant, &mc).unwrap();
    assert_eq!(r1.sigma.to_bits(), r2.sigma.to_bits());
    assert_eq!(r1.samples, r2.samples);
}

#[test]
fn robustness_sampling_behaviour() {
    let plant = desk_plant();
    let cfg = desk_cfg();
    let tracking = SimScenario::tracking(10.0, 3.0, 6.0, 2e-4);

    // Zero half-widths: identical samples, zero deviation.
    let mc = SimScenario::robustness(&tracking, 4, 9, vec![(PlantParam::MEta, 0.0)]);
    let r = robustness_mc(&cfg, &plant, &mc).unwrap();
    assert!(r.sigma.abs() < 1e-12);
    assert_eq!(r.excluded, 0);

    // Doubling the half-widths roughly doubles the deviation.
    let narrow = SimScenario::robustness(
        &tracking,
        24,
        42,
        vec![
            (PlantParam::MAlpha, 0.1),
            (PlantParam::MQ, 0.1),
            (PlantParam::MEta, 0.1),
        ],
    );
    let wide = SimScenario::robustness(
        &tracking,
        24,
        42,
        vec![
            (PlantParam::MAlpha, 0.2),
            (PlantParam::MQ, 0.2),
            (PlantParam::MEta, 0.2),
        ],
    );
    let s1 = robustness_mc(&cfg, &plant, &narrow).unwrap().sigma;
    let s2 = robustness_mc(&cfg, &plant, &wide).unwrap().sigma;
    assert!(s1 > 0.0);
    let ratio = s2 / s1;
    assert!((ratio - 2.0).abs() <= 0.6, "sigma ratio {ratio}");
}

#[test]
fn delay_synchronization_rescues_stability() {
    // A gain setting where the sensor delay alone diverges but matching the
    // measurement-path delay to it restores stability.
    let plant = roll_plant(-5.0, 10.0);
    let base = LoopConfig {
        k_p: 15.0,
        k_v: 200.0,
        k_r: 4.0,
        t_act: 0.02,
        tau_a: 0.0,
        t_sensor: 0.0,
        tau_s: 0.01,
        t_diff: 0.0,
        tau_am: 0.0,
        b_hat: 10.0,
        law: ControlLaw::Modified,
        pch: false,
        comp_filter: false,
        comp_sensor: false,
    };
    let sc = SimScenario::tracking(10.0, 3.0, 6.0, 1e-4);
    let unsynchronized = simulate(&base, &plant, &sc);
    assert!(matches!(unsynchronized, Err(Error::Divergence { .. })));

    let synchronized = LoopConfig { tau_am: 0.01, ..base };
    let trace = simulate(&synchronized, &plant, &sc).unwrap();
    assert!(trace.y.iter().all(|y| y.is_finite()));
}

#[test]
fn envelope_decays_after_gust_passes() {
    // Stable loop, zero command: once the gust has left the gradient region
    // the output envelope must decay without numerical ringing.
    let plant = desk_plant();
    let cfg = desk_cfg();
    let gust = GustSpec {
        d_x: 120.0,
        d_z: 80.0,
        u_m: 3.5,
        w_m: 3.0,
        airspeed: 40.0,
        start_time: 1.0,
    };
    let sc = SimScenario::disturbance(gust, 10.0, 1e-4);
    let trace = simulate(&cfg, &plant, &sc).unwrap();
    // Gust is gone by t = 1 + 80/40 = 3 s.
    let start = (3.5 / 1e-4) as usize;
    let window = (0.5 / 1e-4) as usize;
    let mut prev = f64::INFINITY;
    let mut idx = start;
    while idx + window <= trace.len() {
        let peak = trace.y[idx..idx + window]
            .iter()
            .fold(0.0f64, |m, &v| m.max(v.abs()));
        assert!(peak <= prev * (1.0 + 1e-9), "envelope grew at step {idx}");
        prev = peak;
        idx += window;
    }
}

#[test]
fn scenario_validation_errors() {
    let plant = desk_plant();
    let cfg = desk_cfg();
    // dt does not divide tau_s = 0.005.
    let sc = SimScenario::tracking(10.0, 3.0, 1.0, 3e-4);
    assert!(matches!(
        simulate(&cfg, &plant, &sc),
        Err(Error::Config(_))
    ));
    // dt too coarse for the sensor lag.
    let sc = SimScenario::tracking(10.0, 3.0, 1.0, 5e-3);
    assert!(simulate(&cfg, &plant, &sc).is_err());
    // No actuator dynamics at all.
    let cfg_bad = LoopConfig { t_act: 0.0, tau_a: 0.0, ..desk_cfg() };
    let sc = SimScenario::tracking(10.0, 3.0, 1.0, 1e-4);
    assert!(simulate(&cfg_bad, &plant, &sc).is_err());
}

#[test]
fn metrics_report_marks_divergent_scenarios() {
    let plant = roll_plant(-5.0, 10.0);
    let cfg = LoopConfig {
        k_p: 15.0,
        k_v: 200.0,
        k_r: 4.0,
        t_act: 0.02,
        tau_a: 0.0,
        t_sensor: 0.0,
        tau_s: 0.01,
        t_diff: 0.0,
        tau_am: 0.0,
        b_hat: 10.0,
        law: ControlLaw::Modified,
        pch: false,
        comp_filter: false,
        comp_sensor: false,
    };
    let battery = ScenarioBattery {
        tracking: Some(SimScenario::tracking(10.0, 3.0, 6.0, 1e-4)),
        disturbance: None,
        noise: None,
        robustness: None,
        margin_band: (1e-3, 1e4),
    };
    let report = run_metrics(&cfg, &plant, &battery).unwrap();
    assert_eq!(report.divergent, vec!["tracking".to_string()]);
    assert!(report.rms_er.is_nan());
}
