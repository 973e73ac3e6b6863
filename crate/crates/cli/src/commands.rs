//! Implementation of the six analysis commands.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use indiloop_core::config::{apply_overrides, parse_config, FileConfig};
use indiloop_core::*;

use crate::csvio::{fmt_f64, Table};
use crate::manifest::RunManifest;

/// Arguments shared by every command.
pub struct Common {
    pub config: PathBuf,
    pub outdir: PathBuf,
    pub overrides: Vec<String>,
    pub argv: Vec<String>,
}

pub struct Resolved {
    pub file: FileConfig,
    pub plant: PlantModel<f64>,
    pub cfg: LoopConfig<f64>,
}

/// Load, override and resolve the configuration; warnings go to stderr.
pub fn resolve(common: &Common) -> Result<Resolved> {
    let text = std::fs::read_to_string(&common.config)
        .with_context(|| format!("cannot read {}", common.config.display()))?;
    let text = apply_overrides(&text, &common.overrides)?;
    let file = parse_config(&text)?;
    let plant = file.plant_model()?;
    let cfg = file.loop_config(&plant)?;
    for warning in cfg.warnings() {
        eprintln!("warning: {warning}");
    }
    Ok(Resolved { file, plant, cfg })
}

fn begin_manifest(common: &Common, command: &str, resolved: &Resolved) -> Result<RunManifest> {
    std::fs::create_dir_all(&common.outdir)
        .with_context(|| format!("creating {}", common.outdir.display()))?;
    Ok(RunManifest::begin(
        command,
        common.argv.clone(),
        &common.config,
        &common.overrides,
        resolved.file.snapshot_toml(),
        &common.outdir,
        resolved.file.scenario.mc_seed,
        resolved.file.scenario.noise_seed,
    ))
}

/// Parse `LO:HI` into a frequency band.
pub fn parse_band(text: &str) -> Result<(f64, f64)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("band `{text}` must be LO:HI"))?;
    let lo: f64 = lo.parse().context("band low end")?;
    let hi: f64 = hi.parse().context("band high end")?;
    if !(lo > 0.0 && hi > lo) {
        bail!("band must satisfy 0 < LO < HI");
    }
    Ok((lo, hi))
}

/// Parse `LO:HI:N` into a linear axis.
pub fn parse_axis(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("axis `{text}` must be LO:HI:N");
    }
    let lo: f64 = parts[0].parse().context("axis low end")?;
    let hi: f64 = parts[1].parse().context("axis high end")?;
    let n: usize = parts[2].parse().context("axis point count")?;
    if n == 0 || lo < 0.0 || hi < lo {
        bail!("axis must satisfy 0 <= LO <= HI and N >= 1");
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| lo + step * i as f64).collect())
}

fn margin_row(pch: &str, m: &MarginReport<f64>) -> Vec<String> {
    let opt = |v: Option<f64>| fmt_f64(v.unwrap_or(f64::NAN));
    vec![
        pch.to_string(),
        fmt_f64(m.gain_margin),
        fmt_f64(m.gain_margin_db()),
        opt(m.phase_margin_deg),
        opt(m.time_delay_margin),
        opt(m.gain_crossover),
        m.phase_crossovers
            .iter()
            .map(|&w| fmt_f64(w))
            .collect::<Vec<_>>()
            .join(";"),
    ]
}

pub fn cmd_margins(common: &Common, pch: &str, band: (f64, f64)) -> Result<u8> {
    let resolved = resolve(common)?;
    let mut manifest = begin_manifest(common, "margins", &resolved)?;
    let mut table = Table::new(&[
        "pch",
        "gain_margin",
        "gain_margin_db",
        "phase_margin_deg",
        "time_delay_margin_s",
        "gain_crossover_rad_s",
        "phase_crossovers_rad_s",
    ]);
    let states: Vec<bool> = match pch {
        "off" => vec![false],
        "on" => vec![true],
        "both" => vec![false, true],
        other => bail!("--pch must be off, on or both, got `{other}`"),
    };
    for state in states {
        let cfg = LoopConfig { pch: state, ..resolved.cfg.clone() };
        let l_u = open_loop(&cfg, &resolved.plant)?;
        let report = margins(&l_u, band)?;
        table.push_row(margin_row(if state { "on" } else { "off" }, &report));
    }
    let path = manifest.record(&common.outdir.join("margins.csv"));
    table.write(&path)?;
    manifest.finish(&common.outdir)?;
    Ok(0)
}

fn frequency_table(
    expr: &TfExpr<f64>,
    omegas: &[f64],
    nyquist: bool,
) -> Result<Table> {
    let fr = freq_response(expr, omegas)?;
    if nyquist {
        let mut t = Table::new(&["omega_rad_s", "re", "im"]);
        for (&w, v) in fr.omegas().iter().zip(fr.values()) {
            t.push_floats(&[w, v.re, v.im]);
        }
        Ok(t)
    } else {
        let mags = fr.magnitudes_db();
        let phases = fr.phases_deg_unwrapped();
        let mut t = Table::new(&["omega_rad_s", "magnitude_db", "phase_deg"]);
        for k in 0..fr.len() {
            t.push_floats(&[fr.omegas()[k], mags[k], phases[k]]);
        }
        Ok(t)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_bode(
    common: &Common,
    band: (f64, f64),
    points: usize,
    pch: bool,
    nyquist: bool,
    gamma1_taus: &[f64],
    gamma2_pairs: &[String],
    functions: bool,
) -> Result<u8> {
    let resolved = resolve(common)?;
    let command = if nyquist { "nyquist" } else { "bode" };
    let mut manifest = begin_manifest(common, command, &resolved)?;
    let cfg = LoopConfig { pch, ..resolved.cfg.clone() };
    let omegas = log_space(band.0, band.1, points);

    let l_u = open_loop(&cfg, &resolved.plant)?;
    let main_name = if nyquist { "nyquist.csv" } else { "bode.csv" };
    let path = manifest.record(&common.outdir.join(main_name));
    frequency_table(&l_u, &omegas, nyquist)?.write(&path)?;

    for &tau1 in gamma1_taus {
        let g = gamma1(tau1, cfg.t_act)?;
        let expr = TfExpr::atom(g);
        let name = format!("gamma1_{tau1}.csv");
        let path = manifest.record(&common.outdir.join(name));
        frequency_table(&expr, &omegas, false)?.write(&path)?;
    }
    for pair in gamma2_pairs {
        let (t1, t2) = pair
            .split_once(':')
            .ok_or_else(|| anyhow!("--gamma2 takes TAU1:TAU2, got `{pair}`"))?;
        let tau1: f64 = t1.parse().context("gamma2 tau1")?;
        let tau2: f64 = t2.parse().context("gamma2 tau2")?;
        let g = gamma2(tau1, tau2, cfg.t_act)?;
        let expr = TfExpr::atom(g);
        let name = format!("gamma2_{tau1}_{tau2}.csv");
        let path = manifest.record(&common.outdir.join(name));
        frequency_table(&expr, &omegas, false)?.write(&path)?;
    }

    if functions {
        let set = performance_set(&cfg, &resolved.plant)?;
        for (name, expr) in [
            ("sensitivity.csv", &set.s),
            ("tracking_error.csv", &set.t_ec),
            ("disturbance_to_output.csv", &set.t_yd),
            ("noise_to_output.csv", &set.t_yn),
        ] {
            let path = manifest.record(&common.outdir.join(name));
            frequency_table(expr, &omegas, false)?.write(&path)?;
        }
    }

    manifest.finish(&common.outdir)?;
    Ok(0)
}

pub fn cmd_region(
    common: &Common,
    tau1_axis: &[f64],
    tau2_axis: &[f64],
    gains: &[String],
    tolerances: &GridTolerances<f64>,
) -> Result<u8> {
    let resolved = resolve(common)?;
    let mut manifest = begin_manifest(common, "region", &resolved)?;

    let gain_pairs: Vec<(f64, f64)> = if gains.is_empty() {
        vec![(resolved.cfg.k_p, resolved.cfg.k_v)]
    } else {
        gains
            .iter()
            .map(|txt| {
                let (kp, kv) = txt
                    .split_once(':')
                    .ok_or_else(|| anyhow!("--gains takes KP:KV, got `{txt}`"))?;
                Ok((kp.parse::<f64>()?, kv.parse::<f64>()?))
            })
            .collect::<Result<_>>()?
    };

    for (idx, &(k_p, k_v)) in gain_pairs.iter().enumerate() {
        let cfg = LoopConfig { k_p, k_v, ..resolved.cfg.clone() };
        let grid = delay_stability_grid_with(
            &cfg,
            &resolved.plant,
            tau1_axis,
            tau2_axis,
            tolerances,
        )?;
        let mut table = Table::new(&["tau1_s", "tau2_s", "stable", "max_real_part"]);
        for (i, &t1) in grid.tau1_values.iter().enumerate() {
            for (j, &t2) in grid.tau2_values.iter().enumerate() {
                table.push_row(vec![
                    fmt_f64(t1),
                    fmt_f64(t2),
                    if grid.stable[i][j] { "1".into() } else { "0".into() },
                    fmt_f64(grid.max_real_part[i][j]),
                ]);
            }
        }
        let name = if gain_pairs.len() == 1 {
            "region.csv".to_string()
        } else {
            format!("region_{idx}_kp{k_p}_kv{k_v}.csv")
        };
        let path = manifest.record(&common.outdir.join(name));
        table.write(&path)?;
        if !grid.indeterminate.is_empty() {
            eprintln!(
                "warning: {} cells indeterminate for (K_p={k_p}, K_v={k_v})",
                grid.indeterminate.len()
            );
        }
    }
    manifest.finish(&common.outdir)?;
    Ok(0)
}

fn trace_table(trace: &SimTrace<f64>) -> Table {
    let mut t = Table::new(&[
        "time_s",
        "r_deg_s",
        "y_deg_s",
        "y_m_deg_s",
        "u_c_deg",
        "u_deg",
        "u_hat_deg",
        "v_h_deg_s2",
    ]);
    for k in 0..trace.len() {
        t.push_floats(&[
            trace.time[k],
            trace.r[k],
            trace.y[k],
            trace.y_m[k],
            trace.u_c[k],
            trace.u[k],
            trace.u_hat[k],
            trace.v_h[k],
        ]);
    }
    t
}

const METRIC_KEYS: [&str; 10] = [
    "gm_db",
    "pm_deg",
    "tdm_s",
    "rms_er_deg_s",
    "rms_ur_deg",
    "rms_ed_deg_s",
    "rms_ud_deg",
    "rms_en_deg_s",
    "rms_un_deg",
    "sigma_rms_er_deg_s",
];

fn metric_values(r: &MetricsReport<f64>) -> [f64; 10] {
    [
        r.gm_db, r.pm_deg, r.tdm_s, r.rms_er, r.rms_ur, r.rms_ed, r.rms_ud, r.rms_en,
        r.rms_un, r.sigma_rms_er,
    ]
}

fn subset_battery(file: &FileConfig, scenarios: &[String]) -> Result<ScenarioBattery<f64>> {
    let mut battery = file.battery();
    if scenarios.is_empty() {
        return Ok(battery);
    }
    let keep = |name: &str| scenarios.iter().any(|s| s == name);
    for name in scenarios {
        if !["tracking", "disturbance", "noise", "robustness"].contains(&name.as_str()) {
            bail!("unknown scenario `{name}`");
        }
    }
    if !keep("tracking") {
        battery.tracking = None;
    }
    if !keep("disturbance") {
        battery.disturbance = None;
    }
    if !keep("noise") {
        battery.noise = None;
    }
    if !keep("robustness") {
        battery.robustness = None;
    }
    Ok(battery)
}

pub fn cmd_evaluate(common: &Common, scenarios: &[String]) -> Result<u8> {
    let resolved = resolve(common)?;
    let mut manifest = begin_manifest(common, "evaluate", &resolved)?;
    let battery = subset_battery(&resolved.file, scenarios)?;

    let report = run_metrics(&resolved.cfg, &resolved.plant, &battery)?;

    // Flat key-value report.
    let mut kv = String::new();
    for (key, value) in METRIC_KEYS.iter().zip(metric_values(&report)) {
        kv.push_str(&format!("{key} = {}\n", fmt_f64(value)));
    }
    kv.push_str(&format!("divergent = {}\n", report.divergent.join(";")));
    kv.push_str(&format!("mc_excluded = {}\n", report.mc_excluded));
    let path = manifest.record(&common.outdir.join("metrics.txt"));
    std::fs::write(&path, &kv).with_context(|| format!("writing {}", path.display()))?;

    // Single-row CSV for sweep-style aggregation.
    let mut table = Table::new(&METRIC_KEYS);
    table.push_floats(&metric_values(&report));
    let path = manifest.record(&common.outdir.join("metrics.csv"));
    table.write(&path)?;

    // Traces for whichever scenarios ran.
    let runs: [(&str, Option<&SimScenario<f64>>); 3] = [
        ("trace_tracking.csv", battery.tracking.as_ref()),
        ("trace_disturbance.csv", battery.disturbance.as_ref()),
        ("trace_noise.csv", battery.noise.as_ref()),
    ];
    for (name, scenario) in runs {
        if let Some(sc) = scenario {
            match simulate(&resolved.cfg, &resolved.plant, sc) {
                Ok(trace) => {
                    let path = manifest.record(&common.outdir.join(name));
                    trace_table(&trace).write(&path)?;
                }
                Err(Error::Divergence { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    if let Some(sc) = &battery.robustness {
        if let Ok(mc) = robustness_mc(&resolved.cfg, &resolved.plant, sc) {
            let mut table = Table::new(&["sample", "rms_er_deg_s"]);
            for (i, &v) in mc.samples.iter().enumerate() {
                table.push_row(vec![i.to_string(), fmt_f64(v)]);
            }
            let path = manifest.record(&common.outdir.join("robustness_samples.csv"));
            table.write(&path)?;
        }
    }

    manifest.finish(&common.outdir)?;
    if report.any_divergent() {
        eprintln!("divergent scenarios: {}", report.divergent.join(", "));
        return Ok(3);
    }
    Ok(0)
}

/// Apply one sweep assignment onto the resolved loop configuration.
fn apply_sweep_param(file: &mut FileConfig, name: &str, value: f64) -> Result<()> {
    match name {
        "k_p" => file.loop_.k_p = value,
        "k_v" => file.loop_.k_v = value,
        "b_hat_scale" => file.loop_.b_hat_scale = value,
        "f_act" => file.loop_.t_act = 1.0 / value,
        "f_sensor" => file.loop_.t_sensor = 1.0 / value,
        "f_diff" => file.loop_.t_diff = 1.0 / value,
        "tau_s" => file.loop_.tau_s = value,
        "tau_am" => file.loop_.tau_am = value,
        other => bail!(
            "unknown sweep parameter `{other}` (expected one of k_p, k_v, \
             b_hat_scale, f_act, f_sensor, f_diff, tau_s, tau_am)"
        ),
    }
    Ok(())
}

pub fn cmd_sweep(common: &Common) -> Result<u8> {
    let resolved = resolve(common)?;
    let sweep = resolved
        .file
        .sweep
        .clone()
        .ok_or_else(|| anyhow!("config has no sweep section"))?;
    let mut manifest = begin_manifest(common, "sweep", &resolved)?;

    let secondary: Vec<Option<f64>> = match (&sweep.param2, &sweep.values2) {
        (Some(_), Some(values)) => values.iter().copied().map(Some).collect(),
        (None, None) => vec![None],
        _ => bail!("sweep param2 and values2 must be given together"),
    };

    let mut table = Table::new(&[
        "param",
        "param_value",
        "param2",
        "param2_value",
        "metric",
        "metric_value",
    ]);
    for &value in &sweep.values {
        for &value2 in &secondary {
            let mut file = resolved.file.clone();
            apply_sweep_param(&mut file, &sweep.param, value)?;
            if let (Some(name2), Some(v2)) = (&sweep.param2, value2) {
                apply_sweep_param(&mut file, name2, v2)?;
            }
            let plant = file.plant_model()?;
            let cfg = file.loop_config(&plant)?;
            let battery = file.battery();
            let report = run_metrics(&cfg, &plant, &battery)?;
            for (key, metric) in METRIC_KEYS.iter().zip(metric_values(&report)) {
                table.push_row(vec![
                    sweep.param.clone(),
                    fmt_f64(value),
                    sweep.param2.clone().unwrap_or_default(),
                    value2.map(fmt_f64).unwrap_or_default(),
                    key.to_string(),
                    fmt_f64(metric),
                ]);
            }
            if report.any_divergent() {
                eprintln!(
                    "note: {} = {} diverged in {}",
                    sweep.param,
                    value,
                    report.divergent.join(", ")
                );
            }
        }
    }
    let path = manifest.record(&common.outdir.join("sweep.csv"));
    table.write(&path)?;
    manifest.finish(&common.outdir)?;
    Ok(0)
}
