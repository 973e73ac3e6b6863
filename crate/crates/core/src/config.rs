//! Structured key-value configuration: flat `[plant]`, `[loop]`,
//! `[scenario]` and `[sweep]` sections in TOML form. Unknown keys are
//! errors. Every value can also be overridden from the command line through
//! dotted `section.key=value` assignments.

use serde::{Deserialize, Serialize};

use crate::blocks::{ControlLaw, GustSpec, LoopConfig, NoiseSpec, PlantModel};
use crate::error::{Error, Result};
use crate::sim::{PlantParam, ScenarioBattery, SimScenario};

/// Whole configuration file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub plant: PlantSection,
    #[serde(rename = "loop", default)]
    pub loop_: LoopSection,
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub sweep: Option<SweepSection>,
}

/// `[plant]` — the only required section. `kind` selects which derivative
/// set must be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    pub kind: String,
    pub z_alpha: Option<f64>,
    pub z_eta: Option<f64>,
    pub m_alpha: Option<f64>,
    pub m_q: Option<f64>,
    pub m_eta: Option<f64>,
    pub l_p: Option<f64>,
    pub l_da: Option<f64>,
    /// Airspeed converting gust gradient distance to time (m/s). Desk
    /// default, not an identified value.
    #[serde(default = "default_airspeed")]
    pub airspeed: f64,
}

fn default_airspeed() -> f64 {
    40.0
}

/// `[loop]` — controller and hardware parameters, all defaulted to the desk
/// configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LoopSection {
    pub k_p: f64,
    pub k_v: f64,
    pub k_r: f64,
    pub t_act: f64,
    pub tau_a: f64,
    pub t_sensor: f64,
    pub tau_s: f64,
    pub t_diff: f64,
    pub tau_am: f64,
    /// Control-effectiveness estimate; `C*B` of the plant when absent.
    pub b_hat: Option<f64>,
    /// Multiplies the estimate (over/under-estimation studies).
    pub b_hat_scale: f64,
    /// `"modified"` or `"conventional"`.
    pub law: String,
    pub pch: bool,
    pub comp_filter: bool,
    pub comp_sensor: bool,
}

impl Default for LoopSection {
    fn default() -> Self {
        LoopSection {
            k_p: 8.0,
            k_v: 50.0,
            k_r: 4.0,
            t_act: 0.02,
            tau_a: 0.005,
            t_sensor: 0.01,
            tau_s: 0.005,
            t_diff: 1.0 / 30.0,
            tau_am: 0.0,
            b_hat: None,
            b_hat_scale: 1.0,
            law: "modified".into(),
            pch: false,
            comp_filter: true,
            comp_sensor: true,
        }
    }
}

/// `[scenario]` — evaluation battery parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioSection {
    pub dt: f64,
    /// Tracking-run duration (s).
    pub duration: f64,
    pub disturbance_duration: f64,
    pub noise_duration: f64,
    /// Square-wave command amplitude (deg/s) and interval (s).
    pub amplitude: f64,
    pub interval: f64,
    pub gust_dx: f64,
    pub gust_dz: f64,
    pub gust_um: f64,
    pub gust_wm: f64,
    pub gust_start: f64,
    pub noise_variance: f64,
    pub noise_seed: u64,
    pub mc_samples: usize,
    pub mc_seed: u64,
    pub unc_z_alpha: f64,
    pub unc_z_eta: f64,
    pub unc_m_alpha: f64,
    pub unc_m_q: f64,
    pub unc_m_eta: f64,
    pub unc_l_p: f64,
    pub unc_l_da: f64,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        ScenarioSection {
            dt: 1e-4,
            duration: 12.0,
            disturbance_duration: 10.0,
            noise_duration: 8.0,
            amplitude: 10.0,
            interval: 3.0,
            gust_dx: 120.0,
            gust_dz: 80.0,
            gust_um: 3.5,
            gust_wm: 3.0,
            gust_start: 3.0,
            noise_variance: 4.0e-7,
            noise_seed: 7,
            mc_samples: 100,
            mc_seed: 42,
            unc_z_alpha: 0.0,
            unc_z_eta: 0.0,
            unc_m_alpha: 0.2,
            unc_m_q: 0.2,
            unc_m_eta: 0.2,
            unc_l_p: 0.0,
            unc_l_da: 0.0,
        }
    }
}

/// `[sweep]` — one or two parameter axes. Two axes form a cross product.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub param: String,
    pub values: Vec<f64>,
    pub param2: Option<String>,
    pub values2: Option<Vec<f64>>,
}

/// Parse a TOML configuration string; messages carry line/column positions.
pub fn parse_config(text: &str) -> Result<FileConfig> {
    let cfg: FileConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    validate(&cfg)?;
    Ok(cfg)
}

/// Load a configuration file from disk.
pub fn load_config(path: &std::path::Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Error::Config(format!("cannot read {}: {e}", path.display()))
    })?;
    parse_config(&text)
}

/// Apply dotted `section.key=value` overrides onto raw TOML text before
/// parsing; values are parsed as TOML literals.
pub fn apply_overrides(text: &str, overrides: &[String]) -> Result<String> {
    if overrides.is_empty() {
        return Ok(text.to_string());
    }
    let mut value: toml::Table =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    for assignment in overrides {
        let (key, raw) = assignment.split_once('=').ok_or_else(|| {
            Error::Config(format!("override `{assignment}` is not key=value"))
        })?;
        let (section, field) = key.trim().split_once('.').ok_or_else(|| {
            Error::Config(format!("override key `{key}` must be section.key"))
        })?;
        let parsed: toml::Value = raw
            .trim()
            .parse()
            .or_else(|_| format!("\"{}\"", raw.trim()).parse())
            .map_err(|e| Error::Config(format!("override value `{raw}`: {e}")))?;
        let entry = value
            .entry(section.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        match entry.as_table_mut() {
            Some(table) => {
                table.insert(field.to_string(), parsed);
            }
            None => {
                return Err(Error::Config(format!(
                    "section `{section}` is not a table"
                )))
            }
        }
    }
    toml::to_string(&value).map_err(|e| Error::Config(e.to_string()))
}

fn require(section: &str, name: &str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::Config(format!("missing required field `{section}.{name}`")))
}

fn validate(cfg: &FileConfig) -> Result<()> {
    match cfg.plant.kind.as_str() {
        "roll" | "short_period" => {}
        other => {
            return Err(Error::Config(format!(
                "plant.kind must be `roll` or `short_period`, got `{other}`"
            )))
        }
    }
    if cfg.loop_.law != "modified" && cfg.loop_.law != "conventional" {
        return Err(Error::Config(format!(
            "loop.law must be `modified` or `conventional`, got `{}`",
            cfg.loop_.law
        )));
    }
    Ok(())
}

impl FileConfig {
    /// Build the plant model; errors name the missing field.
    pub fn plant_model(&self) -> Result<PlantModel<f64>> {
        let p = &self.plant;
        match p.kind.as_str() {
            "roll" => crate::blocks::make_roll(
                require("plant", "l_p", p.l_p)?,
                require("plant", "l_da", p.l_da)?,
            ),
            "short_period" => crate::blocks::make_short_period(
                require("plant", "z_alpha", p.z_alpha)?,
                require("plant", "z_eta", p.z_eta)?,
                require("plant", "m_alpha", p.m_alpha)?,
                require("plant", "m_q", p.m_q)?,
                require("plant", "m_eta", p.m_eta)?,
            ),
            other => Err(Error::Config(format!("unknown plant kind `{other}`"))),
        }
    }

    /// Build the loop configuration; `b_hat` falls back to the plant's
    /// `C*B`, scaled by `b_hat_scale`.
    pub fn loop_config(&self, plant: &PlantModel<f64>) -> Result<LoopConfig<f64>> {
        let l = &self.loop_;
        let law = match l.law.as_str() {
            "conventional" => ControlLaw::Conventional,
            _ => ControlLaw::Modified,
        };
        let cfg = LoopConfig {
            k_p: l.k_p,
            k_v: l.k_v,
            k_r: l.k_r,
            t_act: l.t_act,
            tau_a: l.tau_a,
            t_sensor: l.t_sensor,
            tau_s: l.tau_s,
            t_diff: l.t_diff,
            tau_am: l.tau_am,
            b_hat: l.b_hat.unwrap_or_else(|| plant.cb()) * l.b_hat_scale,
            law,
            pch: l.pch,
            comp_filter: l.comp_filter,
            comp_sensor: l.comp_sensor,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn gust_spec(&self) -> GustSpec<f64> {
        let s = &self.scenario;
        GustSpec {
            d_x: s.gust_dx,
            d_z: s.gust_dz,
            u_m: s.gust_um,
            w_m: s.gust_wm,
            airspeed: self.plant.airspeed,
            start_time: s.gust_start,
        }
    }

    pub fn uncertainty(&self) -> Vec<(PlantParam, f64)> {
        let s = &self.scenario;
        [
            (PlantParam::ZAlpha, s.unc_z_alpha),
            (PlantParam::ZEta, s.unc_z_eta),
            (PlantParam::MAlpha, s.unc_m_alpha),
            (PlantParam::MQ, s.unc_m_q),
            (PlantParam::MEta, s.unc_m_eta),
            (PlantParam::LP, s.unc_l_p),
            (PlantParam::LDa, s.unc_l_da),
        ]
        .into_iter()
        .filter(|&(_, w)| w != 0.0)
        .collect()
    }

    /// The four-scenario battery resolved from the `[scenario]` section.
    pub fn battery(&self) -> ScenarioBattery<f64> {
        let s = &self.scenario;
        let tracking =
            SimScenario::tracking(s.amplitude, s.interval, s.duration, s.dt);
        let disturbance = SimScenario::disturbance(
            self.gust_spec(),
            s.disturbance_duration,
            s.dt,
        );
        let noise = SimScenario::noise(
            NoiseSpec {
                variance: s.noise_variance,
                seed: s.noise_seed,
                sample_rate: 1.0 / s.dt,
            },
            s.noise_duration,
            s.dt,
        );
        let robustness = SimScenario::robustness(
            &tracking,
            s.mc_samples,
            s.mc_seed,
            self.uncertainty(),
        );
        ScenarioBattery {
            tracking: Some(tracking),
            disturbance: Some(disturbance),
            noise: Some(noise),
            robustness: Some(robustness),
            margin_band: (1e-3, 1e4),
        }
    }

    /// Serialized snapshot with every default materialized.
    pub fn snapshot_toml(&self) -> String {
        toml::to_string_pretty(self).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DESK: &str = r#"
[plant]
kind = "short_period"
z_alpha = -1.2
z_eta = -0.1
m_alpha = -8.0
m_q = -1.5
m_eta = -12.0
"#;

    #[test]
    fn parses_desk_config_with_defaults() {
        let cfg = parse_config(DESK).unwrap();
        let plant = cfg.plant_model().unwrap();
        assert_eq!(plant.cb(), -12.0);
        let lc = cfg.loop_config(&plant).unwrap();
        assert_eq!(lc.k_p, 8.0);
        assert_eq!(lc.b_hat, -12.0);
        assert!(lc.comp_filter && lc.comp_sensor);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let bad = format!("{DESK}\n[loop]\nk_p = 8.0\nnot_a_key = 1.0\n");
        let err = parse_config(&bad).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("not_a_key"), "{msg}");
    }

    #[test]
    fn missing_required_field_named() {
        let cfg = parse_config("[plant]\nkind = \"roll\"\nl_p = -2.0\n").unwrap();
        let err = cfg.plant_model().unwrap_err();
        assert!(err.to_string().contains("plant.l_da"), "{err}");
    }

    #[test]
    fn overrides_apply_and_roundtrip() {
        let text = apply_overrides(
            DESK,
            &["loop.k_p=16".into(), "scenario.mc_samples=4".into()],
        )
        .unwrap();
        let cfg = parse_config(&text).unwrap();
        assert_eq!(cfg.loop_.k_p, 16.0);
        assert_eq!(cfg.scenario.mc_samples, 4);
    }

    #[test]
    fn bad_override_is_config_error() {
        assert!(apply_overrides(DESK, &["loopk_p=16".into()]).is_err());
        assert!(apply_overrides(DESK, &["no-equals".into()]).is_err());
    }

    #[test]
    fn b_hat_scale_multiplies_cb() {
        let text = apply_overrides(DESK, &["loop.b_hat_scale=1.3".into()]).unwrap();
        let cfg = parse_config(&text).unwrap();
        let plant = cfg.plant_model().unwrap();
        let lc = cfg.loop_config(&plant).unwrap();
        assert!((lc.b_hat - (-12.0 * 1.3)).abs() < 1e-12);
    }
}
