//! Experiment configuration: built-in defaults, `key=value` files, overrides.
//!
//! Precedence is overrides > file > defaults. Units at the boundary: slot
//! times in µs, densities in vehicles/m, delay targets in ms, throughput in
//! Mbps.

use std::fmt::Display;
use std::str::FromStr;

use fogcell::delay::linear_grid;
use fogcell::{
    ArrivalModel, CalibrationGrid, CalibrationTarget, CellCapacity, DelayParams, FogCellConfig,
    HopMode, LinkParams,
};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown key `{key}`{}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    UnknownKey { key: String, line: Option<usize> },
    #[error("invalid value for `{key}`: {msg}")]
    Range { key: String, msg: String },
}

fn range(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Range {
        key: key.to_string(),
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub link: LinkParams,
    pub t_slot_us: f64,
    pub t_retran_us: f64,
    pub hop_mode: HopMode,
    pub c_total_mbps: f64,
    pub c_ave_mbps: f64,
    pub fogcell: FogCellConfig,
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_step: f64,
    pub la_list: Vec<f64>,
    pub n_max: usize,
    pub trials: u64,
    pub seed: u64,
    /// `(L_a in m, curve minimum in ms)` pairs.
    pub targets: Vec<(f64, f64)>,
    pub cal_grid: CalibrationGrid,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            link: LinkParams::default(),
            t_slot_us: 5.0,
            t_retran_us: 5.0,
            hop_mode: HopMode::Homogeneous,
            c_total_mbps: 1000.0,
            c_ave_mbps: 33.0,
            fogcell: FogCellConfig::default(),
            rho_min: 0.03,
            rho_max: 0.20,
            rho_step: 0.005,
            la_list: vec![300.0, 400.0, 500.0],
            n_max: 50,
            trials: 100_000,
            seed: 1,
            targets: vec![(300.0, 0.32), (400.0, 0.46), (500.0, 0.63)],
            cal_grid: CalibrationGrid::default(),
        }
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| range(key, format!("cannot parse `{value}`: {e}")))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    value.split(',').map(|s| num(key, s)).collect()
}

fn join<T: Display>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl ExperimentConfig {
    /// Every recognised key, in echo order.
    pub const KEYS: &'static [&'static str] = &[
        "p_tx_dbm",
        "theta_db",
        "sigma_db",
        "n0_dbm_per_hz",
        "w_hz",
        "range_max_m",
        "t_slot_us",
        "t_retran_us",
        "hop_mode",
        "c_total_mbps",
        "c_ave_mbps",
        "road_len_m",
        "rsu_x_m",
        "rsu_radius_m",
        "arrival_model",
        "arrival_rho",
        "v_mps",
        "dt_s",
        "duration_s",
        "ctrl_period_s",
        "max_arrivals",
        "rho_min",
        "rho_max",
        "rho_step",
        "la_list",
        "n_max",
        "trials",
        "seed",
        "targets",
        "cal_offset_min_db",
        "cal_offset_max_db",
        "cal_offset_step_db",
        "cal_sigma_min_db",
        "cal_sigma_max_db",
        "cal_sigma_step_db",
    ];

    /// Sets one key from its textual value. Does not run cross-field checks.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "p_tx_dbm" => self.link.p_tx_dbm = num(key, v)?,
            "theta_db" => self.link.theta_db = num(key, v)?,
            "sigma_db" => self.link.sigma_db = num(key, v)?,
            "n0_dbm_per_hz" => self.link.n0_dbm_per_hz = num(key, v)?,
            "w_hz" => self.link.w_hz = num(key, v)?,
            "range_max_m" => self.link.range_max_m = num(key, v)?,
            "t_slot_us" => self.t_slot_us = num(key, v)?,
            "t_retran_us" => self.t_retran_us = num(key, v)?,
            "hop_mode" => {
                self.hop_mode = match v {
                    "homogeneous" => HopMode::Homogeneous,
                    "residual" => HopMode::Residual,
                    _ => return Err(range(key, "expected `homogeneous` or `residual`")),
                }
            }
            "c_total_mbps" => self.c_total_mbps = num(key, v)?,
            "c_ave_mbps" => self.c_ave_mbps = num(key, v)?,
            "road_len_m" => self.fogcell.road_len_m = num(key, v)?,
            "rsu_x_m" => self.fogcell.rsu_x_m = num(key, v)?,
            "rsu_radius_m" => self.fogcell.rsu_radius_m = num(key, v)?,
            "arrival_model" => {
                self.fogcell.arrival_model = match v {
                    "equidistant" => ArrivalModel::Equidistant,
                    "poisson" => ArrivalModel::Poisson,
                    _ => return Err(range(key, "expected `equidistant` or `poisson`")),
                }
            }
            "arrival_rho" => self.fogcell.arrival_rho = num(key, v)?,
            "v_mps" => self.fogcell.v_mps = num(key, v)?,
            "dt_s" => self.fogcell.dt_s = num(key, v)?,
            "duration_s" => self.fogcell.duration_s = num(key, v)?,
            "ctrl_period_s" => self.fogcell.ctrl_period_s = num(key, v)?,
            "max_arrivals" => {
                self.fogcell.max_arrivals = match v {
                    "none" => None,
                    _ => Some(num(key, v)?),
                }
            }
            "rho_min" => self.rho_min = num(key, v)?,
            "rho_max" => self.rho_max = num(key, v)?,
            "rho_step" => self.rho_step = num(key, v)?,
            "la_list" => self.la_list = list(key, v)?,
            "n_max" => self.n_max = num(key, v)?,
            "trials" => self.trials = num(key, v)?,
            "seed" => {
                self.seed = num(key, v)?;
                self.fogcell.seed = self.seed;
            }
            "targets" => {
                self.targets = v
                    .split(',')
                    .map(|pair| {
                        let (la, ms) = pair.split_once(':').ok_or_else(|| {
                            range(key, format!("expected `la_m:delay_ms`, got `{pair}`"))
                        })?;
                        Ok((num(key, la)?, num(key, ms)?))
                    })
                    .collect::<Result<_, ConfigError>>()?
            }
            "cal_offset_min_db" => self.cal_grid.offset_min_db = num(key, v)?,
            "cal_offset_max_db" => self.cal_grid.offset_max_db = num(key, v)?,
            "cal_offset_step_db" => self.cal_grid.offset_step_db = num(key, v)?,
            "cal_sigma_min_db" => self.cal_grid.sigma_min_db = num(key, v)?,
            "cal_sigma_max_db" => self.cal_grid.sigma_max_db = num(key, v)?,
            "cal_sigma_step_db" => self.cal_grid.sigma_step_db = num(key, v)?,
            _ => {
                return Err(ConfigError::UnknownKey {
                    key: key.to_string(),
                    line: None,
                })
            }
        }
        Ok(())
    }

    /// Current value of `key` in the same textual form [`set`](Self::set) accepts.
    pub fn get(&self, key: &str) -> Option<String> {
        let f = &self.fogcell;
        Some(match key {
            "p_tx_dbm" => self.link.p_tx_dbm.to_string(),
            "theta_db" => self.link.theta_db.to_string(),
            "sigma_db" => self.link.sigma_db.to_string(),
            "n0_dbm_per_hz" => self.link.n0_dbm_per_hz.to_string(),
            "w_hz" => self.link.w_hz.to_string(),
            "range_max_m" => self.link.range_max_m.to_string(),
            "t_slot_us" => self.t_slot_us.to_string(),
            "t_retran_us" => self.t_retran_us.to_string(),
            "hop_mode" => match self.hop_mode {
                HopMode::Homogeneous => "homogeneous".into(),
                HopMode::Residual => "residual".into(),
            },
            "c_total_mbps" => self.c_total_mbps.to_string(),
            "c_ave_mbps" => self.c_ave_mbps.to_string(),
            "road_len_m" => f.road_len_m.to_string(),
            "rsu_x_m" => f.rsu_x_m.to_string(),
            "rsu_radius_m" => f.rsu_radius_m.to_string(),
            "arrival_model" => match f.arrival_model {
                ArrivalModel::Equidistant => "equidistant".into(),
                ArrivalModel::Poisson => "poisson".into(),
            },
            "arrival_rho" => f.arrival_rho.to_string(),
            "v_mps" => f.v_mps.to_string(),
            "dt_s" => f.dt_s.to_string(),
            "duration_s" => f.duration_s.to_string(),
            "ctrl_period_s" => f.ctrl_period_s.to_string(),
            "max_arrivals" => f.max_arrivals.map_or("none".into(), |m| m.to_string()),
            "rho_min" => self.rho_min.to_string(),
            "rho_max" => self.rho_max.to_string(),
            "rho_step" => self.rho_step.to_string(),
            "la_list" => join(&self.la_list),
            "n_max" => self.n_max.to_string(),
            "trials" => self.trials.to_string(),
            "seed" => self.seed.to_string(),
            "targets" => join(self.targets.iter().map(|(la, ms)| format!("{la}:{ms}"))),
            "cal_offset_min_db" => self.cal_grid.offset_min_db.to_string(),
            "cal_offset_max_db" => self.cal_grid.offset_max_db.to_string(),
            "cal_offset_step_db" => self.cal_grid.offset_step_db.to_string(),
            "cal_sigma_min_db" => self.cal_grid.sigma_min_db.to_string(),
            "cal_sigma_max_db" => self.cal_grid.sigma_max_db.to_string(),
            "cal_sigma_step_db" => self.cal_grid.sigma_step_db.to_string(),
            _ => return None,
        })
    }

    /// `(key, value)` for every key, in [`KEYS`](Self::KEYS) order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        Self::KEYS
            .iter()
            .map(|&k| (k, self.get(k).expect("every listed key has a value")))
            .collect()
    }

    /// Applies `key=value` text on top of `self`. `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: line_no,
                msg: format!("expected `key=value`, got `{line}`"),
            })?;
            let key = key.trim();
            self.set(key, value).map_err(|e| match e {
                ConfigError::UnknownKey { key, .. } => ConfigError::UnknownKey {
                    key,
                    line: Some(line_no),
                },
                ConfigError::Range { key, msg } => ConfigError::Parse {
                    line: line_no,
                    msg: format!("invalid value for `{key}`: {msg}"),
                },
                other => other,
            })?;
        }
        Ok(())
    }

    /// Defaults, then `file_text`, then `overrides`; validated.
    pub fn parse(
        file_text: Option<&str>,
        overrides: &[(String, String)],
    ) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        if let Some(text) = file_text {
            cfg.apply_text(text)?;
        }
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(range(key, format!("must be > 0, got {v}")))
            }
        };
        positive("w_hz", self.link.w_hz)?;
        positive("range_max_m", self.link.range_max_m)?;
        if !(self.link.sigma_db >= 0.0) {
            return Err(range("sigma_db", "must be >= 0"));
        }
        positive("t_slot_us", self.t_slot_us)?;
        positive("t_retran_us", self.t_retran_us)?;
        positive("c_total_mbps", self.c_total_mbps)?;
        positive("c_ave_mbps", self.c_ave_mbps)?;
        if self.c_ave_mbps > self.c_total_mbps {
            return Err(range("c_ave_mbps", "must not exceed c_total_mbps"));
        }
        positive("rho_min", self.rho_min)?;
        positive("rho_step", self.rho_step)?;
        if !(self.rho_min < self.rho_max) {
            return Err(range("rho_max", "must be greater than rho_min"));
        }
        if self.la_list.is_empty() {
            return Err(range("la_list", "must not be empty"));
        }
        for &la in &self.la_list {
            positive("la_list", la)?;
        }
        if self.n_max == 0 {
            return Err(range("n_max", "must be >= 1"));
        }
        if self.trials == 0 {
            return Err(range("trials", "must be >= 1"));
        }
        if self.targets.is_empty() {
            return Err(range("targets", "must not be empty"));
        }
        for &(la, ms) in &self.targets {
            positive("targets", la)?;
            positive("targets", ms)?;
        }
        let g = &self.cal_grid;
        for (key, lo, hi, step) in [
            (
                "cal_offset",
                g.offset_min_db,
                g.offset_max_db,
                g.offset_step_db,
            ),
            ("cal_sigma", g.sigma_min_db, g.sigma_max_db, g.sigma_step_db),
        ] {
            positive(&format!("{key}_step_db"), step)?;
            if !(lo <= hi) {
                return Err(range(&format!("{key}_max_db"), "must be >= the minimum"));
            }
        }
        if g.sigma_min_db < 0.0 {
            return Err(range("cal_sigma_min_db", "must be >= 0"));
        }
        self.fogcell.validate().map_err(|e| match e {
            fogcell::Error::InvalidParameter { name, reason } => range(name, reason),
            other => range("fogcell", other.to_string()),
        })?;
        Ok(())
    }

    pub fn rho_grid(&self) -> Vec<f64> {
        linear_grid(self.rho_min, self.rho_max, self.rho_step).expect("validated grid")
    }

    pub fn delay_params(&self) -> DelayParams {
        DelayParams {
            t_slot_s: self.t_slot_us / 1e6,
            t_retran_s: self.t_retran_us / 1e6,
        }
    }

    pub fn calibration_targets(&self) -> Vec<CalibrationTarget> {
        self.targets
            .iter()
            .map(|&(l_a_m, ms)| CalibrationTarget {
                l_a_m,
                delay_min_s: ms / 1e3,
            })
            .collect()
    }

    pub fn capacity(&self) -> CellCapacity {
        CellCapacity::new(self.c_total_mbps, self.c_ave_mbps).expect("validated capacity")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_input_gives_defaults() {
        let cfg = ExperimentConfig::parse(Some(""), &[]).unwrap();
        assert_eq!(cfg.link.n0_dbm_per_hz, -174.0);
        assert_eq!(cfg.link.w_hz, 2e9);
        assert_eq!(cfg.link.range_max_m, 50.0);
        assert_eq!(cfg.delay_params(), DelayParams::default());
        assert_eq!(cfg.c_total_mbps, 1000.0);
        assert_eq!(cfg.c_ave_mbps, 33.0);
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn overrides_beat_file() {
        let cfg =
            ExperimentConfig::parse(Some("t_slot_us=5\n"), &[("t_slot_us".into(), "10".into())])
                .unwrap();
        assert_eq!(cfg.t_slot_us, 10.0);
        assert_eq!(cfg.delay_params().t_slot_s, 10e-6);
    }

    #[test]
    fn zero_step_names_key() {
        let err = ExperimentConfig::parse(Some("rho_step=0"), &[]).unwrap_err();
        assert!(
            matches!(&err, ConfigError::Range { key, .. } if key == "rho_step"),
            "{err}"
        );
        assert!(err.to_string().contains("rho_step"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentConfig::parse(Some("# c\nseed=3\nbogus=1\n"), &[]).unwrap_err();
        assert_eq!(
            err,
            ConfigError::UnknownKey {
                key: "bogus".into(),
                line: Some(3)
            }
        );
        let err = ExperimentConfig::parse(Some("seed=3\nno equals sign\n"), &[]).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }));
        let err = ExperimentConfig::parse(Some("trials=many"), &[]).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 1, .. }));
    }

    #[test]
    fn echo_round_trips() {
        let mut cfg = ExperimentConfig::default();
        cfg.set("la_list", "250,350.5").unwrap();
        cfg.set("targets", "300:0.3,450:0.5").unwrap();
        cfg.set("max_arrivals", "12").unwrap();
        cfg.set("hop_mode", "residual").unwrap();
        cfg.set("t_slot_us", "7").unwrap();
        let text: String = cfg
            .entries()
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect();
        let back = ExperimentConfig::parse(Some(&text), &[]).unwrap();
        assert_eq!(back.entries(), cfg.entries());
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let cfg = ExperimentConfig::parse(Some("\n  # hi\nseed = 9 # trailing\n\n"), &[]).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.fogcell.seed, 9);
    }
}
