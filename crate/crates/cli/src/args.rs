use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "fogcell",
    version,
    about = "Fog-cell vehicular network experiments: relay delay, bandwidth allocation, gateway mobility",
    after_help = "Units: slot times in microseconds, densities in vehicles/m, delays in ms, \
                  throughput in Mbps, distances in m.\n\
                  Config files hold `key=value` lines; `#` starts a comment.\n\
                  Exit codes: 0 success, 1 usage or config error, 2 model error."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected relay delay versus vehicle density, one curve per L_a (CSV, delay in ms).
    DelaySweep(CommonArgs),
    /// Mean cell throughput of the traditional and adaptive schemes versus vehicle count (CSV, Mbps).
    Throughput(CommonArgs),
    /// Mobility simulation: event log CSV plus key=value summary.
    Fogsim {
        #[command(flatten)]
        common: CommonArgs,
        /// Write the summary here instead of stdout/stderr.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Fit P_tx - theta and sigma to target curve minima; emits a config fragment.
    Calibrate(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// `key=value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed for every random stream.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Slot duration, microseconds.
    #[arg(long, allow_hyphen_values = true)]
    pub t_slot_us: Option<String>,
    /// Smallest swept density, vehicles/m.
    #[arg(long, allow_hyphen_values = true)]
    pub rho_min: Option<String>,
    /// Largest swept density, vehicles/m.
    #[arg(long, allow_hyphen_values = true)]
    pub rho_max: Option<String>,
    /// Density step, vehicles/m.
    #[arg(long, allow_hyphen_values = true)]
    pub rho_step: Option<String>,
    /// Source-to-RSU distances L_a, m, comma separated.
    #[arg(long)]
    pub la: Option<String>,
    /// Largest vehicle count for the throughput sweep.
    #[arg(long)]
    pub n_max: Option<String>,
    /// Monte-Carlo trials per throughput point.
    #[arg(long)]
    pub trials: Option<String>,
    /// Transmit power, dBm.
    #[arg(long, allow_hyphen_values = true)]
    pub p_tx_dbm: Option<String>,
    /// SNR threshold, dB.
    #[arg(long, allow_hyphen_values = true)]
    pub theta_db: Option<String>,
    /// Shadowing standard deviation, dB.
    #[arg(long, allow_hyphen_values = true)]
    pub sigma_db: Option<String>,
    /// Any other config key, as `key=value`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl CommonArgs {
    /// Flag overrides as `(key, value)` pairs, in a fixed order.
    pub fn overrides(&self) -> Result<Vec<(String, String)>, CliError> {
        let mut out = Vec::new();
        for raw in &self.set {
            let (k, v) = raw.split_once('=').ok_or_else(|| {
                CliError::Config(crate::ConfigError::Range {
                    key: "--set".into(),
                    msg: format!("expected KEY=VALUE, got `{raw}`"),
                })
            })?;
            out.push((k.trim().to_string(), v.to_string()));
        }
        let named = [
            ("seed", self.seed.map(|s| s.to_string())),
            ("t_slot_us", self.t_slot_us.clone()),
            ("rho_min", self.rho_min.clone()),
            ("rho_max", self.rho_max.clone()),
            ("rho_step", self.rho_step.clone()),
            ("la_list", self.la.clone()),
            ("n_max", self.n_max.clone()),
            ("trials", self.trials.clone()),
            ("p_tx_dbm", self.p_tx_dbm.clone()),
            ("theta_db", self.theta_db.clone()),
            ("sigma_db", self.sigma_db.clone()),
        ];
        out.extend(
            named
                .into_iter()
                .filter_map(|(k, v)| v.map(|v| (k.to_string(), v))),
        );
        Ok(out)
    }

    pub fn load(&self) -> Result<ExperimentConfig, CliError> {
        let text = match &self.config {
            Some(path) => Some(
                std::fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.display().to_string(),
                    source,
                })?,
            ),
            None => None,
        };
        Ok(ExperimentConfig::parse(
            text.as_deref(),
            &self.overrides()?,
        )?)
    }
}
