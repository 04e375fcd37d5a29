use fogcell::sim::run;
use fogcell::{calibrate, find_turning_point, mean_throughput, sweep_density, Calibration, Scheme};

use crate::config::ExperimentConfig;
use crate::output::{header, sig6};
use crate::CliError;

/// Text produced by a command plus a model failure that should set the exit
/// status even though output was written.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub text: String,
    pub model_error: Option<String>,
}

pub const DELAY_COLUMNS: &str = "la_m,rho_veh_per_m,k,p_hop,delay_ms,reachable";
pub const THROUGHPUT_COLUMNS: &str = "n,scheme,mean_throughput_mbps,ci95_mbps,trials,seed";

/// Delay-versus-density curves, one block per `L_a`.
///
/// Unreachable points leave `delay_ms` empty. Each block ends with a
/// `# turning_point ...` line.
pub fn delay_sweep(cfg: &ExperimentConfig) -> Result<CommandOutput, CliError> {
    let rho = cfg.rho_grid();
    let dp = cfg.delay_params();
    let mut text = header("delay-sweep", cfg);
    text.push_str(DELAY_COLUMNS);
    text.push('\n');
    let mut unreachable = Vec::new();
    for &la in &cfg.la_list {
        let curve = sweep_density(la, &rho, &cfg.link, &dp, cfg.hop_mode)?;
        for pt in &curve.points {
            let r = &pt.result;
            text.push_str(&format!(
                "{},{},{},{},{},{}\n",
                sig6(la),
                sig6(pt.rho),
                r.k,
                sig6(r.per_hop_p[0]),
                r.delay_s.map(|d| sig6(d * 1e3)).unwrap_or_default(),
                r.reachable(),
            ));
        }
        match find_turning_point(&curve) {
            Ok(tp) => text.push_str(&format!(
                "# turning_point la_m={} rho_veh_per_m={} delay_ms={}\n",
                sig6(la),
                sig6(tp.rho),
                sig6(tp.delay_s * 1e3)
            )),
            Err(_) => {
                text.push_str(&format!("# turning_point la_m={} none\n", sig6(la)));
                unreachable.push(sig6(la));
            }
        }
    }
    let model_error = (!unreachable.is_empty())
        .then(|| format!("no reachable density for la_m={}", unreachable.join(",")));
    Ok(CommandOutput { text, model_error })
}

/// Mean throughput of both schemes for `n = 1..=n_max`.
pub fn throughput(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let capacity = cfg.capacity();
    let mut text = header("throughput", cfg);
    text.push_str(THROUGHPUT_COLUMNS);
    text.push('\n');
    for n in 1..=cfg.n_max {
        for scheme in [Scheme::Traditional, Scheme::Adaptive] {
            let est = mean_throughput(scheme, n, &capacity, cfg.trials, cfg.seed)?;
            text.push_str(&format!(
                "{n},{},{},{},{},{}\n",
                scheme.name(),
                sig6(est.mean_mbps),
                sig6(est.ci95_mbps),
                est.trials,
                cfg.seed
            ));
        }
    }
    Ok(text)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FogsimOutput {
    pub event_log: String,
    pub summary: String,
}

pub fn fogsim(cfg: &ExperimentConfig) -> Result<FogsimOutput, CliError> {
    let out = run(&cfg.fogcell, &cfg.link, &cfg.capacity())?;
    Ok(FogsimOutput {
        event_log: header("fogsim", cfg) + &out.event_log_csv(),
        summary: header("fogsim", cfg) + &out.summary.to_key_values(),
    })
}

pub fn run_calibration(cfg: &ExperimentConfig) -> Result<Calibration, CliError> {
    Ok(calibrate(
        &cfg.calibration_targets(),
        &cfg.cal_grid,
        &cfg.link,
        &cfg.delay_params(),
        &cfg.rho_grid(),
        cfg.hop_mode,
    )?)
}

/// Calibration report as `#` lines followed by a config fragment that
/// `delay-sweep --config` accepts.
pub fn calibrate_report(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let cal = run_calibration(cfg)?;
    let mut text = header("calibrate", cfg);
    text.push_str(&format!(
        "# best p_tx_minus_theta_db={} sigma_db={} max_abs_relative_residual={}\n",
        sig6(cal.offset_db),
        sig6(cal.sigma_db),
        sig6(cal.max_abs_residual)
    ));
    for fit in &cal.fits {
        let (rho, found) = fit
            .turning_point
            .map(|tp| (sig6(tp.rho), sig6(tp.delay_s * 1e3)))
            .unwrap_or_else(|| ("none".into(), "none".into()));
        text.push_str(&format!(
            "# target la_m={} target_ms={} found_ms={} relative_residual={} turning_point_rho={}\n",
            sig6(fit.target.l_a_m),
            sig6(fit.target.delay_min_s * 1e3),
            found,
            sig6(fit.relative_residual),
            rho
        ));
    }
    text.push_str(&format!(
        "p_tx_dbm={}\ntheta_db={}\nsigma_db={}\n",
        cal.link.p_tx_dbm, cal.link.theta_db, cal.link.sigma_db
    ));
    Ok(text)
}
