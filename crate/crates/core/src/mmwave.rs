//! 60 GHz vehicle-to-vehicle link budget.
//!
//! A hop of length `δ` succeeds when the shadowed path loss
//! `PL(δ) = 69.6 + 20.9·log10(δ) + ξ`, with `ξ ~ N(0, σ²)` in dB, does not
//! exceed `P_tx − θ − N0·W` (all in dB). Interference is not modelled.
//! Beyond `range_max_m` the hop always fails.
//!
//! The standard normal CDF uses the series
//! `Φ(x) = ½ + φ(x)·(x + x³/3 + x⁵/(3·5) + …)` for `|x| < 7`, whose terms
//! are all of one sign, and the continued fraction
//! `Φ(−t) = φ(t) / (t + 1/(t + 2/(t + 3/(t + …))))` in the tails. Both are
//! accurate to well below `1e-12` absolute.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{require_positive, Error, Result};
use crate::rng;

/// Intercept of the mean path-loss model, dB.
pub const PATH_LOSS_INTERCEPT_DB: f64 = 69.6;
/// Slope of the mean path-loss model, dB per decade of distance.
pub const PATH_LOSS_SLOPE_DB: f64 = 20.9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkParams {
    /// Transmit power, dBm.
    pub p_tx_dbm: f64,
    /// Receiver SNR threshold, dB.
    pub theta_db: f64,
    /// Shadowing standard deviation, dB.
    pub sigma_db: f64,
    /// Noise power spectral density, dBm/Hz.
    pub n0_dbm_per_hz: f64,
    /// Link bandwidth, Hz.
    pub w_hz: f64,
    /// Hard range cap, m.
    pub range_max_m: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            p_tx_dbm: 30.0,
            theta_db: 10.0,
            sigma_db: 5.8,
            n0_dbm_per_hz: -174.0,
            w_hz: 2.0e9,
            range_max_m: 50.0,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("w_hz", self.w_hz)?;
        require_positive("range_max_m", self.range_max_m)?;
        if !(self.sigma_db.is_finite() && self.sigma_db >= 0.0) {
            return Err(Error::invalid(
                "sigma_db",
                format!("must be >= 0, got {}", self.sigma_db),
            ));
        }
        for (name, v) in [
            ("p_tx_dbm", self.p_tx_dbm),
            ("theta_db", self.theta_db),
            ("n0_dbm_per_hz", self.n0_dbm_per_hz),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    /// `P_tx − θ`, the only combination of the two that affects the link.
    pub fn budget_offset_db(&self) -> f64 {
        self.p_tx_dbm - self.theta_db
    }
}

/// Thermal noise over the link bandwidth, `N0 + 10·log10(W)`.
pub fn noise_floor_dbm(params: &LinkParams) -> Result<f64> {
    require_positive("w_hz", params.w_hz)?;
    Ok(params.n0_dbm_per_hz + 10.0 * params.w_hz.log10())
}

/// Mean path loss (no shadowing) at `delta_m` metres.
pub fn path_loss_mean_db(delta_m: f64) -> Result<f64> {
    require_positive("delta_m", delta_m)?;
    Ok(PATH_LOSS_INTERCEPT_DB + PATH_LOSS_SLOPE_DB * delta_m.log10())
}

/// Headroom left for shadowing: the hop succeeds iff `ξ ≤ margin`.
pub fn link_margin_db(delta_m: f64, params: &LinkParams) -> Result<f64> {
    let noise = noise_floor_dbm(params)?;
    let pl = path_loss_mean_db(delta_m)?;
    Ok(params.p_tx_dbm - params.theta_db - noise - pl)
}

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let t = x.abs();
    if t < 7.0 {
        let x2 = x * x;
        let (mut term, mut sum) = (x, x);
        let mut denom = 1.0;
        loop {
            denom += 2.0;
            term *= x2 / denom;
            let next = sum + term;
            if next == sum {
                break;
            }
            sum = next;
        }
        return 0.5 + normal_pdf(x) * sum;
    }
    // Evaluated bottom-up; 80 levels is far past convergence for t >= 7.
    let mut frac = t;
    for k in (1..=80).rev() {
        frac = t + k as f64 / frac;
    }
    let tail = normal_pdf(t) / frac;
    if x > 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Closed-form per-hop success probability, `Φ(margin / σ)`.
pub fn p_hop_analytic(delta_m: f64, params: &LinkParams) -> Result<f64> {
    params.validate()?;
    require_positive("delta_m", delta_m)?;
    if delta_m > params.range_max_m {
        return Ok(0.0);
    }
    let margin = link_margin_db(delta_m, params)?;
    if params.sigma_db == 0.0 {
        return Ok(if margin >= 0.0 { 1.0 } else { 0.0 });
    }
    Ok(normal_cdf(margin / params.sigma_db))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    /// Normal-approximation 95% half-width, `1.96·sqrt(p(1−p)/n)`.
    pub ci95_halfwidth: f64,
    pub trials: u64,
}

/// Sampled per-hop success probability.
///
/// Trial `i` draws its shadowing value from stream `(seed, "shadowing", i)`,
/// so the estimate does not depend on how trials are scheduled.
pub fn p_hop_monte_carlo(
    delta_m: f64,
    params: &LinkParams,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    params.validate()?;
    require_positive("delta_m", delta_m)?;
    if trials == 0 {
        return Err(Error::invalid("trials", "must be >= 1"));
    }
    let successes = if delta_m > params.range_max_m {
        0
    } else {
        let mean_pl = path_loss_mean_db(delta_m)?;
        let threshold = params.p_tx_dbm - params.theta_db - noise_floor_dbm(params)?;
        let sigma = params.sigma_db;
        (0..trials)
            .into_par_iter()
            .filter(|&i| {
                let z: f64 = rng::stream(seed, rng::SHADOWING, i).sample(StandardNormal);
                mean_pl + sigma * z <= threshold
            })
            .count() as u64
    };
    let n = trials as f64;
    let p = successes as f64 / n;
    Ok(MonteCarloEstimate {
        estimate: p,
        ci95_halfwidth: 1.96 * (p * (1.0 - p) / n).sqrt(),
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn noise_floor_examples() {
        let mut p = LinkParams::default();
        assert!(close(
            noise_floor_dbm(&p).unwrap(),
            -80.98970004336019,
            1e-12
        ));
        p.w_hz = 1.0;
        assert_eq!(noise_floor_dbm(&p).unwrap(), -174.0);
        p.n0_dbm_per_hz = -100.0;
        p.w_hz = 10.0;
        assert_eq!(noise_floor_dbm(&p).unwrap(), -90.0);
        p.w_hz = 0.0;
        assert!(noise_floor_dbm(&p).is_err());
    }

    #[test]
    fn path_loss_examples() {
        assert_eq!(path_loss_mean_db(1.0).unwrap(), 69.6);
        assert!(close(path_loss_mean_db(10.0).unwrap(), 90.5, 1e-12));
        assert!(close(
            path_loss_mean_db(50.0).unwrap(),
            105.10847309062278,
            1e-11
        ));
        assert!(path_loss_mean_db(0.0).is_err());
        assert!(path_loss_mean_db(-3.0).is_err());
    }

    #[test]
    fn margin_examples() {
        let p = LinkParams::default();
        assert!(close(
            link_margin_db(10.0, &p).unwrap(),
            10.48970004336019,
            1e-11
        ));
        let d = link_margin_db(7.0, &p).unwrap() - link_margin_db(14.0, &p).unwrap();
        assert!(close(d, 6.291526909377207, 1e-11));
        let mut prev = f64::INFINITY;
        for i in 1..=100 {
            let m = link_margin_db(i as f64 * 0.5, &p).unwrap();
            assert!(m < prev);
            prev = m;
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn normal_cdf_matches_high_precision_values() {
        // Reference values computed with 30-digit arithmetic.
        let refs = [
            (1.0, 0.841344746068542948585),
            (0.5, 0.691462461274013103638),
            (-1.3, 0.0968004845856103255417),
            (2.5, 0.993790334674223864833),
            (-4.0, 0.0000316712418331199212538),
            (3.0, 0.998650101968369905473),
            (0.0, 0.5),
            (6.9, 0.999999999997399873034),
            (-7.5, 3.19089167291089622777e-14),
            (9.0, 1.0),
            (-40.0, 0.0),
        ];
        for (x, want) in refs {
            assert!(close(normal_cdf(x), want, 1e-13), "Φ({x})");
        }
    }

    #[test]
    fn p_hop_edge_cases() {
        let p = LinkParams::default();
        assert_eq!(p_hop_analytic(60.0, &p).unwrap(), 0.0);
        assert!(p_hop_analytic(0.0, &p).is_err());

        // Pick P_tx so the margin at 10 m is exactly zero, then σ.
        let zero_margin = LinkParams {
            p_tx_dbm: p.p_tx_dbm - link_margin_db(10.0, &p).unwrap(),
            ..p
        };
        assert!(close(
            p_hop_analytic(10.0, &zero_margin).unwrap(),
            0.5,
            1e-12
        ));

        let one_sigma = LinkParams {
            p_tx_dbm: zero_margin.p_tx_dbm + 5.8,
            sigma_db: 5.8,
            ..p
        };
        assert!(close(
            p_hop_analytic(10.0, &one_sigma).unwrap(),
            0.841344746068543,
            1e-12
        ));

        let no_shadow = LinkParams { sigma_db: 0.0, ..p };
        assert_eq!(p_hop_analytic(10.0, &no_shadow).unwrap(), 1.0);
        assert_eq!(
            p_hop_analytic(
                50.0,
                &LinkParams {
                    p_tx_dbm: -20.0,
                    ..no_shadow
                }
            )
            .unwrap(),
            0.0
        );
    }

    #[test]
    fn monte_carlo_short_circuits() {
        let p = LinkParams::default();
        let far = p_hop_monte_carlo(75.0, &p, 1000, 1).unwrap();
        assert_eq!(far.estimate, 0.0);
        let sure = p_hop_monte_carlo(10.0, &LinkParams { sigma_db: 0.0, ..p }, 1000, 1).unwrap();
        assert_eq!(sure.estimate, 1.0);
        assert_eq!(sure.ci95_halfwidth, 0.0);
        assert!(p_hop_monte_carlo(10.0, &p, 0, 1).is_err());
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let p = LinkParams::default();
        let a = p_hop_monte_carlo(30.0, &p, 5000, 99).unwrap();
        let b = p_hop_monte_carlo(30.0, &p, 5000, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn monte_carlo_within_three_sigma() {
        let p = LinkParams::default();
        for delta in [12.0, 25.0, 40.0] {
            let want = p_hop_analytic(delta, &p).unwrap();
            let got = p_hop_monte_carlo(delta, &p, 100_000, 5).unwrap();
            let bound = 3.0 * (want * (1.0 - want) / 1e5).sqrt();
            assert!((got.estimate - want).abs() <= bound, "δ={delta}");
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = LinkParams {
            sigma_db: -1.0,
            ..LinkParams::default()
        };
        assert!(p_hop_analytic(10.0, &bad).is_err());
        let bad = LinkParams {
            range_max_m: 0.0,
            ..LinkParams::default()
        };
        assert!(p_hop_analytic(10.0, &bad).is_err());
    }
}
