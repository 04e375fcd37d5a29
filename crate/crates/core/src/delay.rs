//! Expected end-to-end relay delay inside a fog cell.
//!
//! A packet crosses `k` hops. Each hop retries once per slot until it
//! succeeds, so its expected duration is `t_slot / P_hop`. Every relay
//! vehicle (all but the source) adds a fixed retransmission/processing time:
//!
//! ```text
//! T = Σ t_slot / P_hop(δ_i) + (k − 1)·t_retran
//! ```
//!
//! Sweeping `T` over vehicle density gives a U-shaped curve: sparse roads
//! have long, lossy hops; dense roads have many short hops, each paying
//! `t_retran`.

use rayon::prelude::*;

use crate::error::{require_positive, Error, Result};
use crate::mmwave::{p_hop_analytic, LinkParams};
use crate::topology::{build_hop_chain, HopMode};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayParams {
    pub t_slot_s: f64,
    pub t_retran_s: f64,
}

impl Default for DelayParams {
    fn default() -> Self {
        Self {
            t_slot_s: 5e-6,
            t_retran_s: 5e-6,
        }
    }
}

impl DelayParams {
    pub fn validate(&self) -> Result<()> {
        require_positive("t_slot_s", self.t_slot_s)?;
        require_positive("t_retran_s", self.t_retran_s)
    }

    /// Delay of a `k`-hop chain whose hops never fail.
    pub fn lower_bound_s(&self, k: usize) -> f64 {
        k as f64 * self.t_slot_s + k.saturating_sub(1) as f64 * self.t_retran_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelayResult {
    pub k: usize,
    pub per_hop_p: Vec<f64>,
    /// `None` when some hop can never succeed.
    pub delay_s: Option<f64>,
}

impl DelayResult {
    pub fn reachable(&self) -> bool {
        self.delay_s.is_some()
    }
}

pub fn expected_delay(
    l_a_m: f64,
    rho: f64,
    link: &LinkParams,
    dp: &DelayParams,
    mode: HopMode,
) -> Result<DelayResult> {
    dp.validate()?;
    let chain = build_hop_chain(l_a_m, rho, mode)?;
    let k = chain.k();
    let retran = (k - 1) as f64 * dp.t_retran_s;

    let (per_hop_p, delay_s) = match mode {
        HopMode::Homogeneous => {
            let p = p_hop_analytic(chain.hop_lengths_m[0], link)?;
            let delay = (p > 0.0).then(|| k as f64 * dp.t_slot_s / p + retran);
            (vec![p; k], delay)
        }
        HopMode::Residual => {
            let ps = chain
                .hop_lengths_m
                .iter()
                .map(|&d| p_hop_analytic(d, link))
                .collect::<Result<Vec<_>>>()?;
            let delay = ps
                .iter()
                .all(|&p| p > 0.0)
                .then(|| ps.iter().map(|&p| dp.t_slot_s / p).sum::<f64>() + retran);
            (ps, delay)
        }
    };
    Ok(DelayResult {
        k,
        per_hop_p,
        delay_s,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub rho: f64,
    pub result: DelayResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurve {
    pub l_a_m: f64,
    pub points: Vec<SweepPoint>,
}

pub fn sweep_density(
    l_a_m: f64,
    rho_grid: &[f64],
    link: &LinkParams,
    dp: &DelayParams,
    mode: HopMode,
) -> Result<SweepCurve> {
    if rho_grid.is_empty() {
        return Err(Error::invalid("rho_grid", "must not be empty"));
    }
    if rho_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("rho_grid", "must be strictly increasing"));
    }
    let points = rho_grid
        .iter()
        .map(|&rho| {
            expected_delay(l_a_m, rho, link, dp, mode).map(|result| SweepPoint { rho, result })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepCurve { l_a_m, points })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoint {
    pub index: usize,
    pub rho: f64,
    pub delay_s: f64,
}

/// Reachable grid point of least delay; ties go to the smaller density.
pub fn find_turning_point(curve: &SweepCurve) -> Result<TurningPoint> {
    let mut best: Option<TurningPoint> = None;
    for (index, pt) in curve.points.iter().enumerate() {
        let Some(delay_s) = pt.result.delay_s else {
            continue;
        };
        if best.map_or(true, |b| delay_s < b.delay_s) {
            best = Some(TurningPoint {
                index,
                rho: pt.rho,
                delay_s,
            });
        }
    }
    best.ok_or(Error::NoReachablePoint)
}

/// Inclusive arithmetic grid `min, min + step, ..., ≤ max`.
pub fn linear_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    require_positive("step", step)?;
    if !(min.is_finite() && max.is_finite()) || min > max {
        return Err(Error::invalid(
            "grid",
            format!("need min <= max, got {min} > {max}"),
        ));
    }
    let n = ((max - min) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| min + i as f64 * step).collect())
}

/// Search box for [`calibrate`]. `offset` is `P_tx − θ` in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationGrid {
    pub offset_min_db: f64,
    pub offset_max_db: f64,
    pub offset_step_db: f64,
    pub sigma_min_db: f64,
    pub sigma_max_db: f64,
    pub sigma_step_db: f64,
}

impl Default for CalibrationGrid {
    fn default() -> Self {
        Self {
            offset_min_db: 5.0,
            offset_max_db: 25.0,
            offset_step_db: 0.5,
            sigma_min_db: 2.0,
            sigma_max_db: 10.0,
            sigma_step_db: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationTarget {
    pub l_a_m: f64,
    pub delay_min_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetFit {
    pub target: CalibrationTarget,
    /// `(found − target) / target`; infinite when the curve is unreachable.
    pub relative_residual: f64,
    pub turning_point: Option<TurningPoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    /// The input link with `p_tx_dbm` moved so that `P_tx − θ` equals the fit.
    pub link: LinkParams,
    pub offset_db: f64,
    pub sigma_db: f64,
    pub max_abs_residual: f64,
    pub fits: Vec<TargetFit>,
}

fn fit_targets(
    targets: &[CalibrationTarget],
    link: &LinkParams,
    dp: &DelayParams,
    rho_grid: &[f64],
    mode: HopMode,
) -> Result<(f64, Vec<TargetFit>)> {
    let mut worst = 0.0f64;
    let mut fits = Vec::with_capacity(targets.len());
    for &target in targets {
        let curve = sweep_density(target.l_a_m, rho_grid, link, dp, mode)?;
        let turning_point = find_turning_point(&curve).ok();
        let relative_residual = turning_point.map_or(f64::INFINITY, |tp| {
            (tp.delay_s - target.delay_min_s) / target.delay_min_s
        });
        worst = worst.max(relative_residual.abs());
        fits.push(TargetFit {
            target,
            relative_residual,
            turning_point,
        });
    }
    Ok((worst, fits))
}

/// Exhaustive fit of `(P_tx − θ, σ)` to a set of curve minima.
///
/// Candidates are visited offset-major, sigma-minor; the first candidate
/// with the smallest worst-case relative residual wins.
pub fn calibrate(
    targets: &[CalibrationTarget],
    grid: &CalibrationGrid,
    base_link: &LinkParams,
    dp: &DelayParams,
    rho_grid: &[f64],
    mode: HopMode,
) -> Result<Calibration> {
    if targets.is_empty() {
        return Err(Error::invalid("targets", "must not be empty"));
    }
    for t in targets {
        require_positive("target l_a_m", t.l_a_m)?;
        require_positive("target delay_min_s", t.delay_min_s)?;
    }
    base_link.validate()?;
    let offsets = linear_grid(grid.offset_min_db, grid.offset_max_db, grid.offset_step_db)?;
    let sigmas = linear_grid(grid.sigma_min_db, grid.sigma_max_db, grid.sigma_step_db)?;
    if sigmas[0] < 0.0 {
        return Err(Error::invalid("sigma_min_db", "must be >= 0"));
    }
    let candidates: Vec<(f64, f64)> = offsets
        .iter()
        .flat_map(|&o| sigmas.iter().map(move |&s| (o, s)))
        .collect();

    let link_for = |offset: f64, sigma: f64| LinkParams {
        p_tx_dbm: base_link.theta_db + offset,
        sigma_db: sigma,
        ..*base_link
    };
    let scores = candidates
        .par_iter()
        .map(|&(o, s)| fit_targets(targets, &link_for(o, s), dp, rho_grid, mode).map(|r| r.0))
        .collect::<Result<Vec<f64>>>()?;

    let mut best = 0;
    for (i, &score) in scores.iter().enumerate() {
        if score < scores[best] {
            best = i;
        }
    }
    if !scores[best].is_finite() {
        return Err(Error::NoReachablePoint);
    }
    let (offset_db, sigma_db) = candidates[best];
    let link = link_for(offset_db, sigma_db);
    let (max_abs_residual, fits) = fit_targets(targets, &link, dp, rho_grid, mode)?;
    Ok(Calibration {
        link,
        offset_db,
        sigma_db,
        max_abs_residual,
        fits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perfect_link() -> LinkParams {
        LinkParams {
            p_tx_dbm: 200.0,
            sigma_db: 0.0,
            ..LinkParams::default()
        }
    }

    #[test]
    fn perfect_hops_give_lower_bound() {
        let dp = DelayParams::default();
        let r = expected_delay(300.0, 0.08, &perfect_link(), &dp, HopMode::Homogeneous).unwrap();
        assert_eq!(r.k, 24);
        assert_eq!(r.delay_s, Some(24.0 * 5e-6 + 23.0 * 5e-6));
        assert!((r.delay_s.unwrap() - 235e-6).abs() < 1e-18);
    }

    #[test]
    fn sparse_road_is_unreachable() {
        let r = expected_delay(
            300.0,
            0.01,
            &LinkParams::default(),
            &DelayParams::default(),
            HopMode::Homogeneous,
        )
        .unwrap();
        assert!(!r.reachable());
        assert!(r.per_hop_p.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn single_hop_has_no_retransmission() {
        let link = LinkParams::default();
        let dp = DelayParams::default();
        let r = expected_delay(20.0, 0.04, &link, &dp, HopMode::Homogeneous).unwrap();
        assert_eq!(r.k, 1);
        let p = p_hop_analytic(25.0, &link).unwrap();
        assert_eq!(r.delay_s, Some(dp.t_slot_s / p));
    }

    #[test]
    fn residual_mode_sums_per_hop() {
        let link = LinkParams::default();
        let dp = DelayParams::default();
        let r = expected_delay(110.0, 0.03, &link, &dp, HopMode::Residual).unwrap();
        assert_eq!(r.k, 4);
        let p_full = p_hop_analytic(100.0 / 3.0, &link).unwrap();
        let p_last = p_hop_analytic(110.0 - 100.0, &link).unwrap();
        assert!(p_last > p_full);
        let want = 3.0 * dp.t_slot_s / p_full + dp.t_slot_s / p_last + 3.0 * dp.t_retran_s;
        assert!((r.delay_s.unwrap() - want).abs() <= 1e-15);
    }

    #[test]
    fn sweep_rejects_bad_grids() {
        let (l, d) = (LinkParams::default(), DelayParams::default());
        assert!(sweep_density(300.0, &[], &l, &d, HopMode::Homogeneous).is_err());
        assert!(sweep_density(300.0, &[0.1, 0.1], &l, &d, HopMode::Homogeneous).is_err());
        assert!(sweep_density(300.0, &[0.2, 0.1], &l, &d, HopMode::Homogeneous).is_err());
        let c = sweep_density(300.0, &[0.1], &l, &d, HopMode::Homogeneous).unwrap();
        assert_eq!(c.points.len(), 1);
    }

    fn curve_of(delays: &[Option<f64>]) -> SweepCurve {
        SweepCurve {
            l_a_m: 1.0,
            points: delays
                .iter()
                .enumerate()
                .map(|(i, &delay_s)| SweepPoint {
                    rho: 0.1 * (i + 1) as f64,
                    result: DelayResult {
                        k: 1,
                        per_hop_p: vec![1.0],
                        delay_s,
                    },
                })
                .collect(),
        }
    }

    #[test]
    fn turning_point_rules() {
        let tp = find_turning_point(&curve_of(&[Some(1.0), Some(2.0), Some(3.0)])).unwrap();
        assert_eq!(tp.index, 0);
        let tp = find_turning_point(&curve_of(&[None, Some(3.0), Some(1.0), Some(1.0)])).unwrap();
        assert_eq!(tp.index, 2);
        assert_eq!(
            find_turning_point(&curve_of(&[None, None])),
            Err(Error::NoReachablePoint)
        );
    }

    #[test]
    fn linear_grid_is_inclusive() {
        let g = linear_grid(0.03, 0.20, 0.005).unwrap();
        assert_eq!(g.len(), 35);
        assert!((g[34] - 0.20).abs() < 1e-12);
        assert_eq!(linear_grid(2.0, 2.0, 0.5).unwrap(), vec![2.0]);
        assert!(linear_grid(1.0, 0.0, 0.5).is_err());
        assert!(linear_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn degenerate_calibration_grid() {
        let grid = CalibrationGrid {
            offset_min_db: 12.0,
            offset_max_db: 12.0,
            sigma_min_db: 6.0,
            sigma_max_db: 6.0,
            ..CalibrationGrid::default()
        };
        let targets = [CalibrationTarget {
            l_a_m: 300.0,
            delay_min_s: 0.32e-3,
        }];
        let rho = linear_grid(0.03, 0.2, 0.005).unwrap();
        let cal = calibrate(
            &targets,
            &grid,
            &LinkParams::default(),
            &DelayParams::default(),
            &rho,
            HopMode::Homogeneous,
        )
        .unwrap();
        assert_eq!((cal.offset_db, cal.sigma_db), (12.0, 6.0));
        assert_eq!(cal.link.p_tx_dbm - cal.link.theta_db, 12.0);
        assert_eq!(cal.fits.len(), 1);
        assert!(cal.fits[0].turning_point.is_some());
    }

    #[test]
    fn calibration_needs_targets() {
        let rho = [0.1];
        assert!(calibrate(
            &[],
            &CalibrationGrid::default(),
            &LinkParams::default(),
            &DelayParams::default(),
            &rho,
            HopMode::Homogeneous
        )
        .is_err());
    }
}
