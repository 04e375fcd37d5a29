//! Vehicle placement and relay-chain decomposition.
//!
//! Vehicles sit on a single lane. With density `ρ` (vehicles per metre) and
//! nearest-neighbour relaying, a source `L_a` metres from the RSU needs
//! `k = ceil(L_a·ρ)` hops of nominal length `1/ρ`.

use rand_distr::{Distribution, Exp};

use crate::error::{require_positive, Error, Result};
use crate::rng;

/// Relative tolerance used to absorb representation error before rounding
/// a product such as `L_a·ρ` up or down to an integer.
const SNAP_EPS: f64 = 1e-9;

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= SNAP_EPS * x.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// `ceil(x)` that treats values within rounding noise of an integer as that
/// integer, so `300 × 0.07` gives 21 rather than 22.
pub fn snapped_ceil(x: f64) -> u64 {
    snap(x).ceil().max(0.0) as u64
}

/// `floor(x)` with the same snapping as [`snapped_ceil`].
pub fn snapped_floor(x: f64) -> u64 {
    snap(x).floor().max(0.0) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    Equidistant,
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadTopology {
    pub length_m: f64,
    pub density_veh_per_m: f64,
    pub placement: Placement,
    /// Only used by [`Placement::Poisson`].
    pub seed: u64,
}

/// Vehicle positions on `(0, L]`, ascending.
pub fn place_vehicles(topology: &RoadTopology) -> Result<Vec<f64>> {
    require_positive("length_m", topology.length_m)?;
    require_positive("density_veh_per_m", topology.density_veh_per_m)?;
    let rho = topology.density_veh_per_m;
    match topology.placement {
        Placement::Equidistant => {
            let count = snapped_floor(topology.length_m * rho);
            Ok((1..=count).map(|i| i as f64 / rho).collect())
        }
        Placement::Poisson => {
            let gap =
                Exp::new(rho).map_err(|e| Error::invalid("density_veh_per_m", e.to_string()))?;
            let mut out = Vec::new();
            let mut x = 0.0;
            for i in 0.. {
                x += gap.sample(&mut rng::stream(topology.seed, rng::PLACEMENT, i));
                if x > topology.length_m {
                    break;
                }
                out.push(x);
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HopMode {
    /// Every hop has length `1/ρ`.
    #[default]
    Homogeneous,
    /// The last hop covers only what is left of `L_a`.
    Residual,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HopChain {
    pub hop_lengths_m: Vec<f64>,
}

impl HopChain {
    pub fn k(&self) -> usize {
        self.hop_lengths_m.len()
    }

    pub fn total_length_m(&self) -> f64 {
        self.hop_lengths_m.iter().sum()
    }
}

pub fn build_hop_chain(l_a_m: f64, density_veh_per_m: f64, mode: HopMode) -> Result<HopChain> {
    require_positive("l_a_m", l_a_m)?;
    require_positive("density_veh_per_m", density_veh_per_m)?;
    let spacing = 1.0 / density_veh_per_m;
    let k = snapped_ceil(l_a_m * density_veh_per_m).max(1) as usize;
    let mut hops = vec![spacing; k];
    if mode == HopMode::Residual {
        let last = l_a_m - (k - 1) as f64 * spacing;
        hops[k - 1] = if last > 0.0 { last } else { spacing };
    }
    Ok(HopChain {
        hop_lengths_m: hops,
    })
}
