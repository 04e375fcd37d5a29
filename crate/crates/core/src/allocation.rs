//! Bandwidth allocation inside a fog cell.
//!
//! Every vehicle draws a demand `B_i ~ U(0, 2·B_ave)`. Throughput is
//! proportional to allocated bandwidth (equal SNR, no interference), so a
//! cell with bandwidth `B` and peak throughput `C` turns an allocation of
//! `b` into `(C/B)·b` Mbps.
//!
//! The traditional scheme hands each vehicle at most `B_ave`; unused share
//! is wasted. The adaptive scheme pools the whole `B` and serves
//! `min(ΣB_i, B)` in total.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{require_positive, Error, Result};
use crate::rng;
use crate::topology::snapped_floor;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellCapacity {
    /// Available bandwidth `B` in abstract units.
    pub b_total: f64,
    /// Peak cell throughput `C`, Mbps.
    pub c_total_mbps: f64,
    /// Mean per-vehicle requirement `B_ave`.
    pub b_ave: f64,
    /// Throughput at `B_ave`, Mbps.
    pub c_ave_mbps: f64,
}

impl CellCapacity {
    /// Builds a cell with `B = 1` and `B_ave = (C_ave / C)·B`.
    pub fn new(c_total_mbps: f64, c_ave_mbps: f64) -> Result<Self> {
        require_positive("c_total_mbps", c_total_mbps)?;
        require_positive("c_ave_mbps", c_ave_mbps)?;
        if c_ave_mbps > c_total_mbps {
            return Err(Error::invalid(
                "c_ave_mbps",
                format!("must not exceed c_total_mbps ({c_total_mbps}), got {c_ave_mbps}"),
            ));
        }
        let b_total = 1.0;
        Ok(Self {
            b_total,
            c_total_mbps,
            b_ave: c_ave_mbps / c_total_mbps * b_total,
            c_ave_mbps,
        })
    }

    /// Mbps per bandwidth unit.
    pub fn mbps_per_unit(&self) -> f64 {
        self.c_total_mbps / self.b_total
    }

    /// How many vehicles the traditional scheme can hold at `B_ave` each.
    pub fn traditional_slots(&self) -> usize {
        snapped_floor(self.b_total / self.b_ave) as usize
    }
}

impl Default for CellCapacity {
    fn default() -> Self {
        Self::new(1000.0, 33.0).expect("default capacity is valid")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandProfile {
    pub demands: Vec<f64>,
    pub seed: u64,
}

impl DemandProfile {
    pub fn n(&self) -> usize {
        self.demands.len()
    }

    /// Vehicles asking for less than the average share.
    pub fn below_average(&self, capacity: &CellCapacity) -> usize {
        self.demands.iter().filter(|&&b| b < capacity.b_ave).count()
    }
}

fn draw_demands<R: Rng>(n: usize, capacity: &CellCapacity, rng: &mut R) -> Vec<f64> {
    let hi = 2.0 * capacity.b_ave;
    (0..n).map(|_| rng.random::<f64>() * hi).collect()
}

/// `n` demands from stream `(seed, "demands", 0)`.
pub fn sample_demands(n: usize, capacity: &CellCapacity, seed: u64) -> DemandProfile {
    let mut rng = rng::stream(seed, rng::DEMANDS, 0);
    DemandProfile {
        demands: draw_demands(n, capacity, &mut rng),
        seed,
    }
}

pub(crate) fn sample_demands_from<R: Rng>(
    n: usize,
    capacity: &CellCapacity,
    rng: &mut R,
    seed: u64,
) -> DemandProfile {
    DemandProfile {
        demands: draw_demands(n, capacity, rng),
        seed,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationOutcome {
    pub per_vehicle_alloc: Vec<f64>,
    pub total_alloc: f64,
    pub throughput_mbps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Traditional,
    Adaptive,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Traditional => "traditional",
            Scheme::Adaptive => "adaptive",
        }
    }

    pub fn allocate(self, profile: &DemandProfile, capacity: &CellCapacity) -> AllocationOutcome {
        match self {
            Scheme::Traditional => allocate_traditional(profile, capacity),
            Scheme::Adaptive => allocate_adaptive(profile, capacity),
        }
    }
}

/// Capped average allocation.
///
/// The first `floor(B / B_ave)` vehicles (in index order) each receive
/// `min(B_i, B_ave)`; the rest receive nothing.
pub fn allocate_traditional(profile: &DemandProfile, capacity: &CellCapacity) -> AllocationOutcome {
    let slots = capacity.traditional_slots();
    let per_vehicle_alloc: Vec<f64> = profile
        .demands
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            if i < slots {
                b.min(capacity.b_ave)
            } else {
                0.0
            }
        })
        .collect();
    let total_alloc: f64 = per_vehicle_alloc.iter().sum();
    AllocationOutcome {
        per_vehicle_alloc,
        total_alloc,
        throughput_mbps: capacity.mbps_per_unit() * total_alloc,
    }
}

/// Pooled allocation; demands are scaled down proportionally when the cell
/// is oversubscribed.
pub fn allocate_adaptive(profile: &DemandProfile, capacity: &CellCapacity) -> AllocationOutcome {
    let requested: f64 = profile.demands.iter().sum();
    let (per_vehicle_alloc, total_alloc) = if requested <= capacity.b_total {
        (profile.demands.clone(), requested)
    } else {
        let scale = capacity.b_total / requested;
        (
            profile.demands.iter().map(|&b| b * scale).collect(),
            capacity.b_total,
        )
    };
    AllocationOutcome {
        per_vehicle_alloc,
        total_alloc,
        throughput_mbps: capacity.mbps_per_unit() * total_alloc,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputEstimate {
    pub mean_mbps: f64,
    /// Normal-approximation 95% half-width.
    pub ci95_mbps: f64,
    pub trials: u64,
}

/// Monte-Carlo mean cell throughput for `n` vehicles.
///
/// Trial `t` draws its profile from stream `(seed, "demands", t)`. The same
/// trial therefore sees the same leading demands for every `n` and for both
/// schemes (common random numbers), which makes scheme and `n` comparisons
/// pathwise.
pub fn mean_throughput(
    scheme: Scheme,
    n: usize,
    capacity: &CellCapacity,
    trials: u64,
    seed: u64,
) -> Result<ThroughputEstimate> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be >= 1"));
    }
    let samples: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::stream(seed, rng::DEMANDS, t);
            let profile = sample_demands_from(n, capacity, &mut rng, seed);
            scheme.allocate(&profile, capacity).throughput_mbps
        })
        .collect();
    let count = trials as f64;
    let mean = samples.iter().sum::<f64>() / count;
    let var = if trials > 1 {
        samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0)
    } else {
        0.0
    };
    Ok(ThroughputEstimate {
        mean_mbps: mean,
        ci95_mbps: 1.96 * (var / count).sqrt(),
        trials,
    })
}
