//! Models for a fog-cell vehicular network.
//!
//! A fog cell is a road-side unit (RSU) together with the group of vehicles
//! it serves. One gateway vehicle holds the RSU association; every other
//! vehicle reaches it over a 60 GHz multi-hop relay chain.
//!
//! The crate is split by concern:
//!
//! - [`mmwave`]: per-hop success probability from a path-loss + log-normal
//!   shadowing link budget, analytically and by Monte Carlo.
//! - [`topology`]: vehicle placement along the road and decomposition of a
//!   source-to-RSU distance into a relay chain.
//! - [`delay`]: expected end-to-end relay delay, density sweeps, turning
//!   point search and link-parameter calibration.
//! - [`allocation`]: traditional (capped average) and adaptive (pooled)
//!   bandwidth allocation and their Monte-Carlo throughput.
//! - [`sim`]: time-stepped mobility simulation with gateway election,
//!   handover counting and a periodic allocation loop.
//! - [`rng`]: the seeded stream-derivation contract shared by every
//!   stochastic operation.

pub mod allocation;
pub mod delay;
mod error;
pub mod mmwave;
pub mod rng;
pub mod sim;
pub mod topology;

pub use allocation::{
    allocate_adaptive, allocate_traditional, mean_throughput, sample_demands, AllocationOutcome,
    CellCapacity, DemandProfile, Scheme, ThroughputEstimate,
};
pub use delay::{
    calibrate, expected_delay, find_turning_point, sweep_density, Calibration, CalibrationGrid,
    CalibrationTarget, DelayParams, DelayResult, SweepCurve, SweepPoint, TargetFit, TurningPoint,
};
pub use error::{Error, Result};
pub use mmwave::{
    link_margin_db, noise_floor_dbm, p_hop_analytic, p_hop_monte_carlo, path_loss_mean_db,
    LinkParams, MonteCarloEstimate,
};
pub use sim::{
    select_gateway, ArrivalModel, Event, EventKind, FogCell, FogCellConfig, SimOutput, SimSummary,
    Vehicle,
};
pub use topology::{build_hop_chain, place_vehicles, HopChain, HopMode, Placement, RoadTopology};
