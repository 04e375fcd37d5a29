//! Time-stepped mobility simulation of one fog cell.
//!
//! Vehicles enter the road at `x = 0`, drive in `+x` at a common speed and
//! leave past `road_len_m`. The RSU covers `|x − rsu_x| ≤ rsu_radius`.
//! One vehicle inside coverage acts as gateway for the whole cell and keeps
//! that role until it leaves coverage; the cell is connected when a gateway
//! exists and every gap between consecutive vehicles is within mmWave range.
//! A control epoch periodically re-samples demands and runs the adaptive
//! allocation over the vehicles currently on the road.
//!
//! Within one step the order is: move, exits, arrivals, coverage entries,
//! gateway departure and election, connectivity, control epoch.

use std::collections::VecDeque;
use std::fmt;

use rand_distr::{Distribution, Exp};

use crate::allocation::{allocate_adaptive, sample_demands_from, CellCapacity};
use crate::error::{require_positive, Error, Result};
use crate::mmwave::LinkParams;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vehicle {
    pub id: u64,
    pub x_m: f64,
    pub v_mps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrivalModel {
    /// One vehicle every `(1/ρ)/v` seconds, the first at `t = 0`.
    Equidistant,
    /// Exponential inter-arrival gaps with rate `ρ·v`.
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FogCellConfig {
    pub road_len_m: f64,
    pub rsu_x_m: f64,
    pub rsu_radius_m: f64,
    pub arrival_model: ArrivalModel,
    /// Density of the entering traffic, vehicles per metre.
    pub arrival_rho: f64,
    pub v_mps: f64,
    pub dt_s: f64,
    pub duration_s: f64,
    pub ctrl_period_s: f64,
    /// Stop generating arrivals after this many; `None` for no limit.
    pub max_arrivals: Option<u64>,
    pub seed: u64,
}

impl Default for FogCellConfig {
    fn default() -> Self {
        Self {
            road_len_m: 1000.0,
            rsu_x_m: 500.0,
            rsu_radius_m: 100.0,
            arrival_model: ArrivalModel::Equidistant,
            arrival_rho: 0.05,
            v_mps: 20.0,
            dt_s: 0.1,
            duration_s: 200.0,
            ctrl_period_s: 1.0,
            max_arrivals: None,
            seed: 1,
        }
    }
}

impl FogCellConfig {
    pub fn validate(&self) -> Result<()> {
        require_positive("road_len_m", self.road_len_m)?;
        require_positive("rsu_radius_m", self.rsu_radius_m)?;
        require_positive("arrival_rho", self.arrival_rho)?;
        require_positive("v_mps", self.v_mps)?;
        require_positive("dt_s", self.dt_s)?;
        if !(self.rsu_x_m >= 0.0 && self.rsu_x_m <= self.road_len_m) {
            return Err(Error::invalid(
                "rsu_x_m",
                format!("must lie in [0, {}], got {}", self.road_len_m, self.rsu_x_m),
            ));
        }
        if !(self.duration_s.is_finite() && self.duration_s >= 0.0) {
            return Err(Error::invalid("duration_s", "must be >= 0"));
        }
        if !(self.ctrl_period_s.is_finite() && self.ctrl_period_s >= self.dt_s) {
            return Err(Error::invalid(
                "ctrl_period_s",
                format!(
                    "must be >= dt_s ({}), got {}",
                    self.dt_s, self.ctrl_period_s
                ),
            ));
        }
        Ok(())
    }

    pub fn in_coverage(&self, x_m: f64) -> bool {
        (x_m - self.rsu_x_m).abs() <= self.rsu_radius_m
    }

    fn step_count(&self) -> u64 {
        (self.duration_s / self.dt_s + 1e-9).floor() as u64
    }

    fn ctrl_steps(&self) -> u64 {
        ((self.ctrl_period_s / self.dt_s).round() as u64).max(1)
    }
}

/// Moves every vehicle by `v·dt` and removes those past the road end.
///
/// Returns the vehicles that left, in their original order.
pub fn advance(vehicles: &mut Vec<Vehicle>, road_len_m: f64, dt_s: f64) -> Vec<Vehicle> {
    for v in vehicles.iter_mut() {
        v.x_m += v.v_mps * dt_s;
    }
    let (gone, kept): (Vec<_>, Vec<_>) = vehicles.drain(..).partition(|v| v.x_m > road_len_m);
    *vehicles = kept;
    gone
}

/// The in-coverage vehicle with the longest remaining dwell, i.e. the
/// rearmost one; ties go to the lowest id.
pub fn select_gateway<'a, I>(vehicles: I, config: &FogCellConfig) -> Option<u64>
where
    I: IntoIterator<Item = &'a Vehicle>,
{
    vehicles
        .into_iter()
        .filter(|v| config.in_coverage(v.x_m))
        .min_by(|a, b| a.x_m.total_cmp(&b.x_m).then(a.id.cmp(&b.id)))
        .map(|v| v.id)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Arrive,
    Exit,
    GatewayElect,
    GatewayDepart,
    CoverageEnter,
    EpochAlloc,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Arrive => "ARRIVE",
            EventKind::Exit => "EXIT",
            EventKind::GatewayElect => "GATEWAY_ELECT",
            EventKind::GatewayDepart => "GATEWAY_DEPART",
            EventKind::CoverageEnter => "COVERAGE_ENTER",
            EventKind::EpochAlloc => "EPOCH_ALLOC",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub t_s: f64,
    pub kind: EventKind,
    pub vehicle_id: Option<u64>,
    pub detail: String,
}

impl Event {
    pub const CSV_HEADER: &'static str = "t_s,event,vehicle_id,detail";

    /// One `t_s,event,vehicle_id,detail` row. `detail` never contains commas.
    pub fn to_csv_row(&self) -> String {
        let id = self.vehicle_id.map(|i| i.to_string()).unwrap_or_default();
        format!("{:.6},{},{},{}", self.t_s, self.kind, id, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimSummary {
    pub gateway_handover_count: u64,
    pub baseline_handover_count: u64,
    pub disconnected_time_fraction: f64,
    pub mean_chain_hops: f64,
    pub epoch_throughputs: Vec<f64>,
    pub arrivals: u64,
    pub exits: u64,
    pub steps: u64,
}

impl SimSummary {
    /// `key=value` lines, one per metric.
    pub fn to_key_values(&self) -> String {
        let epochs: Vec<String> = self
            .epoch_throughputs
            .iter()
            .map(|t| format!("{t:.6}"))
            .collect();
        let mean = if self.epoch_throughputs.is_empty() {
            0.0
        } else {
            self.epoch_throughputs.iter().sum::<f64>() / self.epoch_throughputs.len() as f64
        };
        format!(
            "gateway_handover_count={}\n\
             baseline_handover_count={}\n\
             disconnected_time_fraction={:.6}\n\
             mean_chain_hops={:.6}\n\
             arrivals={}\n\
             exits={}\n\
             steps={}\n\
             epochs={}\n\
             mean_epoch_throughput_mbps={:.6}\n\
             epoch_throughputs_mbps={}\n",
            self.gateway_handover_count,
            self.baseline_handover_count,
            self.disconnected_time_fraction,
            self.mean_chain_hops,
            self.arrivals,
            self.exits,
            self.steps,
            self.epoch_throughputs.len(),
            mean,
            epochs.join(";"),
        )
    }
}

#[derive(Debug, Clone, Copy)]
struct Tracked {
    vehicle: Vehicle,
    covered: bool,
}

/// Stateful fog cell, advanced one `dt` at a time.
#[derive(Debug, Clone)]
pub struct FogCell {
    config: FogCellConfig,
    range_max_m: f64,
    capacity: CellCapacity,
    /// Front is the oldest (largest `x`).
    vehicles: VecDeque<Tracked>,
    gateway: Option<u64>,
    step_index: u64,
    next_arrival_index: u64,
    next_arrival_t: f64,
    connected_now: bool,
    connected_steps: u64,
    hops_sum: u64,
    summary: SimSummary,
}

impl FogCell {
    pub fn new(config: FogCellConfig, link: &LinkParams, capacity: CellCapacity) -> Result<Self> {
        config.validate()?;
        link.validate()?;
        let mut cell = Self {
            config,
            range_max_m: link.range_max_m,
            capacity,
            vehicles: VecDeque::new(),
            gateway: None,
            step_index: 0,
            next_arrival_index: 0,
            next_arrival_t: 0.0,
            connected_now: false,
            connected_steps: 0,
            hops_sum: 0,
            summary: SimSummary::default(),
        };
        cell.next_arrival_t = cell.arrival_time_after(0.0, 0);
        Ok(cell)
    }

    pub fn config(&self) -> &FogCellConfig {
        &self.config
    }

    /// Current vehicles, front of the platoon first.
    pub fn vehicles(&self) -> impl Iterator<Item = &Vehicle> {
        self.vehicles.iter().map(|t| &t.vehicle)
    }

    pub fn gateway(&self) -> Option<u64> {
        self.gateway
    }

    pub fn connected(&self) -> bool {
        self.connected_now
    }

    pub fn time_s(&self) -> f64 {
        self.step_index as f64 * self.config.dt_s
    }

    fn arrivals_exhausted(&self) -> bool {
        self.config
            .max_arrivals
            .is_some_and(|m| self.next_arrival_index >= m)
    }

    /// Arrival time of vehicle `index` given the previous arrival time.
    fn arrival_time_after(&self, prev_t: f64, index: u64) -> f64 {
        let cfg = &self.config;
        match cfg.arrival_model {
            ArrivalModel::Equidistant => index as f64 / (cfg.arrival_rho * cfg.v_mps),
            ArrivalModel::Poisson => {
                let gap = Exp::new(cfg.arrival_rho * cfg.v_mps).expect("rate validated positive");
                prev_t + gap.sample(&mut rng::stream(cfg.seed, rng::ARRIVALS, index))
            }
        }
    }

    /// Advances one step and returns the events it produced.
    pub fn step(&mut self) -> Vec<Event> {
        let cfg = self.config;
        let t0 = self.time_s();
        self.step_index += 1;
        let t1 = self.time_s();
        let mut events = Vec::new();
        let mut ev = |kind, vehicle_id, detail: String| {
            events.push(Event {
                t_s: t1,
                kind,
                vehicle_id,
                detail,
            })
        };

        for t in self.vehicles.iter_mut() {
            t.vehicle.x_m += t.vehicle.v_mps * cfg.dt_s;
        }
        while self
            .vehicles
            .front()
            .is_some_and(|t| t.vehicle.x_m > cfg.road_len_m)
        {
            let gone = self.vehicles.pop_front().expect("front checked");
            self.summary.exits += 1;
            ev(EventKind::Exit, Some(gone.vehicle.id), String::new());
        }

        while !self.arrivals_exhausted() && self.next_arrival_t < t1 {
            let id = self.next_arrival_index;
            let x_m = cfg.v_mps * (t1 - self.next_arrival_t.max(t0));
            self.vehicles.push_back(Tracked {
                vehicle: Vehicle {
                    id,
                    x_m,
                    v_mps: cfg.v_mps,
                },
                covered: false,
            });
            self.summary.arrivals += 1;
            ev(EventKind::Arrive, Some(id), String::new());
            self.next_arrival_index += 1;
            self.next_arrival_t =
                self.arrival_time_after(self.next_arrival_t, self.next_arrival_index);
        }

        for t in self.vehicles.iter_mut() {
            let now = cfg.in_coverage(t.vehicle.x_m);
            if now && !t.covered {
                self.summary.baseline_handover_count += 1;
                ev(EventKind::CoverageEnter, Some(t.vehicle.id), String::new());
            }
            t.covered = now;
        }

        if let Some(gw) = self.gateway {
            let reason = match self.vehicles.iter().find(|t| t.vehicle.id == gw) {
                None => Some("exited"),
                Some(t) if !t.covered => Some("left_coverage"),
                Some(_) => None,
            };
            if let Some(reason) = reason {
                ev(EventKind::GatewayDepart, Some(gw), reason.to_string());
                self.gateway = None;
            }
        }
        if self.gateway.is_none() {
            self.gateway = select_gateway(self.vehicles.iter().map(|t| &t.vehicle), &cfg);
            if let Some(gw) = self.gateway {
                self.summary.gateway_handover_count += 1;
                ev(EventKind::GatewayElect, Some(gw), String::new());
            }
        }

        self.connected_now = false;
        if let Some(gw) = self.gateway {
            let chain_ok = self
                .vehicles
                .iter()
                .zip(self.vehicles.iter().skip(1))
                .all(|(a, b)| a.vehicle.x_m - b.vehicle.x_m <= self.range_max_m);
            if chain_ok {
                let n = self.vehicles.len();
                let pos = self
                    .vehicles
                    .iter()
                    .position(|t| t.vehicle.id == gw)
                    .expect("gateway is on the road");
                self.connected_now = true;
                self.connected_steps += 1;
                self.hops_sum += pos.max(n - 1 - pos) as u64;
            }
        }

        if self.step_index % cfg.ctrl_steps() == 0 && !self.vehicles.is_empty() {
            let epoch = self.step_index / cfg.ctrl_steps() - 1;
            let mut rng = rng::stream(cfg.seed, rng::EPOCH_DEMANDS, epoch);
            let profile =
                sample_demands_from(self.vehicles.len(), &self.capacity, &mut rng, cfg.seed);
            let out = allocate_adaptive(&profile, &self.capacity);
            self.summary.epoch_throughputs.push(out.throughput_mbps);
            ev(
                EventKind::EpochAlloc,
                self.gateway,
                format!(
                    "epoch={epoch};n={};throughput_mbps={:.6}",
                    profile.n(),
                    out.throughput_mbps
                ),
            );
        }

        events
    }

    /// Final metrics after the steps taken so far.
    pub fn summary(&self) -> SimSummary {
        let mut s = self.summary.clone();
        s.steps = self.step_index;
        s.disconnected_time_fraction = if self.step_index == 0 {
            1.0
        } else {
            (self.step_index - self.connected_steps) as f64 / self.step_index as f64
        };
        s.mean_chain_hops = if self.connected_steps == 0 {
            0.0
        } else {
            self.hops_sum as f64 / self.connected_steps as f64
        };
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub events: Vec<Event>,
    pub summary: SimSummary,
}

impl SimOutput {
    pub fn event_log_csv(&self) -> String {
        let mut out = String::from(Event::CSV_HEADER);
        out.push('\n');
        for e in &self.events {
            out.push_str(&e.to_csv_row());
            out.push('\n');
        }
        out
    }
}

/// Runs a fog cell for `config.duration_s`.
pub fn run(
    config: &FogCellConfig,
    link: &LinkParams,
    capacity: &CellCapacity,
) -> Result<SimOutput> {
    let mut cell = FogCell::new(*config, link, *capacity)?;
    let mut events = Vec::new();
    for _ in 0..config.step_count() {
        events.extend(cell.step());
    }
    Ok(SimOutput {
        events,
        summary: cell.summary(),
    })
}
