//! Baseline in which MHCs reload at the depot instead of meeting a truck.
//!
//! Each MHC runs a sequence of depot-to-depot trips. Between trips it queues
//! for a single reload bay, served first come first served (ties to the lower
//! MHC index), and the reload takes the resupply time.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::alns::{self, AlnsConfig, OperatorStats, TraceRow};
use crate::error::{Error, Result};
use crate::instance::{Instance, EPS};
use crate::model::{Evaluation, RoutingModel, WAIT_EPS};
use crate::solution::{route_length, total_distance, Schedule, Solution};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MtSolution {
    /// Per MHC, its trips in order; each trip lists customers only.
    pub trips: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReloadEvent {
    pub mhc: usize,
    /// Index of the trip that follows the reload.
    pub next_trip: usize,
    pub arrival: f64,
    pub start: f64,
    pub end: f64,
}

impl ReloadEvent {
    pub fn queue_wait(&self) -> f64 {
        self.start - self.arrival
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MtSchedule {
    /// Service completion per node id.
    pub completion: Vec<f64>,
    /// Per MHC, depot arrival time after each trip.
    pub trip_returns: Vec<Vec<f64>>,
    /// Reloads in the order the bay served them.
    pub reloads: Vec<ReloadEvent>,
    pub latest_arrival: f64,
    pub total_distance: f64,
}

fn trip_demand(trip: &[usize], inst: &Instance) -> f64 {
    trip.iter().map(|&v| inst.total_demand(v)).sum()
}

#[derive(PartialEq)]
struct Arrival(f64, usize);

impl Eq for Arrival {}

impl PartialOrd for Arrival {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Arrival {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Simulates all MHCs through their trips with the shared reload bay.
pub fn mt_schedule(sol: &MtSolution, inst: &Instance) -> Result<MtSchedule> {
    let n = inst.nodes.len();
    for (m, trips) in sol.trips.iter().enumerate() {
        for (k, trip) in trips.iter().enumerate() {
            if trip.is_empty() {
                return Err(Error::MalformedSolution(format!("trip {k} of MHC {m} is empty")));
            }
            if let Some(bad) = trip.iter().find(|&&v| v == 0 || v >= n) {
                return Err(Error::MalformedSolution(format!("trip {k} of MHC {m} contains invalid node {bad}")));
            }
            let demand = trip_demand(trip, inst);
            if demand > inst.capacity + EPS {
                return Err(Error::TripOverCapacity {
                    mhc: m,
                    trip: k,
                    demand,
                    capacity: inst.capacity,
                });
            }
        }
    }

    let mut completion = vec![0.0; n];
    let mut trip_returns: Vec<Vec<f64>> = sol.trips.iter().map(|t| Vec::with_capacity(t.len())).collect();
    let mut reloads = Vec::new();
    let mut heap = BinaryHeap::new();

    let run_trip = |m: usize, k: usize, start: f64, completion: &mut Vec<f64>| -> f64 {
        let trip = &sol.trips[m][k];
        let mut time = start;
        let mut prev = 0;
        for &v in trip {
            time += inst.t(prev, v) + inst.service_time[v];
            completion[v] = time;
            prev = v;
        }
        time + inst.t(prev, 0)
    };

    for (m, trips) in sol.trips.iter().enumerate() {
        if !trips.is_empty() {
            let back = run_trip(m, 0, 0.0, &mut completion);
            trip_returns[m].push(back);
            heap.push(Reverse(Arrival(back, m)));
        }
    }
    let mut bay_free: f64 = 0.0;
    while let Some(Reverse(Arrival(arrival, m))) = heap.pop() {
        let next_trip = trip_returns[m].len();
        if next_trip == sol.trips[m].len() {
            continue;
        }
        let start = arrival.max(bay_free);
        let end = start + inst.resupply_time;
        bay_free = end;
        reloads.push(ReloadEvent {
            mhc: m,
            next_trip,
            arrival,
            start,
            end,
        });
        let back = run_trip(m, next_trip, end, &mut completion);
        trip_returns[m].push(back);
        heap.push(Reverse(Arrival(back, m)));
    }

    let latest_arrival = trip_returns
        .iter()
        .filter_map(|r| r.last().copied())
        .fold(0.0, f64::max);
    let total_distance = sol.trips.iter().flatten().map(|t| route_length(t, inst)).sum();
    Ok(MtSchedule {
        completion,
        trip_returns,
        reloads,
        latest_arrival,
        total_distance,
    })
}

/// Splits one customer sequence into capacity-feasible trips minimizing
/// travel, service and reload time, ignoring the bay queue.
pub fn split_route(route: &[usize], inst: &Instance) -> (Vec<Vec<usize>>, f64) {
    let len = route.len();
    if len == 0 {
        return (Vec::new(), 0.0);
    }
    let mut best = vec![f64::INFINITY; len + 1];
    let mut from = vec![0usize; len + 1];
    best[0] = 0.0;
    for i in 0..len {
        if !best[i].is_finite() {
            continue;
        }
        let reload = if i == 0 { 0.0 } else { inst.resupply_time };
        let mut load = 0.0;
        let mut travel = 0.0;
        for j in i..len {
            let v = route[j];
            load += inst.total_demand(v);
            if load > inst.capacity + EPS {
                break;
            }
            travel += if j == i { inst.t(0, v) } else { inst.t(route[j - 1], v) } + inst.service_time[v];
            let cost = best[i] + reload + travel + inst.t(v, 0);
            if cost < best[j + 1] {
                best[j + 1] = cost;
                from[j + 1] = i;
            }
        }
    }
    let mut cuts = vec![len];
    let mut j = len;
    while j > 0 {
        j = from[j];
        cuts.push(j);
    }
    cuts.reverse();
    let trips = cuts.windows(2).map(|w| route[w[0]..w[1]].to_vec()).collect();
    (trips, best[len])
}

/// Multi-trip model over per-MHC customer sequences; the objective is the
/// latest depot arrival.
#[derive(Debug, Clone, Copy)]
pub struct MultiTripModel<'a> {
    pub inst: &'a Instance,
}

impl<'a> MultiTripModel<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        MultiTripModel { inst }
    }

    pub fn split(&self, routes: &[Vec<usize>]) -> MtSolution {
        MtSolution {
            trips: routes.iter().map(|r| split_route(r, self.inst).0).collect(),
        }
    }
}

impl RoutingModel for MultiTripModel<'_> {
    type Plan = (MtSolution, MtSchedule);

    fn instance(&self) -> &Instance {
        self.inst
    }

    fn route_duration(&self, route: &[usize]) -> f64 {
        split_route(route, self.inst).1
    }

    fn evaluate(&self, routes: &[Vec<usize>]) -> Result<Evaluation<Self::Plan>> {
        let sol = self.split(routes);
        let sched = mt_schedule(&sol, self.inst)?;
        let n = self.inst.nodes.len();
        let mut resupply = vec![false; n];
        let mut waiting = vec![false; n];
        for ev in &sched.reloads {
            let last = *sol.trips[ev.mhc][ev.next_trip - 1].last().unwrap();
            resupply[last] = true;
            if ev.queue_wait() > WAIT_EPS {
                waiting[last] = true;
            }
        }
        let route_returns = sched
            .trip_returns
            .iter()
            .map(|r| r.last().copied().unwrap_or(0.0))
            .collect();
        Ok(Evaluation {
            routes: routes.to_vec(),
            objective: sched.latest_arrival,
            route_returns,
            resupply,
            waiting,
            plan: (sol, sched),
        })
    }

    fn check(&self, eval: &Evaluation<Self::Plan>) -> std::result::Result<(), String> {
        let (sol, sched) = &eval.plan;
        let mut seen = vec![0usize; self.inst.nodes.len()];
        for &v in sol.trips.iter().flatten().flatten() {
            seen[v] += 1;
        }
        if let Some(v) = self.inst.customers().find(|&v| seen[v] != 1) {
            return Err(format!("customer {v} served {} times", seen[v]));
        }
        for pair in sched.reloads.windows(2) {
            if pair[1].start < pair[0].end - 1e-9 {
                return Err(format!("reloads of MHC {} and {} overlap", pair[0].mhc, pair[1].mhc));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct MtOutcome {
    pub solution: MtSolution,
    pub schedule: MtSchedule,
    pub objective: f64,
    pub stats: OperatorStats,
    pub trace: Vec<TraceRow>,
}

/// Runs the search engine on the multi-trip model.
pub fn solve_multitrip(inst: &Instance, cfg: &AlnsConfig) -> Result<MtOutcome> {
    let result = alns::solve(&MultiTripModel::new(inst), cfg)?;
    let (solution, schedule) = result.best.plan;
    Ok(MtOutcome {
        solution,
        schedule,
        objective: result.best.objective,
        stats: result.stats,
        trace: result.trace,
    })
}

/// Distance and latest-arrival gaps between the two models, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub td_sync: f64,
    pub la_sync: f64,
    pub td_mt: f64,
    pub la_mt: f64,
    pub distance_gap: f64,
    pub arrival_gap: f64,
}

impl GapReport {
    pub fn new(td_sync: f64, la_sync: f64, td_mt: f64, la_mt: f64) -> Self {
        GapReport {
            td_sync,
            la_sync,
            td_mt,
            la_mt,
            distance_gap: (td_sync - td_mt) / td_mt * 100.0,
            arrival_gap: (la_mt - la_sync) / la_mt * 100.0,
        }
    }
}

/// Gaps for a synchronized and a multi-trip solution of the same instance.
/// The synchronized distance includes the truck tour.
pub fn compare(inst: &Instance, sync: (&Solution, &Schedule), mt: &MtSchedule) -> GapReport {
    GapReport::new(
        total_distance(sync.0, inst),
        sync.1.latest_arrival,
        mt.total_distance,
        mt.latest_arrival,
    )
}
