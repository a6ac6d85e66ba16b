//! Cheapest-insertion construction and the insertion machinery the repair
//! operators share with it.
//!
//! Insertions are scored without synchronization: each route costs its
//! [`RoutingModel::route_duration`] (travel, service, forced resupplies), and
//! a partial solution costs its longest route. Ties on that makespan are
//! broken by the summed route durations, which is what makes a cheap detour
//! in a short route preferable to an expensive one.

use std::cmp::Ordering;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::model::{RoutingModel, SyncModel};
use crate::solution::{Schedule, Solution};

/// Synchronization-free cost of a (partial) solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InsertionCost {
    /// Longest route duration.
    pub makespan: f64,
    /// Sum of route durations.
    pub total: f64,
}

impl InsertionCost {
    pub fn cmp_key(&self, other: &Self) -> Ordering {
        self.makespan
            .total_cmp(&other.makespan)
            .then(self.total.total_cmp(&other.total))
    }

    fn minus(&self, other: &Self) -> InsertionCost {
        InsertionCost {
            makespan: self.makespan - other.makespan,
            total: self.total - other.total,
        }
    }
}

/// Cost of `routes` after inserting `node` into route `route` at `position`.
pub fn insertion_cost<M: RoutingModel>(
    model: &M,
    routes: &[Vec<usize>],
    node: usize,
    route: usize,
    position: usize,
) -> Result<InsertionCost> {
    let len = routes.get(route).map(Vec::len).ok_or(Error::InvalidPosition {
        route,
        position,
        len: 0,
    })?;
    if position > len {
        return Err(Error::InvalidPosition { route, position, len });
    }
    let mut makespan: f64 = 0.0;
    let mut total = 0.0;
    for (r, nodes) in routes.iter().enumerate() {
        let d = if r == route {
            let mut probe = nodes.clone();
            probe.insert(position, node);
            model.route_duration(&probe)
        } else {
            model.route_duration(nodes)
        };
        makespan = makespan.max(d);
        total += d;
    }
    Ok(InsertionCost { makespan, total })
}

/// How removed nodes are put back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RepairOp {
    /// Cheapest (node, position) first.
    Greedy,
    /// Largest gap between best and second-best position first.
    Regret1,
    /// Largest gap between best and third-best position first.
    Regret2,
}

impl RepairOp {
    pub const ALL: [RepairOp; 3] = [RepairOp::Greedy, RepairOp::Regret1, RepairOp::Regret2];

    pub fn id(self) -> usize {
        match self {
            RepairOp::Greedy => 0,
            RepairOp::Regret1 => 1,
            RepairOp::Regret2 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RepairOp::Greedy => "greedy",
            RepairOp::Regret1 => "regret1",
            RepairOp::Regret2 => "regret2",
        }
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    cost: InsertionCost,
    route: usize,
    position: usize,
}

/// Incremental insertion state. For every pending node it caches the route
/// duration obtained at every position, and refreshes only the route that
/// received the last insertion.
pub(crate) struct Inserter<'m, M> {
    model: &'m M,
    routes: Vec<Vec<usize>>,
    durations: Vec<f64>,
    pending: Vec<usize>,
    cache: Vec<Vec<Vec<f64>>>,
    scratch: Vec<usize>,
    /// Amplitude and source of the perturbation added to candidate costs.
    noise: Option<(f64, ChaCha8Rng)>,
}

impl<'m, M: RoutingModel> Inserter<'m, M> {
    pub(crate) fn new(model: &'m M, routes: Vec<Vec<usize>>, pending: Vec<usize>) -> Self {
        let durations = routes.iter().map(|r| model.route_duration(r)).collect();
        let mut ins = Inserter {
            model,
            routes,
            durations,
            pending,
            cache: Vec::new(),
            scratch: Vec::new(),
            noise: None,
        };
        ins.cache = (0..ins.pending.len())
            .map(|i| {
                let node = ins.pending[i];
                (0..ins.routes.len())
                    .map(|r| ins.probe_route(node, r))
                    .collect()
            })
            .collect();
        ins
    }

    /// Perturbs every candidate cost by a uniform draw in `[-amplitude, amplitude]`.
    pub(crate) fn with_noise(mut self, amplitude: f64, rng: ChaCha8Rng) -> Self {
        if amplitude > 0.0 {
            self.noise = Some((amplitude, rng));
        }
        self
    }

    fn probe_route(&mut self, node: usize, r: usize) -> Vec<f64> {
        let len = self.routes[r].len();
        let mut out = Vec::with_capacity(len + 1);
        for pos in 0..=len {
            self.scratch.clear();
            self.scratch.extend_from_slice(&self.routes[r][..pos]);
            self.scratch.push(node);
            self.scratch.extend_from_slice(&self.routes[r][pos..]);
            out.push(self.model.route_duration(&self.scratch));
        }
        out
    }

    /// Per route, the longest duration among the other routes.
    fn max_others(&self) -> Vec<f64> {
        let (mut top, mut second, mut top_idx) = (f64::NEG_INFINITY, f64::NEG_INFINITY, usize::MAX);
        for (r, &d) in self.durations.iter().enumerate() {
            if d > top {
                second = top;
                top = d;
                top_idx = r;
            } else if d > second {
                second = d;
            }
        }
        (0..self.durations.len())
            .map(|r| {
                let m = if r == top_idx { second } else { top };
                m.max(0.0)
            })
            .collect()
    }

    /// Calls `visit` for every allowed (route, position) of pending node `i`,
    /// in route-major, position-minor order.
    fn for_each_candidate(&mut self, i: usize, others: &[f64], visit: &mut impl FnMut(Candidate)) {
        let empty = self.routes.iter().filter(|r| r.is_empty()).count();
        // Remaining nodes must still cover every empty route.
        let only_empty = empty > 0 && self.pending.len() <= empty;
        let total: f64 = self.durations.iter().sum();
        for (r, positions) in self.cache[i].iter().enumerate() {
            if only_empty && !self.routes[r].is_empty() {
                continue;
            }
            for (position, &d) in positions.iter().enumerate() {
                let shift = match &mut self.noise {
                    Some((amp, rng)) => rng.gen_range(-*amp..=*amp),
                    None => 0.0,
                };
                visit(Candidate {
                    cost: InsertionCost {
                        makespan: d.max(others[r]) + shift,
                        total: total - self.durations[r] + d + shift,
                    },
                    route: r,
                    position,
                });
            }
        }
    }

    fn insert(&mut self, i: usize, route: usize, position: usize) {
        let node = self.pending.swap_remove(i);
        let cached = self.cache.swap_remove(i);
        self.durations[route] = cached[route][position];
        self.routes[route].insert(position, node);
        for j in 0..self.pending.len() {
            let probe = self.probe_route(self.pending[j], route);
            self.cache[j][route] = probe;
        }
    }

    fn greedy_step(&mut self) {
        let others = self.max_others();
        let mut best: Option<(Candidate, usize, usize)> = None;
        for i in 0..self.pending.len() {
            let node = self.pending[i];
            self.for_each_candidate(i, &others, &mut |c| {
                let better = match &best {
                    None => true,
                    Some((b, _, bn)) => c
                        .cost
                        .cmp_key(&b.cost)
                        .then(c.route.cmp(&b.route))
                        .then(c.position.cmp(&b.position))
                        .then(node.cmp(bn))
                        .is_lt(),
                };
                if better {
                    best = Some((c, i, node));
                }
            });
        }
        let (c, i, _) = best.expect("pending node without a candidate position");
        self.insert(i, c.route, c.position);
    }

    fn regret_step(&mut self, rank: usize) {
        let others = self.max_others();
        // (regret, best candidate, pending index, node)
        let mut chosen: Option<(InsertionCost, Candidate, usize, usize)> = None;
        for i in 0..self.pending.len() {
            let node = self.pending[i];
            let mut top: Vec<Candidate> = Vec::with_capacity(rank + 1);
            self.for_each_candidate(i, &others, &mut |c| {
                let at = top
                    .iter()
                    .position(|t| c.cost.cmp_key(&t.cost).is_lt())
                    .unwrap_or(top.len());
                if at < rank {
                    top.insert(at, c);
                    top.truncate(rank);
                } else if top.len() < rank {
                    top.push(c);
                }
            });
            let best = top[0];
            // Fewer candidates than the rank: fall back to the worst one available.
            let kth = top.get(rank - 1).copied().unwrap_or(*top.last().unwrap());
            let regret = kth.cost.minus(&best.cost);
            let better = match &chosen {
                None => true,
                Some((rg, bc, _, bn)) => regret
                    .cmp_key(rg)
                    .reverse()
                    .then(best.cost.cmp_key(&bc.cost))
                    .then(node.cmp(bn))
                    .is_lt(),
            };
            if better {
                chosen = Some((regret, best, i, node));
            }
        }
        let (_, c, i, _) = chosen.expect("pending node without a candidate position");
        self.insert(i, c.route, c.position);
    }

    pub(crate) fn run(mut self, op: RepairOp) -> Vec<Vec<usize>> {
        while !self.pending.is_empty() {
            match op {
                RepairOp::Greedy => self.greedy_step(),
                RepairOp::Regret1 => self.regret_step(2),
                RepairOp::Regret2 => self.regret_step(3),
            }
        }
        self.routes
    }
}

/// Reinserts `removed` into `partial` with the given repair rule.
pub fn repair<M: RoutingModel>(model: &M, partial: Vec<Vec<usize>>, removed: Vec<usize>, op: RepairOp) -> Vec<Vec<usize>> {
    Inserter::new(model, partial, removed).run(op)
}

/// [`repair`] with every candidate cost shifted by uniform noise of the given
/// amplitude.
pub fn repair_noisy<M: RoutingModel>(
    model: &M,
    partial: Vec<Vec<usize>>,
    removed: Vec<usize>,
    op: RepairOp,
    amplitude: f64,
    rng: ChaCha8Rng,
) -> Vec<Vec<usize>> {
    Inserter::new(model, partial, removed).with_noise(amplitude, rng).run(op)
}

/// Builds routes from `num_mhc` empty routes by repeatedly inserting the
/// globally cheapest (node, position).
pub fn construct_routes<M: RoutingModel>(model: &M) -> Vec<Vec<usize>> {
    let inst = model.instance();
    let routes = vec![Vec::new(); inst.num_mhc];
    let pending: Vec<usize> = inst.customers().collect();
    Inserter::new(model, routes, pending).run(RepairOp::Greedy)
}

/// Initial feasible solution for the synchronized model.
pub fn initial_solution(inst: &Instance) -> Result<(Solution, Schedule)> {
    let routes = construct_routes(&SyncModel::new(inst));
    crate::sync::schedule(&routes, inst)
}
