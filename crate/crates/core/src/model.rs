//! The interface between the search (construction, ALNS) and a routing model.
//!
//! A model turns a set of MHC routes into an [`Evaluation`]. The search only
//! sees the objective and a few per-node markers that the destroy operators
//! key on; the model-specific plan rides along untouched.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::instance::Instance;
use crate::solution::{objective, validate_solution, Schedule, Solution};
use crate::sync;

/// Threshold above which a wait counts as a wait.
pub const WAIT_EPS: f64 = 1e-9;

/// Scored routes plus whatever the model derived from them.
#[derive(Debug, Clone)]
pub struct Evaluation<P> {
    pub routes: Vec<Vec<usize>>,
    pub objective: f64,
    /// Depot return time of each route.
    pub route_returns: Vec<f64>,
    /// Per node: the MHC is resupplied (or heads back to reload) after this node.
    pub resupply: Vec<bool>,
    /// Per node: some vehicle waits here.
    pub waiting: Vec<bool>,
    pub plan: P,
}

impl<P> Evaluation<P> {
    pub fn resupply_nodes(&self) -> Vec<usize> {
        (0..self.resupply.len()).filter(|&i| self.resupply[i]).collect()
    }
}

pub trait RoutingModel: Sync {
    type Plan: Clone + Send;

    fn instance(&self) -> &Instance;

    /// Duration of one route on its own: travel, service, and the resupply or
    /// reload time its loads force, with no waiting.
    fn route_duration(&self, route: &[usize]) -> f64;

    fn evaluate(&self, routes: &[Vec<usize>]) -> Result<Evaluation<Self::Plan>>;

    /// Independent feasibility check used by debug builds of the search.
    fn check(&self, _eval: &Evaluation<Self::Plan>) -> std::result::Result<(), String> {
        Ok(())
    }
}

/// What the synchronized model minimizes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SyncObjective {
    /// Latest MHC arrival plus truck travel time.
    #[default]
    Full,
    /// Latest MHC arrival only, as in the multi-trip comparison.
    LatestArrival,
}

/// MHCs resupplied en route by a single truck.
#[derive(Debug, Clone, Copy)]
pub struct SyncModel<'a> {
    pub inst: &'a Instance,
    pub objective: SyncObjective,
}

impl<'a> SyncModel<'a> {
    pub fn new(inst: &'a Instance) -> Self {
        SyncModel {
            inst,
            objective: SyncObjective::Full,
        }
    }

    pub fn with_objective(inst: &'a Instance, objective: SyncObjective) -> Self {
        SyncModel { inst, objective }
    }
}

/// Route duration with greedy loads: a resupply (costing the resupply time)
/// happens whenever the next customer does not fit in what is left.
pub fn sync_free_duration(route: &[usize], inst: &Instance) -> f64 {
    let Some(&last) = route.last() else {
        return 0.0;
    };
    let mut prev = 0;
    let mut load = 0.0;
    let mut duration = 0.0;
    for &node in route {
        let need = inst.total_demand(node);
        if load + need > inst.capacity + crate::instance::EPS {
            duration += inst.resupply_time;
            load = 0.0;
        }
        load += need;
        duration += inst.t(prev, node) + inst.service_time[node];
        prev = node;
    }
    duration + inst.t(last, 0)
}

impl RoutingModel for SyncModel<'_> {
    type Plan = (Solution, Schedule);

    fn instance(&self) -> &Instance {
        self.inst
    }

    fn route_duration(&self, route: &[usize]) -> f64 {
        sync_free_duration(route, self.inst)
    }

    fn evaluate(&self, routes: &[Vec<usize>]) -> Result<Evaluation<Self::Plan>> {
        let (sol, sched) = sync::schedule(routes, self.inst)?;
        let n = self.inst.nodes.len();
        let mut resupply = vec![false; n];
        for &v in &sol.resupply_nodes {
            resupply[v] = true;
        }
        let waiting = (0..n)
            .map(|i| sched.mhc_wait[i] > WAIT_EPS || sched.truck_wait[i] > WAIT_EPS)
            .collect();
        let route_returns = routes
            .iter()
            .map(|r| r.last().map_or(0.0, |&last| sched.completion[last] + self.inst.t(last, 0)))
            .collect();
        let value = match self.objective {
            SyncObjective::Full => objective(&sched),
            SyncObjective::LatestArrival => sched.latest_arrival,
        };
        Ok(Evaluation {
            routes: routes.to_vec(),
            objective: value,
            route_returns,
            resupply,
            waiting,
            plan: (sol, sched),
        })
    }

    fn check(&self, eval: &Evaluation<Self::Plan>) -> std::result::Result<(), String> {
        let (sol, sched) = &eval.plan;
        let report = validate_solution(self.inst, sol, sched).map_err(|e| e.to_string())?;
        if report.passed {
            Ok(())
        } else {
            Err(format!("{:?}", report.violations))
        }
    }
}
