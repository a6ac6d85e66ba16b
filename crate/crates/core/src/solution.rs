//! Solutions, settled schedules, and the feasibility checker.
//!
//! The checker verifies the routing model's constraints in their logical
//! form: when an arc is used its timing or inventory equation must hold as an
//! equality within [`TOLERANCE`]; unused arcs are not checked.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;

/// Absolute tolerance on continuous quantities.
pub const TOLERANCE: f64 = 1e-6;

/// MHC routes plus the truck tour derived from them.
///
/// Routes hold customer ids only; the depot is implicit at both ends.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub routes: Vec<Vec<usize>>,
    /// Customers where a resupply happens, ascending.
    pub resupply_nodes: Vec<usize>,
    /// Order in which the truck visits the resupply nodes.
    pub truck_route: Vec<usize>,
}

/// Timing and inventory state of a solution. Vectors are indexed by node id;
/// entry 0 (the depot) stays zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    /// Service completion time `c`.
    pub completion: Vec<f64>,
    /// Truck arrival time `a`; zero where the truck never goes.
    pub truck_arrival: Vec<f64>,
    /// MHC wait for the truck `w`.
    pub mhc_wait: Vec<f64>,
    /// Truck wait for the MHC `u`.
    pub truck_wait: Vec<f64>,
    /// Per-product inventory on arrival `g`.
    pub inventory_on_arrival: Vec<Vec<f64>>,
    /// Per-product resupplied quantity `q`.
    pub resupplied: Vec<Vec<f64>>,
    /// Time the last MHC is back at the depot `l`.
    pub latest_arrival: f64,
    /// Travel time of the closed truck tour.
    pub truck_total_time: f64,
    /// False when the reorder loop hit its cap before the truck order settled.
    pub stabilized: bool,
    /// Number of settle passes performed.
    pub passes: usize,
}

impl Schedule {
    pub fn empty(num_nodes: usize, num_products: usize) -> Self {
        Schedule {
            completion: vec![0.0; num_nodes],
            truck_arrival: vec![0.0; num_nodes],
            mhc_wait: vec![0.0; num_nodes],
            truck_wait: vec![0.0; num_nodes],
            inventory_on_arrival: vec![vec![0.0; num_products]; num_nodes],
            resupplied: vec![vec![0.0; num_products]; num_nodes],
            latest_arrival: 0.0,
            truck_total_time: 0.0,
            stabilized: true,
            passes: 0,
        }
    }
}

/// Constraint families of the routing model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstraintId {
    /// Truck time in the objective matches its tour.
    Objective,
    /// Each customer visited exactly once.
    VisitOnce,
    /// MHC flow conservation.
    MhcFlow,
    /// Exactly `num_mhc` routes leave and return to the depot.
    RouteCount,
    /// Truck flow conservation.
    TruckFlow,
    /// Resupply happens exactly where the truck goes.
    ResupplyMatchesTruck,
    /// A single truck tour.
    SingleTruckTour,
    /// MHC completion-time recursion (upper side).
    CompletionUpper,
    /// MHC completion-time recursion (lower side).
    CompletionLower,
    /// Truck arrival recursion (lower side).
    TruckArrivalLower,
    /// Truck arrival recursion (upper side).
    TruckArrivalUpper,
    /// MHC wait.
    MhcWait,
    /// Truck wait.
    TruckWait,
    /// Latest depot arrival.
    LatestArrival,
    /// Inventory recursion (upper side).
    InventoryUpper,
    /// Inventory recursion (lower side).
    InventoryLower,
    /// Demand covered on arrival.
    DemandCovered,
    /// MHC holding capacity.
    HoldingCapacity,
    /// Resupply only at resupply nodes, at most one load.
    ResupplyPlacement,
    /// Nonnegativity of continuous variables.
    Domain,
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: ConstraintId,
    pub context: String,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        FeasibilityReport {
            passed: violations.is_empty(),
            violations,
        }
    }

    pub fn has(&self, constraint: ConstraintId) -> bool {
        self.violations.iter().any(|v| v.constraint == constraint)
    }
}

/// Latest arrival plus truck travel time.
pub fn objective(sched: &Schedule) -> f64 {
    sched.latest_arrival + sched.truck_total_time
}

/// Length of one depot-to-depot route in the MHC metric.
pub fn route_length(route: &[usize], inst: &Instance) -> f64 {
    let mut prev = 0;
    let mut len = 0.0;
    for &node in route {
        len += inst.t(prev, node);
        prev = node;
    }
    if route.is_empty() {
        0.0
    } else {
        len + inst.t(prev, 0)
    }
}

/// Length of the closed truck tour in the truck metric.
pub fn truck_tour_length(tour: &[usize], inst: &Instance) -> f64 {
    let mut prev = 0;
    let mut len = 0.0;
    for &node in tour {
        len += inst.r(prev, node);
        prev = node;
    }
    if tour.is_empty() {
        0.0
    } else {
        len + inst.r(prev, 0)
    }
}

/// MHC route lengths plus the truck tour.
pub fn total_distance(sol: &Solution, inst: &Instance) -> f64 {
    sol.routes.iter().map(|r| route_length(r, inst)).sum::<f64>()
        + truck_tour_length(&sol.truck_route, inst)
}

struct Checker {
    violations: Vec<Violation>,
}

impl Checker {
    fn flag(&mut self, constraint: ConstraintId, context: String, magnitude: f64) {
        self.violations.push(Violation {
            constraint,
            context,
            magnitude,
        });
    }

    /// Flags `constraint` when `lhs` and `rhs` differ by more than the tolerance.
    /// `low`/`high` name the two halves of a paired equality.
    fn equal(&mut self, low: ConstraintId, high: ConstraintId, lhs: f64, rhs: f64, context: impl Fn() -> String) {
        let diff = lhs - rhs;
        if diff > TOLERANCE {
            self.flag(high, context(), diff);
        } else if diff < -TOLERANCE {
            self.flag(low, context(), -diff);
        }
    }
}

fn check_structure(inst: &Instance, sol: &Solution, sched: &Schedule) -> Result<()> {
    let n = inst.nodes.len();
    let k = inst.num_products;
    for (r, route) in sol.routes.iter().enumerate() {
        if let Some(bad) = route.iter().find(|&&v| v == 0 || v >= n) {
            return Err(Error::MalformedSolution(format!("route {r} contains invalid node {bad}")));
        }
    }
    if let Some(bad) = sol.truck_route.iter().chain(&sol.resupply_nodes).find(|&&v| v >= n) {
        return Err(Error::MalformedSolution(format!("truck data references unknown node {bad}")));
    }
    let lengths = [
        sched.completion.len(),
        sched.truck_arrival.len(),
        sched.mhc_wait.len(),
        sched.truck_wait.len(),
        sched.inventory_on_arrival.len(),
        sched.resupplied.len(),
    ];
    if lengths.iter().any(|&l| l != n) {
        return Err(Error::MalformedSolution(format!(
            "schedule vectors must have {n} entries, found {lengths:?}"
        )));
    }
    if sched
        .inventory_on_arrival
        .iter()
        .chain(&sched.resupplied)
        .any(|row| row.len() != k)
    {
        return Err(Error::MalformedSolution(format!(
            "inventory rows must have {k} products"
        )));
    }
    Ok(())
}

/// Verifies `sched` against every constraint family for `sol`.
///
/// Returns an error only when the inputs cannot be interpreted at all (ids
/// out of range, vectors of the wrong length).
pub fn validate_solution(inst: &Instance, sol: &Solution, sched: &Schedule) -> Result<FeasibilityReport> {
    use ConstraintId::*;

    check_structure(inst, sol, sched)?;
    let n = inst.nodes.len();
    let xi = inst.resupply_time;
    let mut ck = Checker { violations: Vec::new() };

    // Visits and MHC flow.
    let mut visits = vec![0usize; n];
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    for route in &sol.routes {
        let mut prev = 0;
        for &v in route {
            visits[v] += 1;
            outdeg[prev] += 1;
            indeg[v] += 1;
            prev = v;
        }
        if !route.is_empty() {
            outdeg[prev] += 1;
            indeg[0] += 1;
        }
    }
    for j in inst.customers() {
        if visits[j] != 1 {
            ck.flag(VisitOnce, format!("customer {j} visited {} times", visits[j]), (visits[j] as f64 - 1.0).abs());
        }
        if indeg[j] != outdeg[j] {
            ck.flag(MhcFlow, format!("customer {j} in {} out {}", indeg[j], outdeg[j]), (indeg[j] as f64 - outdeg[j] as f64).abs());
        }
    }
    if outdeg[0] != inst.num_mhc || indeg[0] != inst.num_mhc || sol.routes.len() != inst.num_mhc {
        ck.flag(
            RouteCount,
            format!(
                "{} routes, {} leave the depot, {} required",
                sol.routes.len(),
                outdeg[0],
                inst.num_mhc
            ),
            (outdeg[0] as f64 - inst.num_mhc as f64).abs(),
        );
    }

    // Truck tour and resupply linkage.
    let mut is_resupply = vec![false; n];
    for &v in &sol.resupply_nodes {
        if v == 0 {
            ck.flag(ResupplyMatchesTruck, "depot marked as resupply node".into(), 1.0);
        } else {
            is_resupply[v] = true;
        }
    }
    let mut truck_visits = vec![0usize; n];
    for &v in &sol.truck_route {
        truck_visits[v] += 1;
    }
    if truck_visits[0] > 0 {
        ck.flag(SingleTruckTour, "truck tour passes through the depot mid-route".into(), truck_visits[0] as f64);
    }
    for j in inst.customers() {
        let z = usize::from(is_resupply[j]);
        if truck_visits[j] != z {
            ck.flag(ResupplyMatchesTruck, format!("node {j}: z = {z}, truck visits {}", truck_visits[j]), (truck_visits[j] as f64 - z as f64).abs());
        }
        if is_resupply[j] && visits[j] == 0 {
            ck.flag(ResupplyMatchesTruck, format!("resupply node {j} is not on any route"), 1.0);
        }
    }

    // MHC timing, inventory and latest arrival.
    let mut latest: f64 = 0.0;
    for (r, route) in sol.routes.iter().enumerate() {
        let mut prev = 0usize;
        let mut departure = 0.0;
        for &j in route {
            let expected = departure + inst.t(prev, j) + inst.service_time[j];
            ck.equal(CompletionLower, CompletionUpper, sched.completion[j], expected, || format!("route {r}, arc {prev}->{j}"));
            if prev != 0 {
                for k in 0..inst.num_products {
                    let expected = sched.inventory_on_arrival[prev][k] - inst.demand[prev][k]
                        + sched.resupplied[prev][k];
                    ck.equal(InventoryLower, InventoryUpper, sched.inventory_on_arrival[j][k], expected, || {
                        format!("route {r}, arc {prev}->{j}, product {k}")
                    });
                }
            }
            let z = if is_resupply[j] { 1.0 } else { 0.0 };
            departure = sched.completion[j] + sched.mhc_wait[j] + xi * z;
            prev = j;
        }
        if !route.is_empty() {
            let back = sched.completion[prev] + inst.t(prev, 0);
            if back > sched.latest_arrival + TOLERANCE {
                ck.flag(LatestArrival, format!("route {r} returns at {back}"), back - sched.latest_arrival);
            }
            latest = latest.max(back);
        }
    }
    if sched.latest_arrival > latest + TOLERANCE {
        ck.flag(LatestArrival, format!("latest arrival {} exceeds every route return", sched.latest_arrival), sched.latest_arrival - latest);
    }

    // Truck timing.
    let mut prev = 0usize;
    for &j in &sol.truck_route {
        if j == 0 {
            continue;
        }
        let (ap, up, zp) = if prev == 0 {
            (0.0, 0.0, 0.0)
        } else {
            (sched.truck_arrival[prev], sched.truck_wait[prev], 1.0)
        };
        let expected = ap + up + xi * zp + inst.r(prev, j);
        ck.equal(TruckArrivalLower, TruckArrivalUpper, sched.truck_arrival[j], expected, || format!("truck arc {prev}->{j}"));
        prev = j;
    }
    let tour = truck_tour_length(&sol.truck_route, inst);
    if (tour - sched.truck_total_time).abs() > TOLERANCE {
        ck.flag(Objective, format!("truck time {} vs tour length {tour}", sched.truck_total_time), (tour - sched.truck_total_time).abs());
    }

    // Waits, demand coverage, capacity, resupply quantities.
    for j in inst.customers() {
        let (c, w, u) = (sched.completion[j], sched.mhc_wait[j], sched.truck_wait[j]);
        if truck_visits[j] > 0 {
            let a = sched.truck_arrival[j];
            ck.equal(MhcWait, MhcWait, w, (a - c).max(0.0), || format!("node {j}: MHC wait"));
            ck.equal(TruckWait, TruckWait, u, (c - a).max(0.0), || format!("node {j}: truck wait"));
        } else {
            if w.abs() > TOLERANCE {
                ck.flag(MhcWait, format!("node {j}: MHC waits {w} but the truck never comes"), w.abs());
            }
            if u.abs() > TOLERANCE {
                ck.flag(TruckWait, format!("node {j}: truck waits {u} at a node it never visits"), u.abs());
            }
        }
        let mut on_board = 0.0;
        let mut refill = 0.0;
        for k in 0..inst.num_products {
            let g = sched.inventory_on_arrival[j][k];
            let q = sched.resupplied[j][k];
            on_board += g;
            refill += q;
            if g < inst.demand[j][k] - TOLERANCE {
                ck.flag(DemandCovered, format!("node {j}, product {k}: {g} on board, {} needed", inst.demand[j][k]), inst.demand[j][k] - g);
            }
            if g < -TOLERANCE || q < -TOLERANCE {
                ck.flag(Domain, format!("node {j}, product {k}: negative inventory or resupply"), g.min(q).abs());
            }
        }
        if on_board > inst.capacity + TOLERANCE {
            ck.flag(HoldingCapacity, format!("node {j}: {on_board} on board"), on_board - inst.capacity);
        }
        let z = if is_resupply[j] { 1.0 } else { 0.0 };
        if refill > inst.capacity * z + TOLERANCE {
            ck.flag(ResupplyPlacement, format!("node {j}: resupplied {refill} with z = {z}"), refill - inst.capacity * z);
        }
        for (name, value) in [("c", c), ("w", w), ("u", u), ("a", sched.truck_arrival[j])] {
            if value < -TOLERANCE {
                ck.flag(Domain, format!("node {j}: {name} = {value}"), -value);
            }
        }
    }

    Ok(FeasibilityReport::from_violations(ck.violations))
}

/// A solved instance as written to disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub objective: f64,
    pub total_distance: f64,
    pub solution: Solution,
    pub schedule: Schedule,
}

impl SolutionDocument {
    pub fn new(inst: &Instance, solution: Solution, schedule: Schedule) -> Self {
        SolutionDocument {
            objective: objective(&schedule),
            total_distance: total_distance(&solution, inst),
            solution,
            schedule,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sync::{schedule, tests::tiny4};

    fn solved() -> (Instance, Solution, Schedule) {
        let inst = tiny4();
        let (sol, sched) = schedule(&[vec![1, 2, 3]], &inst).unwrap();
        (inst, sol, sched)
    }

    #[test]
    fn settled_schedule_passes() {
        let (inst, sol, sched) = solved();
        let report = validate_solution(&inst, &sol, &sched).unwrap();
        assert!(report.passed, "{:?}", report.violations);
    }

    #[test]
    fn refill_without_truck_breaks_eq19() {
        let (inst, sol, mut sched) = solved();
        sched.resupplied[1][0] = 1.0;
        let report = validate_solution(&inst, &sol, &sched).unwrap();
        assert!(report.has(ConstraintId::ResupplyPlacement));
    }

    #[test]
    fn missing_customer_breaks_eq2() {
        let (inst, mut sol, sched) = solved();
        sol.routes[0].retain(|&v| v != 1);
        let report = validate_solution(&inst, &sol, &sched).unwrap();
        assert!(report.has(ConstraintId::VisitOnce));
    }

    #[test]
    fn early_completion_is_flagged_low_side() {
        let (inst, sol, mut sched) = solved();
        sched.completion[3] -= 1.0;
        let report = validate_solution(&inst, &sol, &sched).unwrap();
        assert!(report.has(ConstraintId::CompletionLower));
        assert!(!report.passed);
    }

    #[test]
    fn overfull_arrival_breaks_eq18() {
        let (inst, sol, mut sched) = solved();
        sched.inventory_on_arrival[1][0] = 11.0;
        let report = validate_solution(&inst, &sol, &sched).unwrap();
        assert!(report.has(ConstraintId::HoldingCapacity));
    }

    #[test]
    fn wrong_vector_length_is_an_error() {
        let (inst, sol, mut sched) = solved();
        sched.completion.pop();
        assert!(matches!(validate_solution(&inst, &sol, &sched), Err(Error::MalformedSolution(_))));
    }

    #[test]
    fn distances_add_up() {
        let (inst, sol, _) = solved();
        let mhc = 40.0;
        let truck = 2.0 * 200f64.sqrt();
        assert!((total_distance(&sol, &inst) - (mhc + truck)).abs() < 1e-9);
    }
}
