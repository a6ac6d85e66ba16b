//! Exhaustive solver for tiny instances.
//!
//! Every assignment of customers to ordered routes is enumerated once (MHCs
//! are identical, so route sets that differ only by route order are the same
//! routing), and for each routing every precedence-respecting truck order is
//! settled. Load plans stay greedy, so the optimum is optimal for that policy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::solution::{objective, Schedule, Solution};
use crate::sync::{plan_loads, settle, LoadPlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_customers: usize,
    pub max_mhc: usize,
    pub max_resupply: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_customers: 8,
            max_mhc: 3,
            max_resupply: 8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactSolution {
    pub solution: Solution,
    pub schedule: Schedule,
    pub objective: f64,
    /// Routings examined.
    pub routings: usize,
}

fn check_size(inst: &Instance, limits: &OracleLimits) -> Result<()> {
    let n = inst.num_customers();
    if n > limits.max_customers {
        return Err(Error::TooLarge {
            what: "customer set",
            size: n,
            limit: limits.max_customers,
        });
    }
    if inst.num_mhc > limits.max_mhc {
        return Err(Error::TooLarge {
            what: "fleet",
            size: inst.num_mhc,
            limit: limits.max_mhc,
        });
    }
    Ok(())
}

fn extend(
    next: usize,
    n: usize,
    target: usize,
    routes: &mut Vec<Vec<usize>>,
    padded: &mut Vec<Vec<usize>>,
    visit: &mut dyn FnMut(&[Vec<usize>]),
) {
    if next > n {
        padded.clear();
        padded.extend(routes.iter().cloned());
        padded.resize(padded.len().max(target), Vec::new());
        visit(padded);
        return;
    }
    let remaining = n - next + 1;
    let open = routes.len();
    let needed = target.min(n);
    // Join an existing route, unless every remaining customer must open one.
    if remaining > needed - open {
        for r in 0..open {
            for pos in 0..=routes[r].len() {
                routes[r].insert(pos, next);
                extend(next + 1, n, target, routes, padded, visit);
                routes[r].remove(pos);
            }
        }
    }
    if open < needed {
        routes.push(vec![next]);
        extend(next + 1, n, target, routes, padded, visit);
        routes.pop();
    }
}

/// Calls `visit` once per routing: `min(n, num_mhc)` nonempty routes, padded
/// with empty ones up to `num_mhc`, routes ordered by their smallest customer.
/// Returns the number of routings.
pub fn enumerate_routings(
    inst: &Instance,
    limits: &OracleLimits,
    mut visit: impl FnMut(&[Vec<usize>]),
) -> Result<usize> {
    check_size(inst, limits)?;
    let mut count = 0;
    let mut routes = Vec::new();
    let mut padded = Vec::new();
    extend(1, inst.num_customers(), inst.num_mhc, &mut routes, &mut padded, &mut |r| {
        count += 1;
        visit(r)
    });
    Ok(count)
}

/// Every routing, materialized.
pub fn all_routings(inst: &Instance, limits: &OracleLimits) -> Result<Vec<Vec<Vec<usize>>>> {
    let mut out = Vec::new();
    enumerate_routings(inst, limits, |r| out.push(r.to_vec()))?;
    Ok(out)
}

fn orders(plans: &[LoadPlan], cursor: &mut [usize], order: &mut Vec<usize>, total: usize, visit: &mut dyn FnMut(&[usize])) {
    if order.len() == total {
        visit(order);
        return;
    }
    for r in 0..plans.len() {
        let k = cursor[r];
        if k < plans[r].resupply_points.len() {
            order.push(plans[r].resupply_points[k].node);
            cursor[r] += 1;
            orders(plans, cursor, order, total, visit);
            cursor[r] -= 1;
            order.pop();
        }
    }
}

/// Settles `routes` under every truck order that respects each route's own
/// resupply sequence and keeps the cheapest.
pub fn best_truck_order(routes: &[Vec<usize>], inst: &Instance, limits: &OracleLimits) -> Result<(Solution, Schedule)> {
    let plans = routes.iter().map(|r| plan_loads(r, inst)).collect::<Result<Vec<_>>>()?;
    best_order_for_plans(routes, &plans, inst, limits)
}

fn best_order_for_plans(
    routes: &[Vec<usize>],
    plans: &[LoadPlan],
    inst: &Instance,
    limits: &OracleLimits,
) -> Result<(Solution, Schedule)> {
    let total: usize = plans.iter().map(|p| p.resupply_points.len()).sum();
    if total > limits.max_resupply {
        return Err(Error::TooLarge {
            what: "resupply point set",
            size: total,
            limit: limits.max_resupply,
        });
    }
    let mut best: Option<(f64, Vec<usize>, Schedule)> = None;
    let mut failure = None;
    let mut cursor = vec![0; plans.len()];
    orders(plans, &mut cursor, &mut Vec::with_capacity(total), total, &mut |order| {
        match settle(routes, order, plans, inst) {
            Ok(mut sched) => {
                let f = objective(&sched);
                if best.as_ref().is_none_or(|(b, _, _)| f < *b) {
                    sched.stabilized = true;
                    sched.passes = 1;
                    best = Some((f, order.to_vec(), sched));
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let (_, order, sched) = best.expect("at least one truck order exists");
    let mut resupply_nodes = order.clone();
    resupply_nodes.sort_unstable();
    Ok((
        Solution {
            routes: routes.to_vec(),
            resupply_nodes,
            truck_route: order,
        },
        sched,
    ))
}

/// Cheapest routing and truck order. Objectives within 1e-9 of each other
/// count as tied and go to the lexicographically smaller route list.
pub fn exact_solve(inst: &Instance, limits: &OracleLimits) -> Result<ExactSolution> {
    let mut best: Option<(f64, Solution, Schedule)> = None;
    let mut failure = None;
    let routings = enumerate_routings(inst, limits, |routes| {
        if failure.is_some() {
            return;
        }
        match best_truck_order(routes, inst, limits) {
            Ok((sol, sched)) => {
                let f = objective(&sched);
                let better = match &best {
                    None => true,
                    Some((b, bs, _)) => f < b - 1e-9 || (f <= b + 1e-9 && sol.routes < bs.routes),
                };
                if better {
                    best = Some((f, sol, sched));
                }
            }
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let (objective, solution, schedule) = best.expect("at least one routing exists");
    Ok(ExactSolution {
        solution,
        schedule,
        objective,
        routings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Node;
    use crate::sync::schedule;

    fn cluster(n: usize, num_mhc: usize) -> Instance {
        let mut nodes = vec![Node::new(0, 0.0, 0.0)];
        let mut demand = vec![vec![0.0]];
        for i in 1..=n {
            let a = i as f64;
            nodes.push(Node::new(i, 10.0 * a.cos(), 10.0 * a.sin()));
            demand.push(vec![3.0]);
        }
        Instance::new(nodes, demand, vec![1.0; n + 1], num_mhc, 7.0, 2.0, 1.0)
    }

    #[test]
    fn counts_match_closed_forms() {
        let limits = OracleLimits::default();
        assert_eq!(enumerate_routings(&cluster(3, 1), &limits, |_| {}).unwrap(), 6);
        assert_eq!(enumerate_routings(&cluster(3, 2), &limits, |_| {}).unwrap(), 6);
        assert_eq!(enumerate_routings(&cluster(4, 2), &limits, |_| {}).unwrap(), 36);
        assert_eq!(enumerate_routings(&cluster(5, 3), &limits, |_| {}).unwrap(), 120);
    }

    #[test]
    fn routings_are_distinct_and_complete() {
        let inst = cluster(5, 2);
        let all = all_routings(&inst, &OracleLimits::default()).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for routes in &all {
            assert_eq!(routes.len(), 2);
            assert!(routes.iter().all(|r| !r.is_empty()));
            let mut flat: Vec<usize> = routes.iter().flatten().copied().collect();
            flat.sort();
            assert_eq!(flat, vec![1, 2, 3, 4, 5]);
            let mut key = routes.clone();
            key.sort();
            assert!(seen.insert(key));
        }
    }

    #[test]
    fn fewer_customers_than_mhcs_pads_with_empty_routes() {
        let all = all_routings(&cluster(2, 3), &OracleLimits::default()).unwrap();
        assert_eq!(all, vec![vec![vec![1], vec![2], vec![]]]);
    }

    #[test]
    fn size_errors() {
        let limits = OracleLimits::default();
        assert!(matches!(exact_solve(&cluster(9, 2), &limits), Err(Error::TooLarge { size: 9, .. })));
        assert!(matches!(exact_solve(&cluster(4, 4), &limits), Err(Error::TooLarge { size: 4, .. })));
        let tight = OracleLimits { max_resupply: 1, ..limits };
        let err = best_truck_order(&[vec![1, 2, 3, 4, 5]], &cluster(5, 1), &tight).unwrap_err();
        assert!(matches!(err, Error::TooLarge { what: "resupply point set", .. }));
    }

    #[test]
    fn single_resupply_matches_the_heuristic() {
        let inst = crate::sync::tests::tiny4();
        let routes = vec![vec![1, 2, 3]];
        let (_, exact) = best_truck_order(&routes, &inst, &OracleLimits::default()).unwrap();
        let (_, heur) = schedule(&routes, &inst).unwrap();
        assert!((objective(&exact) - objective(&heur)).abs() < 1e-9);
        assert!((objective(&exact) - (42.0 + 2.0 * 200f64.sqrt())).abs() < 1e-6);
    }

    #[test]
    fn tiny4_optimum_is_no_worse_than_hand_value() {
        let inst = crate::sync::tests::tiny4();
        let exact = exact_solve(&inst, &OracleLimits::default()).unwrap();
        assert!(exact.objective <= 42.0 + 2.0 * 200f64.sqrt() + 1e-6);
        assert!(crate::solution::validate_solution(&inst, &exact.solution, &exact.schedule).unwrap().passed);
    }
}
