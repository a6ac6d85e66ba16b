//! Resupply planning and truck synchronization for a fixed set of MHC routes.
//!
//! Evaluation runs in three steps:
//!
//! 1. [`plan_loads`] walks each route with the inventory recursion and marks
//!    the nodes after which the MHC cannot cover the next customer.
//! 2. [`order_truck`] sorts those resupply nodes by completion time.
//! 3. [`settle`] drives the truck along that order, fixing who waits for
//!    whom and shifting each route's downstream completions.
//!
//! [`schedule`] repeats 2 and 3 until the order no longer changes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, EPS};
use crate::solution::{truck_tour_length, Schedule, Solution};

/// A refill handed to an MHC after service at `node`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResupplyPoint {
    /// Index of the node within its route.
    pub position: usize,
    pub node: usize,
    /// Units per product.
    pub refill: Vec<f64>,
}

/// Depot load and en-route refills for one route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadPlan {
    pub initial_load: Vec<f64>,
    pub resupply_points: Vec<ResupplyPoint>,
}

/// Per-product demand of the longest run of nodes starting at `start` whose
/// total demand fits in one MHC.
fn prefix_fill(route: &[usize], start: usize, inst: &Instance) -> Vec<f64> {
    let mut load = vec![0.0; inst.num_products];
    let mut total = 0.0;
    for &node in &route[start..] {
        let need = inst.total_demand(node);
        if total + need > inst.capacity + EPS {
            break;
        }
        total += need;
        for (slot, d) in load.iter_mut().zip(&inst.demand[node]) {
            *slot += d;
        }
    }
    load
}

/// Computes the depot load and the resupply points of `route`.
///
/// The MHC leaves the depot with the demand of the longest route prefix that
/// fits. Node `i_n` becomes a resupply point when some product left on board
/// after serving it is short of the demand of `i_{n+1}`; the refill then tops
/// up to the demand of the longest following run that fits.
pub fn plan_loads(route: &[usize], inst: &Instance) -> Result<LoadPlan> {
    for &node in route {
        let need = inst.total_demand(node);
        if need > inst.capacity + EPS {
            return Err(Error::UnservableNode {
                node,
                demand: need,
                capacity: inst.capacity,
            });
        }
    }
    if route.is_empty() {
        return Ok(LoadPlan {
            initial_load: vec![0.0; inst.num_products],
            resupply_points: Vec::new(),
        });
    }

    let initial_load = prefix_fill(route, 0, inst);
    let mut inventory = initial_load.clone();
    let mut resupply_points = Vec::new();
    for (pos, &node) in route.iter().enumerate() {
        for (inv, d) in inventory.iter_mut().zip(&inst.demand[node]) {
            *inv -= d;
        }
        let Some(&next) = route.get(pos + 1) else {
            break;
        };
        let short = inventory
            .iter()
            .zip(&inst.demand[next])
            .any(|(inv, d)| *inv < d - EPS);
        if !short {
            continue;
        }
        let target = prefix_fill(route, pos + 1, inst);
        let mut headroom = inst.capacity - inventory.iter().sum::<f64>();
        let mut refill = vec![0.0; inst.num_products];
        for ((q, want), have) in refill.iter_mut().zip(&target).zip(&inventory) {
            let amount = (want - have).max(0.0).min(headroom.max(0.0));
            *q = amount;
            headroom -= amount;
        }
        for (inv, q) in inventory.iter_mut().zip(&refill) {
            *inv += q;
        }
        resupply_points.push(ResupplyPoint {
            position: pos,
            node,
            refill,
        });
    }
    Ok(LoadPlan {
        initial_load,
        resupply_points,
    })
}

/// Completion times when every resupply starts the moment service ends.
pub fn provisional_completions(routes: &[Vec<usize>], plans: &[LoadPlan], inst: &Instance) -> Vec<f64> {
    let mut completion = vec![0.0; inst.nodes.len()];
    for (route, plan) in routes.iter().zip(plans) {
        let mut points = plan.resupply_points.iter().peekable();
        let mut prev = 0;
        let mut departure = 0.0;
        for (pos, &node) in route.iter().enumerate() {
            let c = departure + inst.t(prev, node) + inst.service_time[node];
            completion[node] = c;
            departure = c;
            if points.peek().is_some_and(|p| p.position == pos) {
                points.next();
                departure += inst.resupply_time;
            }
            prev = node;
        }
    }
    completion
}

/// Orders all resupply nodes by completion time, then route index, then
/// position in the route.
pub fn order_truck(plans: &[LoadPlan], completion: &[f64]) -> Vec<usize> {
    let mut keyed: Vec<(f64, usize, usize, usize)> = plans
        .iter()
        .enumerate()
        .flat_map(|(r, plan)| {
            plan.resupply_points
                .iter()
                .map(move |p| (completion[p.node], r, p.position, p.node))
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    keyed.into_iter().map(|k| k.3).collect()
}

struct Cursor {
    next: usize,
    prev: usize,
    departure: f64,
}

/// Runs the truck along `order` and settles every wait and completion time.
///
/// `order` must list each resupply node once and keep the route order of
/// resupply nodes that share a route.
pub fn settle(routes: &[Vec<usize>], order: &[usize], plans: &[LoadPlan], inst: &Instance) -> Result<Schedule> {
    let n = inst.nodes.len();
    let xi = inst.resupply_time;
    let mut sched = Schedule::empty(n, inst.num_products);

    // node -> (route, position) for resupply nodes
    let mut owner: Vec<Option<(usize, usize)>> = vec![None; n];
    for (r, plan) in plans.iter().enumerate() {
        for p in &plan.resupply_points {
            owner[p.node] = Some((r, p.position));
        }
    }

    // Inventory does not depend on timing.
    for (route, plan) in routes.iter().zip(plans) {
        let mut inventory = plan.initial_load.clone();
        let mut points = plan.resupply_points.iter().peekable();
        for (pos, &node) in route.iter().enumerate() {
            sched.inventory_on_arrival[node].clone_from(&inventory);
            for (inv, d) in inventory.iter_mut().zip(&inst.demand[node]) {
                *inv -= d;
            }
            if let Some(p) = points.next_if(|p| p.position == pos) {
                sched.resupplied[node].clone_from(&p.refill);
                for (inv, q) in inventory.iter_mut().zip(&p.refill) {
                    *inv += q;
                }
            }
        }
    }

    let mut cursors: Vec<Cursor> = routes
        .iter()
        .map(|_| Cursor { next: 0, prev: 0, departure: 0.0 })
        .collect();
    // Computes completions up to and including `upto`. Every resupply node
    // strictly before `upto` must already have been served by the truck.
    let advance = |cursor: &mut Cursor, route: &[usize], upto: usize, sched: &mut Schedule, served: &[bool]| -> Result<()> {
        while cursor.next <= upto {
            let node = route[cursor.next];
            let c = cursor.departure + inst.t(cursor.prev, node) + inst.service_time[node];
            sched.completion[node] = c;
            cursor.prev = node;
            if cursor.next < upto {
                if owner[node].is_some() {
                    if !served[node] {
                        return Err(Error::TruckOrder { node: route[upto] });
                    }
                    cursor.departure = c + sched.mhc_wait[node] + xi;
                } else {
                    cursor.departure = c;
                }
            }
            cursor.next += 1;
        }
        Ok(())
    };

    let mut served = vec![false; n];
    let mut truck_prev = 0;
    let mut truck_departure = 0.0;
    for &node in order {
        let Some((r, pos)) = owner.get(node).copied().flatten() else {
            return Err(Error::MalformedSolution(format!("truck order lists {node}, which needs no resupply")));
        };
        if served[node] {
            return Err(Error::MalformedSolution(format!("truck order lists {node} twice")));
        }
        if cursors[r].next > pos {
            return Err(Error::TruckOrder { node });
        }
        advance(&mut cursors[r], &routes[r], pos, &mut sched, &served)?;
        let c = sched.completion[node];
        let a = truck_departure + inst.r(truck_prev, node);
        sched.truck_arrival[node] = a;
        sched.truck_wait[node] = (c - a).max(0.0);
        sched.mhc_wait[node] = (a - c).max(0.0);
        let start = a.max(c);
        truck_departure = start + xi;
        truck_prev = node;
        served[node] = true;
        cursors[r].departure = start + xi;
    }

    let mut latest: f64 = 0.0;
    for (r, route) in routes.iter().enumerate() {
        if route.is_empty() {
            continue;
        }
        let last = route.len() - 1;
        if cursors[r].next <= last {
            advance(&mut cursors[r], route, last, &mut sched, &served)?;
        }
        if owner[route[last]].is_some() && !served[route[last]] {
            return Err(Error::TruckOrder { node: route[last] });
        }
        latest = latest.max(sched.completion[route[last]] + inst.t(route[last], 0));
    }
    sched.latest_arrival = latest;
    sched.truck_total_time = truck_tour_length(order, inst);
    sched.passes = 1;
    Ok(sched)
}

/// Upper bound on truck reorderings for `points` resupply nodes.
pub fn reorder_cap(points: usize) -> usize {
    points + 2
}

/// Plans loads, orders the truck, and settles until the truck order agrees
/// with the settled completion times.
///
/// If the order is still moving after [`reorder_cap`] reorderings the last
/// schedule is returned with `stabilized = false`; it is consistent for the
/// order it was computed with.
pub fn schedule(routes: &[Vec<usize>], inst: &Instance) -> Result<(Solution, Schedule)> {
    let plans = routes
        .iter()
        .map(|route| plan_loads(route, inst))
        .collect::<Result<Vec<_>>>()?;
    schedule_with_plans(routes, &plans, inst)
}

pub(crate) fn schedule_with_plans(routes: &[Vec<usize>], plans: &[LoadPlan], inst: &Instance) -> Result<(Solution, Schedule)> {
    let mut order = order_truck(plans, &provisional_completions(routes, plans, inst));
    let cap = reorder_cap(order.len());
    let mut reorders = 0;
    let mut passes = 0;
    let sched = loop {
        let mut sched = settle(routes, &order, plans, inst)?;
        passes += 1;
        let next = order_truck(plans, &sched.completion);
        if next == order {
            sched.stabilized = true;
        } else if reorders < cap {
            reorders += 1;
            order = next;
            continue;
        } else {
            sched.stabilized = false;
        }
        sched.passes = passes;
        break sched;
    };

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
