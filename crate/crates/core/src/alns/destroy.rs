//! The nine destroy operators.

use std::collections::HashMap;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::instance::Instance;
use crate::model::Evaluation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DestroyOp {
    RandomNode,
    LongestNodeCost,
    ResupplyNodes,
    WaitingNodes,
    EntireRoute,
    LongestRoute,
    AfterResupply,
    PriorResupply,
    Historical,
}

impl DestroyOp {
    pub const ALL: [DestroyOp; 9] = [
        DestroyOp::RandomNode,
        DestroyOp::LongestNodeCost,
        DestroyOp::ResupplyNodes,
        DestroyOp::WaitingNodes,
        DestroyOp::EntireRoute,
        DestroyOp::LongestRoute,
        DestroyOp::AfterResupply,
        DestroyOp::PriorResupply,
        DestroyOp::Historical,
    ];

    /// One-based operator number.
    pub fn id(self) -> usize {
        self.index() + 1
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_id(id: usize) -> Option<DestroyOp> {
        id.checked_sub(1).and_then(|i| Self::ALL.get(i).copied())
    }

    pub fn name(self) -> &'static str {
        match self {
            DestroyOp::RandomNode => "random_node",
            DestroyOp::LongestNodeCost => "longest_node_cost",
            DestroyOp::ResupplyNodes => "resupply_nodes",
            DestroyOp::WaitingNodes => "waiting_nodes",
            DestroyOp::EntireRoute => "entire_route",
            DestroyOp::LongestRoute => "longest_route",
            DestroyOp::AfterResupply => "after_resupply",
            DestroyOp::PriorResupply => "prior_resupply",
            DestroyOp::Historical => "historical",
        }
    }
}

/// Best objective seen for each placement, keyed by (node, route, predecessor).
#[derive(Debug, Clone, Default)]
pub struct History {
    best: HashMap<(usize, usize, usize), f64>,
}

impl History {
    pub fn record(&mut self, routes: &[Vec<usize>], objective: f64) {
        for (r, route) in routes.iter().enumerate() {
            let mut pred = 0;
            for &node in route {
                self.best
                    .entry((node, r, pred))
                    .and_modify(|v| *v = v.min(objective))
                    .or_insert(objective);
                pred = node;
            }
        }
    }

    pub fn get(&self, node: usize, route: usize, pred: usize) -> Option<f64> {
        self.best.get(&(node, route, pred)).copied()
    }

    pub fn len(&self) -> usize {
        self.best.len()
    }

    pub fn is_empty(&self) -> bool {
        self.best.is_empty()
    }
}

/// Routes with some nodes taken out, and the nodes taken out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Destroyed {
    pub partial: Vec<Vec<usize>>,
    pub removed: Vec<usize>,
    /// The chosen operator removed nothing and random-node removal ran instead.
    pub fell_back: bool,
}

fn count(fraction: f64, of: usize) -> usize {
    ((fraction * of as f64).ceil() as usize).clamp(1, of.max(1))
}

fn nonempty_routes(routes: &[Vec<usize>]) -> Vec<usize> {
    (0..routes.len()).filter(|&r| !routes[r].is_empty()).collect()
}

fn random_route<R: Rng>(routes: &[Vec<usize>], rng: &mut R) -> Option<usize> {
    let candidates = nonempty_routes(routes);
    if candidates.is_empty() {
        None
    } else {
        Some(candidates[rng.gen_range(0..candidates.len())])
    }
}

fn random_subset<R: Rng>(items: &[usize], amount: usize, rng: &mut R) -> Vec<usize> {
    let mut picked = index::sample(rng, items.len(), amount.min(items.len())).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| items[i]).collect()
}

/// Nodes ranked by `score`, highest first, ties to the lower id.
fn top_by(mut scored: Vec<(usize, f64)>, amount: usize) -> Vec<usize> {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.into_iter().take(amount).map(|(node, _)| node).collect()
}

fn select<P, R: Rng>(
    op: DestroyOp,
    eval: &Evaluation<P>,
    history: &History,
    fraction: f64,
    inst: &Instance,
    rng: &mut R,
) -> Vec<usize> {
    let routes = &eval.routes;
    let n = inst.num_customers();
    match op {
        DestroyOp::RandomNode => match random_route(routes, rng) {
            Some(r) => random_subset(&routes[r], count(fraction, routes[r].len()), rng),
            None => Vec::new(),
        },
        DestroyOp::LongestNodeCost => {
            let mut scored = Vec::with_capacity(n);
            for route in routes {
                for (k, &node) in route.iter().enumerate() {
                    let prev = if k == 0 { 0 } else { route[k - 1] };
                    let next = route.get(k + 1).copied().unwrap_or(0);
                    scored.push((node, inst.t(prev, node) + inst.t(node, next) - inst.t(prev, next)));
                }
            }
            top_by(scored, count(fraction, n))
        }
        DestroyOp::ResupplyNodes => {
            let points = eval.resupply_nodes();
            random_subset(&points, points.len().div_ceil(2), rng)
        }
        DestroyOp::WaitingNodes => routes.iter().flatten().copied().filter(|&v| eval.waiting[v]).collect(),
        DestroyOp::EntireRoute => match random_route(routes, rng) {
            Some(r) => routes[r].clone(),
            None => Vec::new(),
        },
        DestroyOp::LongestRoute => {
            let mut longest: Option<usize> = None;
            for r in nonempty_routes(routes) {
                if longest.is_none_or(|b| eval.route_returns[r] > eval.route_returns[b]) {
                    longest = Some(r);
                }
            }
            longest.map(|r| routes[r].clone()).unwrap_or_default()
        }
        DestroyOp::AfterResupply | DestroyOp::PriorResupply => {
            let points = eval.resupply_nodes();
            let chosen = random_subset(&points, points.len().div_ceil(2), rng);
            let mut removed = Vec::new();
            for route in routes {
                for (k, &node) in route.iter().enumerate() {
                    if !chosen.contains(&node) {
                        continue;
                    }
                    if op == DestroyOp::AfterResupply {
                        for &v in &route[k + 1..] {
                            if eval.resupply[v] {
                                break;
                            }
                            removed.push(v);
                        }
                    } else {
                        for &v in route[..k].iter().rev() {
                            if eval.resupply[v] {
                                break;
                            }
                            removed.push(v);
                        }
                    }
                }
            }
            removed
        }
        DestroyOp::Historical => {
            let mut scored = Vec::with_capacity(n);
            for (r, route) in routes.iter().enumerate() {
                let mut pred = 0;
                for &node in route {
                    let seen = history.get(node, r, pred).unwrap_or(eval.objective);
                    scored.push((node, seen));
                    pred = node;
                }
            }
            top_by(scored, count(fraction, n))
        }
    }
}

/// Applies `op` to the evaluated solution. An operator that would remove
/// nothing is replaced by [`DestroyOp::RandomNode`].
pub fn destroy<P, R: Rng>(
    op: DestroyOp,
    eval: &Evaluation<P>,
    history: &History,
    fraction: f64,
    inst: &Instance,
    rng: &mut R,
) -> Destroyed {
    let mut removed = select(op, eval, history, fraction, inst, rng);
    let mut fell_back = false;
    if removed.is_empty() && op != DestroyOp::RandomNode {
        removed = select(DestroyOp::RandomNode, eval, history, fraction, inst, rng);
        fell_back = true;
    }
    let mut taken = vec![false; inst.nodes.len()];
    removed.retain(|&v| !std::mem::replace(&mut taken[v], true));
    let partial = eval
        .routes
        .iter()
        .map(|route| route.iter().copied().filter(|&v| !taken[v]).collect())
        .collect();
    Destroyed {
        partial,
        removed,
        fell_back,
    }
}
