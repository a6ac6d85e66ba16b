//! Instance builders and independent reference computations shared by the
//! integration tests. Nothing here calls into the solver beyond `Instance`.

#![allow(dead_code)]

use mhc_core::{Instance, Node};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub customers: usize,
    pub num_mhc: usize,
    pub products: usize,
    pub capacity: f64,
    pub service: f64,
    pub resupply: f64,
    pub truck_speed: f64,
}

/// Integer grid coordinates in [0, 50]², one product per customer with a
/// demand of 1 to 5 units.
pub fn random_instance(shape: Shape, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut nodes = vec![Node::new(0, 25.0, 25.0)];
    let mut demand = vec![vec![0.0; shape.products]];
    let mut service = vec![0.0];
    for id in 1..=shape.customers {
        nodes.push(Node::new(id, rng.gen_range(0..=50) as f64, rng.gen_range(0..=50) as f64));
        let mut d = vec![0.0; shape.products];
        d[rng.gen_range(0..shape.products)] = rng.gen_range(1..=5) as f64;
        demand.push(d);
        service.push(shape.service);
    }
    Instance::new(
        nodes,
        demand,
        service,
        shape.num_mhc,
        shape.capacity,
        shape.resupply,
        shape.truck_speed,
    )
}

/// A uniformly shuffled routing with every route nonempty.
pub fn random_routing(inst: &Instance, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut customers: Vec<usize> = inst.customers().collect();
    customers.shuffle(&mut rng);
    let m = inst.num_mhc;
    let mut cuts: Vec<usize> = (1..customers.len()).collect();
    cuts.shuffle(&mut rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(m - 1).collect();
    cuts.sort_unstable();
    let mut routes = Vec::with_capacity(m);
    let mut start = 0;
    for cut in cuts.into_iter().chain(std::iter::once(customers.len())) {
        routes.push(customers[start..cut].to_vec());
        start = cut;
    }
    routes
}

pub fn dist(inst: &Instance, i: usize, j: usize) -> f64 {
    let (a, b) = (&inst.nodes[i], &inst.nodes[j]);
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

/// Travel plus service of a closed route, recomputed from coordinates.
pub fn plain_route_time(route: &[usize], inst: &Instance) -> f64 {
    if route.is_empty() {
        return 0.0;
    }
    let mut stops = vec![0];
    stops.extend_from_slice(route);
    stops.push(0);
    let travel: f64 = stops.windows(2).map(|w| dist(inst, w[0], w[1])).sum();
    travel + route.iter().map(|&v| inst.service_time[v]).sum::<f64>()
}

/// Minimum over all orderings of `nodes` of [`plain_route_time`].
pub fn best_order_time(nodes: &[usize], inst: &Instance) -> f64 {
    let mut best = f64::INFINITY;
    let mut perm = nodes.to_vec();
    permute(&mut perm, 0, &mut |p| best = best.min(plain_route_time(p, inst)));
    best
}

pub fn permute(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Minimum makespan over every assignment of customers to `num_mhc`
/// nonempty routes, each route in its best order. Exponential; small n only.
pub fn brute_force_makespan(inst: &Instance) -> f64 {
    let n = inst.num_customers();
    let m = inst.num_mhc;
    let mut best = f64::INFINITY;
    let mut assignment = vec![0usize; n];
    loop {
        let mut groups = vec![Vec::new(); m];
        for (k, &g) in assignment.iter().enumerate() {
            groups[g].push(k + 1);
        }
        if groups.iter().all(|g| !g.is_empty()) {
            let span = groups.iter().map(|g| best_order_time(g, inst)).fold(0.0, f64::max);
            best = best.min(span);
        }
        let mut k = 0;
        while k < n && assignment[k] == m - 1 {
            assignment[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
        assignment[k] += 1;
    }
    best
}
