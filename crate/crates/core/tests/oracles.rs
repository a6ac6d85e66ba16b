//! Cross-checks against reference solvers written from scratch here.

mod common;

use common::{dist, permute, random_instance, Shape};
use mhc_core::alns::AlnsConfig;
use mhc_core::multitrip::{mt_schedule, solve_multitrip, MtSolution};
use mhc_core::oracle::{exact_solve, OracleLimits};
use mhc_core::Instance;

fn trip_time(trip: &[usize], inst: &Instance) -> f64 {
    let mut prev = 0;
    let mut time = 0.0;
    for &v in trip {
        time += dist(inst, prev, v) + inst.service_time[v];
        prev = v;
    }
    time + dist(inst, prev, 0)
}

/// Latest depot arrival when MHC `i` runs `trips[i]` and reloads at a single
/// FIFO bay (earliest arrival first, ties to the lower MHC index).
fn simulate_bay(trips: &[Vec<Vec<usize>>], inst: &Instance) -> f64 {
    let m = trips.len();
    let mut next = vec![0usize; m];
    let mut clock: Vec<f64> = trips.iter().map(|t| t.first().map_or(0.0, |trip| trip_time(trip, inst))).collect();
    for (i, t) in trips.iter().enumerate() {
        next[i] = usize::from(!t.is_empty());
    }
    let mut bay_free = 0.0f64;
    loop {
        let waiting = (0..m)
            .filter(|&i| next[i] < trips[i].len())
            .min_by(|&a, &b| clock[a].total_cmp(&clock[b]).then(a.cmp(&b)));
        let Some(i) = waiting else { break };
        let start = clock[i].max(bay_free);
        bay_free = start + inst.resupply_time;
        clock[i] = bay_free + trip_time(&trips[i][next[i]], inst);
        next[i] += 1;
    }
    clock.into_iter().fold(0.0, f64::max)
}

/// Every way of cutting `route` into capacity-feasible consecutive trips.
fn splits(route: &[usize], inst: &Instance, visit: &mut impl FnMut(Vec<Vec<usize>>)) {
    let n = route.len();
    for mask in 0u32..(1 << (n - 1)) {
        let mut trips = vec![vec![route[0]]];
        for (k, &v) in route.iter().enumerate().skip(1) {
            if mask & (1 << (k - 1)) != 0 {
                trips.push(Vec::new());
            }
            trips.last_mut().unwrap().push(v);
        }
        if trips
            .iter()
            .all(|t| t.iter().map(|&v| inst.total_demand(v)).sum::<f64>() <= inst.capacity + 1e-9)
        {
            visit(trips);
        }
    }
}

/// Minimum latest arrival over all two-MHC multi-trip plans.
fn exhaustive_two_mhc(inst: &Instance) -> f64 {
    let mut best = f64::INFINITY;
    let mut perm: Vec<usize> = inst.customers().collect();
    let n = perm.len();
    permute(&mut perm, 0, &mut |p| {
        for cut in 1..n {
            let (a, b) = p.split_at(cut);
            let mut first = Vec::new();
            splits(a, inst, &mut |t| first.push(t));
            splits(b, inst, &mut |tb| {
                for ta in &first {
                    best = best.min(simulate_bay(&[ta.clone(), tb.clone()], inst));
                }
            });
        }
    });
    best
}

fn shape(customers: usize, num_mhc: usize, capacity: f64) -> Shape {
    Shape {
        customers,
        num_mhc,
        products: 2,
        capacity,
        service: 10.0,
        resupply: 5.0,
        truck_speed: 1.0,
    }
}

#[test]
fn exact_solver_matches_brute_force_makespan_without_resupply() {
    for seed in 0..12 {
        let n = 3 + (seed as usize % 4);
        let m = 1 + (seed as usize % 2);
        let inst = random_instance(shape(n, m, 100.0), seed);
        let exact = exact_solve(&inst, &OracleLimits::default()).unwrap();
        let brute = common::brute_force_makespan(&inst);
        assert!((exact.objective - brute).abs() < 1e-6, "seed {seed}: {} vs {brute}", exact.objective);
        assert!(exact.solution.resupply_nodes.is_empty());
    }
}

#[test]
fn bay_simulation_agrees_with_the_multitrip_schedule() {
    for seed in 0..20 {
        let inst = random_instance(shape(6, 2, 7.0), seed);
        let mut routes = [vec![1, 2, 3], vec![4, 5, 6]];
        routes[seed as usize % 2].reverse();
        let mut checked = 0;
        splits(&routes[0], &inst, &mut |ta| {
            splits(&routes[1], &inst, &mut |tb| {
                let trips = vec![ta.clone(), tb];
                let sched = mt_schedule(&MtSolution { trips: trips.clone() }, &inst).unwrap();
                assert!((sched.latest_arrival - simulate_bay(&trips, &inst)).abs() < 1e-6);
                checked += 1;
            });
        });
        assert!(checked > 0);
    }
}

#[test]
fn multitrip_search_is_close_to_exhaustive() {
    let cfg = AlnsConfig {
        iter_max: 3000,
        ..AlnsConfig::default()
    };
    let mut within = 0;
    let total = 12;
    for seed in 0..total {
        let n = 4 + (seed as usize % 3);
        let inst = random_instance(shape(n, 2, 8.0), 100 + seed);
        let exact = exhaustive_two_mhc(&inst);
        let found = solve_multitrip(&inst, &AlnsConfig { seed, ..cfg.clone() }).unwrap();
        assert!(found.objective >= exact - 1e-6, "seed {seed}: search beat the exhaustive optimum");
        let gap = (found.objective - exact) / exact;
        println!("seed {seed}: n {n} search {:.3} exhaustive {exact:.3} gap {:.2}%", found.objective, 100.0 * gap);
        if gap <= 0.02 {
            within += 1;
        }
    }
    assert!(within * 10 >= total * 9, "{within}/{total} within 2%");
}
