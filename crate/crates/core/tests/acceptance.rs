//! Acceptance suite. Runs as a plain binary so every criterion prints one
//! PASS/FAIL line whatever the capture settings; exits nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{random_instance, random_routing, Shape};
use mhc_core::alns::{self, accept, search, AlnsConfig, AlnsOutcome, OperatorStats};
use mhc_core::construction::construct_routes;
use mhc_core::experiment::{self, run_job};
use mhc_core::instance::{generate_instance, synthetic_coords};
use mhc_core::multitrip::GapReport;
use mhc_core::oracle::{exact_solve, OracleLimits};
use mhc_core::report::write_trace;
use mhc_core::solution::{objective, SolutionDocument};
use mhc_core::sync::schedule;
use mhc_core::{validate_solution, GeneratorConfig, Instance, NetworkKind, Node, SyncModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn FnOnce() -> Outcome + 'a>);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn thirty_node(seed: u64) -> Instance {
    let kind = NetworkKind::ALL[seed as usize % 3];
    let cfg = GeneratorConfig {
        network_kind: kind,
        n_nodes: 30,
        seed,
        ..GeneratorConfig::default()
    };
    generate_instance(&cfg, &synthetic_coords(kind, 30, seed)).unwrap()
}

struct SuiteRun {
    outcome: AlnsOutcome,
    feasible: bool,
    wall: Duration,
}

/// The 30-node suite shared by the feasibility and improvement criteria.
fn thirty_node_suite() -> Vec<SuiteRun> {
    (0..100u64)
        .map(|seed| {
            let inst = thirty_node(seed);
            let cfg = AlnsConfig {
                iter_max: 10_000,
                seed,
                ..AlnsConfig::default()
            };
            let start = Instant::now();
            let outcome = alns::run(&inst, &cfg).unwrap();
            let wall = start.elapsed();
            let feasible = validate_solution(&inst, &outcome.solution, &outcome.schedule).unwrap().passed;
            SuiteRun { outcome, feasible, wall }
        })
        .collect()
}

fn feasibility(suite: &[SuiteRun]) -> Outcome {
    let feasible = suite.iter().filter(|r| r.feasible).count();
    let slowest = suite.iter().map(|r| r.wall).max().unwrap();
    check(
        feasible == suite.len() && slowest < Duration::from_secs(120),
        format!("{feasible}/{} best solutions feasible, slowest run {:.2?}", suite.len(), slowest),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut within = 0;
    let mut slowest = Duration::ZERO;
    let total = 30;
    for seed in 0..total as u64 {
        let n = 5 + (seed as usize % 3);
        let kind = NetworkKind::ALL[(seed as usize / 3) % 3];
        let cfg = GeneratorConfig {
            network_kind: kind,
            n_nodes: n,
            num_mhc: 2,
            num_products: 2,
            seed,
            ..GeneratorConfig::default()
        };
        let inst = generate_instance(&cfg, &synthetic_coords(kind, n, seed)).unwrap();
        let start = Instant::now();
        let exact = exact_solve(&inst, &OracleLimits::default()).unwrap();
        slowest = slowest.max(start.elapsed());
        let found = alns::run(&inst, &AlnsConfig { iter_max: 5000, seed, ..AlnsConfig::default() }).unwrap();
        if found.objective <= 1.02 * exact.objective {
            within += 1;
        }
    }
    check(
        within * 10 >= total * 9 && slowest <= Duration::from_secs(60),
        format!("{within}/{total} within 2% of the exact optimum, slowest oracle {slowest:.2?}"),
    )
}

/// Depot (0,0) and customers at (0,10), (10,10), (10,0), demand 4 each,
/// capacity 10, no service, resupply 2, truck as fast as the MHC.
///
/// The MHC leaves with 8 units and is resupplied after customer 2 (c = 20).
/// The truck reaches it at √200 < 20 and waits, so customer 3 completes at
/// 20 + 2 + 10 = 32 and the MHC is home at 42. The truck tour is 2√200.
fn tiny4() -> Instance {
    let nodes = vec![Node::new(0, 0.0, 0.0), Node::new(1, 0.0, 10.0), Node::new(2, 10.0, 10.0), Node::new(3, 10.0, 0.0)];
    Instance::new(nodes, vec![vec![0.0], vec![4.0], vec![4.0], vec![4.0]], vec![0.0; 4], 1, 10.0, 2.0, 1.0)
}

fn scheduler_correctness() -> Outcome {
    let inst = tiny4();
    let (_, sched) = schedule(&[vec![1, 2, 3]], &inst).unwrap();
    let tiny = objective(&sched);
    let expected = 42.0 + 2.0 * 200f64.sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pairs = 1000;
    let (mut passed, mut one_waits, mut stabilized) = (0, 0, 0);
    for _ in 0..pairs {
        let customers = rng.gen_range(2..=15);
        let shape = Shape {
            customers,
            num_mhc: rng.gen_range(1..=4usize).min(customers),
            products: rng.gen_range(1..=3),
            capacity: rng.gen_range(5..=20) as f64,
            service: rng.gen_range(0..=20) as f64,
            resupply: rng.gen_range(0..=15) as f64,
            truck_speed: rng.gen_range(1..=4) as f64 * 0.5,
        };
        let seed = rng.gen();
        let inst = random_instance(shape, seed);
        let (sol, sched) = schedule(&random_routing(&inst, seed), &inst).unwrap();
        passed += usize::from(validate_solution(&inst, &sol, &sched).unwrap().passed);
        one_waits += usize::from(
            sol.resupply_nodes
                .iter()
                .all(|&v| sched.mhc_wait[v].min(sched.truck_wait[v]) <= 1e-9),
        );
        stabilized += usize::from(sched.stabilized);
    }
    check(
        (tiny - expected).abs() <= 1e-6 && passed == pairs && one_waits == pairs && stabilized * 100 >= pairs * 99,
        format!(
            "TINY-4 objective {tiny:.9} (expected {expected:.9}); {passed}/{pairs} pass the checker, \
             {one_waits}/{pairs} single-party waits, {stabilized}/{pairs} stabilized"
        ),
    )
}

fn acceptance_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let trials = 100_000;
    let temperature = 7.5;
    let accepted = (0..trials).filter(|_| accept(107.5, 100.0, temperature, &mut rng)).count();
    let freq = accepted as f64 / trials as f64;
    let improving = (0..trials)
        .filter(|k| accept(100.0 - (*k as f64 % 50.0) - 1e-3, 100.0, temperature, &mut rng))
        .count();
    let target = (-1f64).exp();
    check(
        (freq - target).abs() <= 0.01 && improving == trials,
        format!("acceptance at Δ/T = 1: {freq:.4} (e⁻¹ = {target:.4}); improving moves accepted {improving}/{trials}"),
    )
}

fn adaptive_weights() -> Outcome {
    let inst = thirty_node(7);
    let model = SyncModel::new(&inst);
    let cfg = AlnsConfig { iter_max: 3000, seed: 7, ..AlnsConfig::default() };
    let mut segments = 0;
    let mut bad = Vec::new();
    search(&model, &cfg, construct_routes(&model), |iteration, stats: &OperatorStats| {
        segments += 1;
        let sum: f64 = stats.weights.iter().sum();
        if iteration % 150 != 0
            || stats.weights.iter().any(|&w| w <= 0.0)
            || (sum - 1.0).abs() > 1e-12
            || stats.segment_scores.iter().any(|&s| s != 0.0)
            || stats.segment_uses.iter().any(|&u| u != 0)
        {
            bad.push(iteration);
        }
    })
    .unwrap();
    check(
        cfg.segment_length == 150 && segments == 20 && bad.is_empty(),
        format!("{segments} segment updates of 150 iterations, {} violations", bad.len()),
    )
}

fn comparison_direction() -> Outcome {
    let unit = GapReport::new(876.0, 465.0, 777.0, 554.0);
    let unit_ok = (unit.distance_gap - 12.741312741312742).abs() < 1e-12;

    let batch = experiment::comparison();
    let outcomes: Vec<_> = batch.jobs().iter().map(|job| run_job(&batch, job)).collect();
    let mut lines = Vec::new();
    let mut per_cell_ok = true;
    for cell in &batch.cells {
        let gaps: Vec<_> = outcomes
            .iter()
            .filter_map(|o| o.gap.as_ref())
            .filter(|g| g.network == cell.network.to_string() && g.capacity == cell.capacity && g.num_mhc == cell.num_mhc)
            .collect();
        per_cell_ok &= gaps.len() >= 10;
        let n = gaps.len().max(1) as f64;
        lines.push(format!(
            "    {:<2} Q={} m={} n={}: distance gap {:+.2}%, arrival gap {:+.2}%",
            cell.network,
            cell.capacity,
            cell.num_mhc,
            gaps.len(),
            gaps.iter().map(|g| g.distance_gap).sum::<f64>() / n,
            gaps.iter().map(|g| g.arrival_gap).sum::<f64>() / n,
        ));
    }
    let all: Vec<_> = outcomes.iter().filter_map(|o| o.gap.as_ref()).collect();
    let n = all.len().max(1) as f64;
    let distance = all.iter().map(|g| g.distance_gap).sum::<f64>() / n;
    let arrival = all.iter().map(|g| g.arrival_gap).sum::<f64>() / n;
    let detail = format!(
        "unit gap {:.2}%; over {} instances mean distance gap {distance:+.2}%, mean arrival gap {arrival:+.2}%\n{}",
        unit.distance_gap,
        all.len(),
        lines.join("\n")
    );
    check(unit_ok && per_cell_ok && distance > 0.0 && arrival > 0.0, detail)
}

fn beats_construction(suite: &[SuiteRun]) -> Outcome {
    let ratios: Vec<f64> = suite.iter().map(|r| r.outcome.objective / r.outcome.initial_objective).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let worst = ratios.iter().copied().fold(0.0, f64::max);
    check(mean <= 0.95, format!("mean best/construction ratio {mean:.4} (worst {worst:.4})"))
}

fn scale() -> Outcome {
    let kind = NetworkKind::R;
    let cfg = GeneratorConfig {
        network_kind: kind,
        n_nodes: 100,
        num_mhc: 8,
        num_products: 2,
        seed: 8,
        ..GeneratorConfig::default()
    };
    let inst = generate_instance(&cfg, &synthetic_coords(kind, 100, 8)).unwrap();
    let start = Instant::now();
    let out = alns::run(&inst, &AlnsConfig { iter_max: 10_000, seed: 8, ..AlnsConfig::default() }).unwrap();
    let wall = start.elapsed();
    let feasible = validate_solution(&inst, &out.solution, &out.schedule).unwrap().passed;
    check(
        wall < Duration::from_secs(30 * 60) && out.trace.len() == 10_000 && feasible,
        format!("100 nodes, 8 MHCs, 10000 iterations in {wall:.2?}, objective {:.2}", out.objective),
    )
}

fn run_bytes(inst: &Instance, cfg: &AlnsConfig) -> (f64, Vec<u8>, Vec<u8>) {
    let out = alns::run(inst, cfg).unwrap();
    let mut trace = Vec::new();
    write_trace(&mut trace, &out.trace).unwrap();
    let doc = serde_json::to_vec(&SolutionDocument::new(inst, out.solution, out.schedule)).unwrap();
    (out.objective, trace, doc)
}

fn batch_bytes() -> Vec<u8> {
    let mut batch = experiment::comparison();
    batch.cells.truncate(2);
    batch.replicates = 2;
    batch.alns.iter_max = 300;
    let outcomes: Vec<_> = batch.jobs().iter().map(|job| run_job(&batch, job)).collect();
    let records: Vec<_> = outcomes.iter().map(|o| o.record.clone()).collect();
    let gaps: Vec<_> = outcomes.iter().filter_map(|o| o.gap.clone()).collect();
    let mut bytes = Vec::new();
    experiment::write_runs(&mut bytes, &records).unwrap();
    experiment::write_summary(&mut bytes, &experiment::summarize(&records)).unwrap();
    mhc_core::report::write_gap_table(&mut bytes, &gaps).unwrap();
    bytes
}

fn determinism() -> Outcome {
    let inst = thirty_node(42);
    let cfg = AlnsConfig { iter_max: 2000, seed: 42, ..AlnsConfig::default() };
    let (fa, ta, da) = run_bytes(&inst, &cfg);
    let (fb, tb, db) = run_bytes(&inst, &cfg);
    let same_batch = batch_bytes() == batch_bytes();
    check(
        fa.to_bits() == fb.to_bits() && ta == tb && da == db && same_batch,
        format!(
            "objective {fa} vs {fb}; trace {} bytes identical: {}; solution identical: {}; batch CSVs identical: {same_batch}",
            ta.len(),
            ta == tb,
            da == db
        ),
    )
}

fn main() -> ExitCode {
    println!("running acceptance criteria");
    let start = Instant::now();
    let suite = thirty_node_suite();
    println!("30-node suite: 100 runs of 10000 iterations in {:.1?}", start.elapsed());
    let criteria: Vec<Criterion> = vec![
        ("feasibility", Box::new(|| feasibility(&suite))),
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("scheduler correctness", Box::new(scheduler_correctness)),
        ("acceptance rule", Box::new(acceptance_rule)),
        ("adaptive weights", Box::new(adaptive_weights)),
        ("comparison direction", Box::new(comparison_direction)),
        ("beats construction", Box::new(|| beats_construction(&suite))),
        ("scale", Box::new(scale)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let (status, detail) = match result {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {} {name}: {status} [{:.1?}] {detail}", k + 1, start.elapsed());
    }
    println!("{} of 9 criteria passed", 9 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
