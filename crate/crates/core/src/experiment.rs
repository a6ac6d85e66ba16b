//! Batches of generated instances solved with one configuration.
//!
//! A batch expands into jobs (cell x replicate). Each job's seed is mixed
//! from the batch seed and the job index, so jobs can run in any order or in
//! parallel and still produce the same rows.

use std::io::Write;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::alns::{self, AlnsConfig, OperatorStats};
use crate::error::Result;
use crate::instance::{generate_instance, synthetic_coords, GeneratorConfig, Instance, NetworkKind};
use crate::model::SyncObjective;
use crate::multitrip::{compare, solve_multitrip};
use crate::report::GapRow;
use crate::solution::{total_distance, validate_solution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Solve the synchronized model.
    Solve,
    /// Solve both models on each instance with the latest-arrival objective.
    Compare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub network: NetworkKind,
    pub nodes: usize,
    pub num_mhc: usize,
    pub num_products: usize,
    pub capacity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Batch {
    pub mode: Mode,
    pub cells: Vec<Cell>,
    pub replicates: usize,
    pub seed: u64,
    /// Template for the fields a cell does not set.
    #[serde(default)]
    pub generator: GeneratorConfig,
    #[serde(default)]
    pub alns: AlnsConfig,
}

/// 75-node instances with 4 to 6 MHCs and 100-node instances with 6 to 8,
/// on every network type, two products.
pub fn large_scale() -> Batch {
    let mut cells = Vec::new();
    for network in NetworkKind::ALL {
        for (nodes, fleets) in [(75, [4, 5, 6]), (100, [6, 7, 8])] {
            for num_mhc in fleets {
                cells.push(Cell {
                    network,
                    nodes,
                    num_mhc,
                    num_products: 2,
                    capacity: 26.0,
                });
            }
        }
    }
    Batch {
        mode: Mode::Solve,
        cells,
        replicates: 1,
        seed: 0,
        generator: GeneratorConfig::default(),
        alns: AlnsConfig::default(),
    }
}

/// 30-node single-product instances, demand 5, tight (22) and excess (32)
/// capacity, 3 and 4 MHCs, ten replicates per cell.
pub fn comparison() -> Batch {
    let mut cells = Vec::new();
    for network in NetworkKind::ALL {
        for capacity in [22.0, 32.0] {
            for num_mhc in [3, 4] {
                cells.push(Cell {
                    network,
                    nodes: 30,
                    num_mhc,
                    num_products: 1,
                    capacity,
                });
            }
        }
    }
    Batch {
        mode: Mode::Compare,
        cells,
        replicates: 10,
        seed: 0,
        generator: GeneratorConfig {
            demand_choices: vec![5],
            num_products: 1,
            ..GeneratorConfig::default()
        },
        alns: AlnsConfig {
            iter_max: 5000,
            ..AlnsConfig::default()
        },
    }
}

pub fn preset(name: &str) -> Option<Batch> {
    match name {
        "large-scale" => Some(large_scale()),
        "comparison" => Some(comparison()),
        _ => None,
    }
}

pub const PRESETS: [&str; 2] = ["large-scale", "comparison"];

/// SplitMix64 finalizer.
pub fn mix_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub index: usize,
    pub cell: Cell,
    pub replicate: usize,
    pub seed: u64,
}

impl Batch {
    pub fn jobs(&self) -> Vec<Job> {
        let mut jobs = Vec::with_capacity(self.cells.len() * self.replicates);
        for cell in &self.cells {
            for replicate in 0..self.replicates {
                let index = jobs.len();
                jobs.push(Job {
                    index,
                    cell: cell.clone(),
                    replicate,
                    seed: mix_seed(self.seed, index as u64),
                });
            }
        }
        jobs
    }

    pub fn instance(&self, job: &Job) -> Result<Instance> {
        let cfg = GeneratorConfig {
            network_kind: job.cell.network,
            n_nodes: job.cell.nodes,
            num_mhc: job.cell.num_mhc,
            num_products: job.cell.num_products,
            capacity: job.cell.capacity,
            seed: job.seed,
            ..self.generator.clone()
        };
        generate_instance(&cfg, &synthetic_coords(job.cell.network, job.cell.nodes, job.seed))
    }
}

/// One row of `runs.csv`. Solution fields are empty when the job failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub network: NetworkKind,
    pub nodes: usize,
    pub num_mhc: usize,
    pub num_products: usize,
    pub capacity: f64,
    pub replicate: usize,
    pub seed: u64,
    pub status: String,
    pub initial_objective: Option<f64>,
    pub objective: Option<f64>,
    pub latest_arrival: Option<f64>,
    pub truck_time: Option<f64>,
    pub total_distance: Option<f64>,
    pub resupplies: Option<usize>,
    pub feasible: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct JobOutcome {
    pub record: RunRecord,
    pub gap: Option<GapRow>,
    pub stats: Option<OperatorStats>,
    pub wall: Duration,
}

fn solve_job(batch: &Batch, job: &Job, record: &mut RunRecord) -> Result<(Option<GapRow>, OperatorStats)> {
    let inst = batch.instance(job)?;
    let cfg = AlnsConfig {
        seed: job.seed,
        ..batch.alns.clone()
    };
    let objective = match batch.mode {
        Mode::Solve => SyncObjective::Full,
        Mode::Compare => SyncObjective::LatestArrival,
    };
    let out = alns::run_with(&inst, &cfg, objective)?;
    record.initial_objective = Some(out.initial_objective);
    record.objective = Some(out.objective);
    record.latest_arrival = Some(out.schedule.latest_arrival);
    record.truck_time = Some(out.schedule.truck_total_time);
    record.total_distance = Some(total_distance(&out.solution, &inst));
    record.resupplies = Some(out.solution.resupply_nodes.len());
    record.feasible = Some(validate_solution(&inst, &out.solution, &out.schedule)?.passed);
    let gap = match batch.mode {
        Mode::Solve => None,
        Mode::Compare => {
            let mt = solve_multitrip(&inst, &cfg)?;
            let report = compare(&inst, (&out.solution, &out.schedule), &mt.schedule);
            Some(GapRow::new(
                job.cell.network.to_string(),
                job.cell.capacity,
                job.cell.num_mhc,
                job.cell.nodes,
                job.seed,
                &report,
            ))
        }
    };
    Ok((gap, out.stats))
}

/// Runs one job. Failures are recorded in the row's status, not returned.
pub fn run_job(batch: &Batch, job: &Job) -> JobOutcome {
    let start = Instant::now();
    let mut record = RunRecord {
        network: job.cell.network,
        nodes: job.cell.nodes,
        num_mhc: job.cell.num_mhc,
        num_products: job.cell.num_products,
        capacity: job.cell.capacity,
        replicate: job.replicate,
        seed: job.seed,
        status: "ok".into(),
        initial_objective: None,
        objective: None,
        latest_arrival: None,
        truck_time: None,
        total_distance: None,
        resupplies: None,
        feasible: None,
    };
    let (gap, stats) = match solve_job(batch, job, &mut record) {
        Ok((gap, stats)) => (gap, Some(stats)),
        Err(e) => {
            record.status = format!("error: {e}");
            (None, None)
        }
    };
    JobOutcome {
        record,
        gap,
        stats,
        wall: start.elapsed(),
    }
}

/// Per-cell aggregate over successful runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub network: NetworkKind,
    pub nodes: usize,
    pub num_mhc: usize,
    pub num_products: usize,
    pub capacity: f64,
    pub runs: usize,
    pub failed: usize,
    pub infeasible: usize,
    pub mean_objective: Option<f64>,
    pub min_objective: Option<f64>,
    pub max_objective: Option<f64>,
    /// Mean reduction from the initial objective, in percent.
    pub mean_improvement: Option<f64>,
}

pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut rows: Vec<SummaryRow> = Vec::new();
    let mut improvements: Vec<Vec<f64>> = Vec::new();
    let mut objectives: Vec<Vec<f64>> = Vec::new();
    for r in records {
        let at = rows.iter().position(|s| {
            s.network == r.network
                && s.nodes == r.nodes
                && s.num_mhc == r.num_mhc
                && s.num_products == r.num_products
                && s.capacity == r.capacity
        });
        let k = at.unwrap_or_else(|| {
            rows.push(SummaryRow {
                network: r.network,
                nodes: r.nodes,
                num_mhc: r.num_mhc,
                num_products: r.num_products,
                capacity: r.capacity,
                runs: 0,
                failed: 0,
                infeasible: 0,
                mean_objective: None,
                min_objective: None,
                max_objective: None,
                mean_improvement: None,
            });
            improvements.push(Vec::new());
            objectives.push(Vec::new());
            rows.len() - 1
        });
        rows[k].runs += 1;
        match (r.objective, r.initial_objective) {
            (Some(f), Some(f0)) => {
                objectives[k].push(f);
                if f0 > 0.0 {
                    improvements[k].push(100.0 * (f0 - f) / f0);
                }
                if r.feasible == Some(false) {
                    rows[k].infeasible += 1;
                }
            }
            _ => rows[k].failed += 1,
        }
    }
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    for (k, row) in rows.iter_mut().enumerate() {
        row.mean_objective = mean(&objectives[k]);
        row.min_objective = objectives[k].iter().copied().reduce(f64::min);
        row.max_objective = objectives[k].iter().copied().reduce(f64::max);
        row.mean_improvement = mean(&improvements[k]);
    }
    rows
}

pub const RUN_HEADER: [&str; 15] = [
    "network",
    "nodes",
    "num_mhc",
    "num_products",
    "capacity",
    "replicate",
    "seed",
    "status",
    "initial_objective",
    "objective",
    "latest_arrival",
    "truck_time",
    "total_distance",
    "resupplies",
    "feasible",
];

pub const SUMMARY_HEADER: [&str; 12] = [
    "network",
    "nodes",
    "num_mhc",
    "num_products",
    "capacity",
    "runs",
    "failed",
    "infeasible",
    "mean_objective",
    "min_objective",
    "max_objective",
    "mean_improvement",
];

fn write_rows<W: Write, T: Serialize>(out: W, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_runs<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    write_rows(out, &RUN_HEADER, records)
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<()> {
    write_rows(out, &SUMMARY_HEADER, rows)
}

/// Wall times, kept apart from the reproducible outputs.
pub fn write_timing<W: Write>(out: W, jobs: &[Job], outcomes: &[JobOutcome]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "seed", "seconds"])?;
    for (job, o) in jobs.iter().zip(outcomes) {
        w.write_record([job.index.to_string(), job.seed.to_string(), format!("{:.3}", o.wall.as_secs_f64())])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_expand_to_their_grids() {
        assert_eq!(large_scale().jobs().len(), 18);
        let cmp = comparison();
        assert_eq!(cmp.jobs().len(), 120);
        assert!(cmp.cells.iter().all(|c| c.nodes == 30 && c.num_products == 1));
        assert!(preset("nope").is_none());
    }

    #[test]
    fn job_seeds_are_distinct_and_stable() {
        let jobs = comparison().jobs();
        let mut seeds: Vec<u64> = jobs.iter().map(|j| j.seed).collect();
        assert_eq!(seeds[5], mix_seed(0, 5));
        seeds.sort();
        seeds.dedup();
        assert_eq!(seeds.len(), jobs.len());
    }

    #[test]
    fn failed_jobs_are_recorded() {
        let mut batch = comparison();
        batch.cells.truncate(1);
        batch.replicates = 1;
        batch.cells[0].num_mhc = 40;
        let out = run_job(&batch, &batch.jobs()[0]);
        assert!(out.record.status.starts_with("error"));
        assert!(out.record.objective.is_none());
        let summary = summarize(&[out.record]);
        assert_eq!(summary[0].failed, 1);
        assert_eq!(summary[0].mean_objective, None);
    }

    #[test]
    fn empty_batch_writes_headers_only() {
        let mut buf = Vec::new();
        write_runs(&mut buf, &[]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", RUN_HEADER.join(",")));
        let mut buf = Vec::new();
        write_summary(&mut buf, &summarize(&[])).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", SUMMARY_HEADER.join(",")));
    }

    #[test]
    fn ten_seeds_one_size_give_one_summary_row() {
        let mut batch = large_scale();
        batch.cells = vec![Cell {
            network: NetworkKind::C,
            nodes: 8,
            num_mhc: 2,
            num_products: 2,
            capacity: 26.0,
        }];
        batch.replicates = 10;
        batch.alns.iter_max = 20;
        let records: Vec<RunRecord> = batch.jobs().iter().map(|j| run_job(&batch, j).record).collect();
        assert_eq!(records.len(), 10);
        let summary = summarize(&records);
        assert_eq!(summary.len(), 1);
        assert_eq!(summary[0].runs, 10);
        assert_eq!(summary[0].infeasible, 0);
    }

    #[test]
    fn small_batch_rows_are_reproducible() {
        let mut batch = comparison();
        batch.cells.truncate(2);
        batch.replicates = 1;
        batch.alns.iter_max = 50;
        let run = || {
            let outcomes: Vec<JobOutcome> = batch.jobs().iter().map(|j| run_job(&batch, j)).collect();
            let records: Vec<RunRecord> = outcomes.iter().map(|o| o.record.clone()).collect();
            let mut buf = Vec::new();
            write_runs(&mut buf, &records).unwrap();
            write_summary(&mut buf, &summarize(&records)).unwrap();
            buf
        };
        let a = run();
        assert_eq!(a, run());
        assert!(String::from_utf8(a).unwrap().starts_with("network,nodes,num_mhc"));
    }
}
