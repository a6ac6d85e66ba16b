use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use mhc_core::alns::{self, AlnsConfig, OperatorStats};
use mhc_core::experiment::{self, Batch, JobOutcome, Mode, PRESETS};
use mhc_core::instance::{generate_instance, parse_solomon, synthetic_coords, GeneratorConfig, Instance, NetworkKind};
use mhc_core::model::SyncObjective;
use mhc_core::multitrip::{compare, solve_multitrip};
use mhc_core::oracle::{exact_solve, OracleLimits};
use mhc_core::report::{self, GapRow};
use mhc_core::solution::{Schedule, Solution, SolutionDocument};

const USAGE: u8 = 1;
const DATA: u8 = 2;
const INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "mhc", version, about = "Mobile health clinic routing with en-route truck resupply")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an instance document.
    Generate(GenerateArgs),
    /// Solve one instance with the adaptive large neighborhood search.
    Solve(SolveArgs),
    /// Solve a small instance exactly.
    Oracle(OracleArgs),
    /// Solve instances under both resupply models and tabulate the gaps.
    Compare(CompareArgs),
    /// Share of new best solutions found by each destroy operator.
    Stats(StatsArgs),
    /// Run a batch of generated instances.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Instance document to load instead of generating one.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Solomon file supplying depot and customer coordinates.
    #[arg(long, conflicts_with = "instance")]
    solomon: Option<PathBuf>,
    #[arg(long, default_value = "R")]
    network: NetworkKind,
    #[arg(long, default_value_t = 30)]
    nodes: usize,
    #[arg(long, default_value_t = 3)]
    mhc: usize,
    #[arg(long, default_value_t = 26.0)]
    capacity: f64,
    #[arg(long, default_value_t = 2)]
    products: usize,
    #[arg(long = "truck-speed", default_value_t = 1.0)]
    truck_speed: f64,
    #[arg(long = "service-time", default_value_t = 20.0)]
    service_time: f64,
    #[arg(long = "resupply-time", default_value_t = 10.0)]
    resupply_time: f64,
}

#[derive(Args, Clone)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    segment: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Starting temperature; by default a fraction of the initial objective.
    #[arg(long)]
    temp0: Option<f64>,
    #[arg(long)]
    cooling: Option<f64>,
    #[arg(long = "max-no-improve")]
    max_no_improve: Option<usize>,
}

impl SearchArgs {
    fn config(&self, mut cfg: AlnsConfig) -> AlnsConfig {
        cfg.seed = self.seed;
        if let Some(v) = self.iters {
            cfg.iter_max = v;
        }
        if let Some(v) = self.segment {
            cfg.segment_length = v;
        }
        if let Some(v) = self.gamma {
            cfg.gamma = v;
        }
        if self.temp0.is_some() {
            cfg.temp0 = self.temp0;
        }
        if let Some(v) = self.cooling {
            cfg.cooling = v;
        }
        if let Some(v) = self.max_no_improve {
            cfg.max_no_improve = v;
        }
        cfg
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    search: SearchArgs,
    /// Output directory for the solution, trace and operator statistics.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct CompareArgs {
    /// Instance documents; without any, the built-in comparison grid runs.
    instances: Vec<PathBuf>,
    #[command(flatten)]
    search: SearchArgs,
    /// Replicates per cell of the built-in grid.
    #[arg(long)]
    replicates: Option<usize>,
    /// Gap table to write.
    #[arg(long, default_value = "gaps.csv")]
    out: PathBuf,
    /// Keep rows already in the table.
    #[arg(long)]
    append: bool,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct StatsArgs {
    /// Operator statistics files written by `solve`, or directories holding them.
    #[arg(required = true)]
    runs: Vec<PathBuf>,
    #[arg(long, default_value = "operators.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Built-in batch.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(PRESETS), conflicts_with = "batch")]
    preset: Option<String>,
    /// Batch description (JSON).
    #[arg(long)]
    batch: Option<PathBuf>,
    /// Overrides the batch seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long, default_value = "experiment")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

fn load_instance(args: &InstanceArgs, seed: u64) -> Result<Instance> {
    if let Some(path) = &args.instance {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        return Ok(Instance::from_json(&text)?);
    }
    let coords = match &args.solomon {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_solomon(&text)?
        }
        None => synthetic_coords(args.network, args.nodes, seed),
    };
    let cfg = GeneratorConfig {
        network_kind: args.network,
        n_nodes: args.nodes,
        num_mhc: args.mhc,
        num_products: args.products,
        capacity: args.capacity,
        service_time: args.service_time,
        resupply_time: args.resupply_time,
        truck_speed_factor: args.truck_speed,
        seed,
        ..GeneratorConfig::default()
    };
    Ok(generate_instance(&cfg, &coords)?)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    serde_json::to_writer_pretty(BufWriter::new(file), value)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

/// One row per visited customer.
fn write_solution_csv(path: &Path, sol: &Solution, sched: &Schedule) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["mhc", "position", "node", "completion", "mhc_wait", "resupply", "truck_arrival", "truck_wait"])?;
    for (r, route) in sol.routes.iter().enumerate() {
        for (k, &v) in route.iter().enumerate() {
            let resupply = sol.resupply_nodes.binary_search(&v).is_ok();
            w.write_record([
                r.to_string(),
                k.to_string(),
                v.to_string(),
                sched.completion[v].to_string(),
                sched.mhc_wait[v].to_string(),
                u8::from(resupply).to_string(),
                sched.truck_arrival[v].to_string(),
                sched.truck_wait[v].to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_solution(dir: &Path, stem: &str, format: Format, inst: &Instance, sol: Solution, sched: Schedule) -> Result<()> {
    match format {
        Format::Json => write_json(&dir.join(format!("{stem}.json")), &SolutionDocument::new(inst, sol, sched)),
        Format::Csv => write_solution_csv(&dir.join(format!("{stem}.csv")), &sol, &sched),
    }
}

fn generate(args: GenerateArgs) -> Result<()> {
    let inst = load_instance(&args.instance, args.seed)?;
    fs::write(&args.out, inst.to_json()?).with_context(|| format!("writing {}", args.out.display()))?;
    Ok(())
}

fn solve(args: SolveArgs) -> Result<()> {
    let inst = load_instance(&args.instance, args.search.seed)?;
    let cfg = args.search.config(AlnsConfig::default());
    let out = alns::run(&inst, &cfg)?;
    fs::create_dir_all(&args.out)?;
    report::write_trace(create(&args.out.join("trace.csv"))?, &out.trace)?;
    write_json(&args.out.join("stats.json"), &out.stats)?;
    println!("objective {:.4} (initial {:.4})", out.objective, out.initial_objective);
    write_solution(&args.out, "solution", args.format, &inst, out.solution, out.schedule)
}

fn oracle(args: OracleArgs) -> Result<()> {
    let inst = load_instance(&args.instance, args.seed)?;
    let exact = exact_solve(&inst, &OracleLimits::default())?;
    fs::create_dir_all(&args.out)?;
    println!("objective {:.4} over {} routings", exact.objective, exact.routings);
    write_solution(&args.out, "oracle", args.format, &inst, exact.solution, exact.schedule)
}

fn compare_one(inst: &Instance, cfg: &AlnsConfig, network: String, seed: u64) -> Result<GapRow> {
    let sync = alns::run_with(inst, cfg, SyncObjective::LatestArrival)?;
    let mt = solve_multitrip(inst, cfg)?;
    let gap = compare(inst, (&sync.solution, &sync.schedule), &mt.schedule);
    Ok(GapRow::new(network, inst.capacity, inst.num_mhc, inst.num_customers(), seed, &gap))
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?)
}

fn compare_cmd(args: CompareArgs) -> Result<()> {
    let rows: Vec<GapRow> = if args.instances.is_empty() {
        let mut batch = experiment::comparison();
        batch.seed = args.search.seed;
        batch.alns = args.search.config(batch.alns);
        if let Some(r) = args.replicates {
            batch.replicates = r;
        }
        let outcomes = run_batch(&batch, args.workers)?;
        for o in &outcomes {
            if o.gap.is_none() {
                eprintln!("seed {}: {}", o.record.seed, o.record.status);
            }
        }
        outcomes.into_iter().filter_map(|o| o.gap).collect()
    } else {
        let cfg = args.search.config(experiment::comparison().alns);
        let mut rows = Vec::new();
        for path in &args.instances {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let inst = Instance::from_json(&text)?;
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            rows.push(compare_one(&inst, &cfg, name, inst.seed.unwrap_or(cfg.seed))?);
        }
        rows
    };
    report::save_gap_table(&args.out, &rows, args.append)?;
    Ok(())
}

fn stats(args: StatsArgs) -> Result<()> {
    let mut all = Vec::new();
    for path in &args.runs {
        let file = if path.is_dir() { path.join("stats.json") } else { path.clone() };
        let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
        let parsed: OperatorStats = serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))?;
        all.push(parsed);
    }
    report::write_operator_shares(create(&args.out)?, &report::operator_shares(&all))?;
    Ok(())
}

fn run_batch(batch: &Batch, workers: usize) -> Result<Vec<JobOutcome>> {
    let jobs = batch.jobs();
    Ok(pool(workers)?.install(|| jobs.par_iter().map(|job| experiment::run_job(batch, job)).collect()))
}

fn experiment_cmd(args: ExperimentArgs) -> Result<()> {
    let mut batch = match (&args.preset, &args.batch) {
        (Some(name), _) => experiment::preset(name).expect("validated by clap"),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<Batch>(&text).map_err(mhc_core::Error::from)?
        }
        (None, None) => bail!(UsageError("experiment needs --preset or --batch".into())),
    };
    if let Some(seed) = args.seed {
        batch.seed = seed;
    }
    if let Some(iters) = args.iters {
        batch.alns.iter_max = iters;
    }
    if let Some(r) = args.replicates {
        batch.replicates = r;
    }
    let outcomes = run_batch(&batch, args.workers)?;
    let records: Vec<_> = outcomes.iter().map(|o| o.record.clone()).collect();
    fs::create_dir_all(&args.out)?;
    experiment::write_runs(create(&args.out.join("runs.csv"))?, &records)?;
    experiment::write_summary(create(&args.out.join("summary.csv"))?, &experiment::summarize(&records))?;
    experiment::write_timing(create(&args.out.join("timing.csv"))?, &batch.jobs(), &outcomes)?;
    let stats: Vec<&OperatorStats> = outcomes.iter().filter_map(|o| o.stats.as_ref()).collect();
    report::write_operator_shares(create(&args.out.join("operators.csv"))?, &report::operator_shares(stats))?;
    if batch.mode == Mode::Compare {
        let gaps: Vec<GapRow> = outcomes.iter().filter_map(|o| o.gap.clone()).collect();
        report::write_gap_table(create(&args.out.join("gaps.csv"))?, &gaps)?;
    }
    let failed = records.iter().filter(|r| r.status != "ok").count();
    println!("{} runs, {} failed", records.len(), failed);
    Ok(())
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return USAGE;
    }
    for cause in err.chain() {
        if cause.downcast_ref::<mhc_core::Error>().is_some()
            || cause.downcast_ref::<std::io::Error>().is_some()
            || cause.downcast_ref::<serde_json::Error>().is_some()
            || cause.downcast_ref::<csv::Error>().is_some()
        {
            return DATA;
        }
    }
    INTERNAL
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve(a),
        Command::Oracle(a) => oracle(a),
        Command::Compare(a) => compare_cmd(a),
        Command::Stats(a) => stats(a),
        Command::Experiment(a) => experiment_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(INTERNAL),
    }
}
