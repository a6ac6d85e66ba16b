//! Adaptive large neighborhood search with simulated-annealing acceptance.
//!
//! Destroy operators are drawn by roulette wheel over adaptive weights; repair
//! operators uniformly. Weights are refreshed at the end of every segment
//! from the mean score each operator earned during it.

mod destroy;

pub use destroy::{destroy, DestroyOp, Destroyed, History};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::construction::{construct_routes, repair, repair_noisy, RepairOp};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::model::{Evaluation, RoutingModel, SyncModel, SyncObjective};
use crate::solution::{Schedule, Solution};

/// Segment scores for the four outcomes of an iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub new_global: f64,
    pub better_than_current: f64,
    pub accepted: f64,
    pub rejected: f64,
}

impl Default for Scores {
    fn default() -> Self {
        Scores {
            new_global: 10.0,
            better_than_current: 7.0,
            accepted: 5.0,
            rejected: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlnsConfig {
    pub iter_max: usize,
    pub segment_length: usize,
    pub gamma: f64,
    /// Absolute starting temperature. When unset, `temp0_factor` times the
    /// initial objective is used.
    pub temp0: Option<f64>,
    pub temp0_factor: f64,
    pub cooling: f64,
    pub max_no_improve: usize,
    pub scores: Scores,
    pub destroy_fraction: (f64, f64),
    /// Insertion-cost noise amplitude as a fraction of the longest arc.
    pub repair_noise: f64,
    /// Share of repairs that run with noise.
    pub noise_probability: f64,
    pub seed: u64,
}

impl Default for AlnsConfig {
    fn default() -> Self {
        AlnsConfig {
            iter_max: 25_000,
            segment_length: 150,
            gamma: 0.8,
            temp0: None,
            temp0_factor: 0.2,
            cooling: 0.9995,
            max_no_improve: 2000,
            scores: Scores::default(),
            destroy_fraction: (0.10, 0.15),
            repair_noise: 0.5,
            noise_probability: 1.0,
            seed: 0,
        }
    }
}

impl AlnsConfig {
    pub fn check(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("gamma must lie in (0, 1)");
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return bad("cooling must lie in (0, 1)");
        }
        let (lo, hi) = self.destroy_fraction;
        if !(lo > 0.0 && lo <= hi && hi < 1.0) {
            return bad("destroy fractions must satisfy 0 < low <= high < 1");
        }
        if !(self.repair_noise >= 0.0 && self.repair_noise.is_finite()) {
            return bad("repair noise must be nonnegative");
        }
        if !(0.0..=1.0).contains(&self.noise_probability) {
            return bad("noise probability must lie in [0, 1]");
        }
        if self.segment_length == 0 {
            return bad("segment length must be positive");
        }
        if let Some(t) = self.temp0 {
            if !(t > 0.0 && t.is_finite()) {
                return bad("temp0 must be positive");
            }
        }
        if !(self.temp0_factor > 0.0 && self.temp0_factor.is_finite()) {
            return bad("temp0 factor must be positive");
        }
        let s = &self.scores;
        if [s.new_global, s.better_than_current, s.accepted, s.rejected]
            .iter()
            .any(|v| !(*v > 0.0 && v.is_finite()))
        {
            return bad("scores must be positive");
        }
        Ok(())
    }
}

/// Adaptive state of the destroy operators, indexed by [`DestroyOp::index`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorStats {
    pub weights: Vec<f64>,
    /// Score collected in the current segment.
    pub segment_scores: Vec<f64>,
    pub segment_uses: Vec<usize>,
    /// Lifetime count of selections.
    pub selections: Vec<usize>,
    /// Lifetime count of new global bests.
    pub new_best: Vec<usize>,
    /// Lifetime count of selections that removed nothing and fell back.
    pub fallbacks: Vec<usize>,
}

impl Default for OperatorStats {
    fn default() -> Self {
        let k = DestroyOp::ALL.len();
        OperatorStats {
            weights: vec![1.0 / k as f64; k],
            segment_scores: vec![0.0; k],
            segment_uses: vec![0; k],
            selections: vec![0; k],
            new_best: vec![0; k],
            fallbacks: vec![0; k],
        }
    }
}

/// Roulette-wheel draw: operator `d` with probability `w_d / Σ w`.
pub fn select_destroy<R: Rng>(stats: &OperatorStats, rng: &mut R) -> DestroyOp {
    let total: f64 = stats.weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, &w) in stats.weights.iter().enumerate() {
        if x < w {
            return DestroyOp::ALL[i];
        }
        x -= w;
    }
    // Rounding left x just past the last slice.
    let last = stats.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
    DestroyOp::ALL[last]
}

/// Simulated-annealing test.
pub fn accept<R: Rng>(f_new: f64, f_current: f64, temperature: f64, rng: &mut R) -> bool {
    if f_new < f_current {
        return true;
    }
    let p = (-(f_new - f_current) / temperature).exp();
    rng.gen::<f64>() < p
}

/// End-of-segment refresh: used operators move toward their mean score,
/// then all weights are normalized and the segment counters cleared.
pub fn update_weights(stats: &mut OperatorStats, gamma: f64) {
    for d in 0..stats.weights.len() {
        if stats.segment_uses[d] > 0 {
            let mean = stats.segment_scores[d] / stats.segment_uses[d] as f64;
            stats.weights[d] = gamma * stats.weights[d] + (1.0 - gamma) * mean;
        }
    }
    let total: f64 = stats.weights.iter().sum();
    for w in &mut stats.weights {
        *w /= total;
    }
    stats.segment_scores.iter_mut().for_each(|s| *s = 0.0);
    stats.segment_uses.iter_mut().for_each(|u| *u = 0);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// One-based destroy operator number, as selected.
    pub operator: usize,
    pub repair: usize,
    pub f_new: f64,
    pub f_current: f64,
    pub f_best: f64,
    pub accepted: bool,
    pub temperature: f64,
}

impl TraceRow {
    pub const HEADER: [&'static str; 8] = [
        "iteration",
        "operator",
        "repair",
        "f_new",
        "f_current",
        "f_best",
        "accepted",
        "temperature",
    ];
}

#[derive(Debug, Clone)]
pub struct SearchResult<P> {
    pub initial: Evaluation<P>,
    pub best: Evaluation<P>,
    pub stats: OperatorStats,
    pub trace: Vec<TraceRow>,
    /// Times the current solution was reset to the best after stagnating.
    pub restarts: usize,
}

/// Result of a run on the synchronized model.
#[derive(Debug, Clone)]
pub struct AlnsOutcome {
    pub solution: Solution,
    pub schedule: Schedule,
    pub objective: f64,
    pub initial_objective: f64,
    pub stats: OperatorStats,
    pub trace: Vec<TraceRow>,
    pub restarts: usize,
}

/// Runs the search on any routing model from explicit starting routes.
/// `on_segment` sees the stats right after each weight update.
pub fn search<M: RoutingModel>(
    model: &M,
    cfg: &AlnsConfig,
    start: Vec<Vec<usize>>,
    mut on_segment: impl FnMut(usize, &OperatorStats),
) -> Result<SearchResult<M::Plan>> {
    cfg.check()?;
    let inst = model.instance();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let initial = model.evaluate(&start)?;
    let mut current = initial.clone();
    let mut best = initial.clone();
    let mut stats = OperatorStats::default();
    let mut history = History::default();
    history.record(&current.routes, current.objective);
    let mut trace = Vec::with_capacity(cfg.iter_max);
    let mut temperature = cfg
        .temp0
        .unwrap_or(cfg.temp0_factor * initial.objective)
        .max(f64::MIN_POSITIVE);
    let mut no_improve = 0;
    let mut restarts = 0;
    let longest_arc = (0..inst.nodes.len())
        .flat_map(|i| (0..inst.nodes.len()).map(move |j| (i, j)))
        .map(|(i, j)| inst.t(i, j))
        .fold(0.0, f64::max);
    let amplitude = cfg.repair_noise * longest_arc;

    if inst.num_customers() == 0 {
        return Ok(SearchResult { initial, best, stats, trace, restarts });
    }

    for iteration in 1..=cfg.iter_max {
        let op = select_destroy(&stats, &mut rng);
        let repair_op = RepairOp::ALL[rng.gen_range(0..RepairOp::ALL.len())];
        let (lo, hi) = cfg.destroy_fraction;
        let fraction = if hi > lo { rng.gen_range(lo..=hi) } else { lo };

        let noisy = rng.gen::<f64>() < cfg.noise_probability;
        let noise_seed = rng.gen::<u64>();

        let cut = destroy(op, &current, &history, fraction, inst, &mut rng);
        let routes = if noisy && amplitude > 0.0 {
            let noise_rng = ChaCha8Rng::seed_from_u64(noise_seed);
            repair_noisy(model, cut.partial, cut.removed, repair_op, amplitude, noise_rng)
        } else {
            repair(model, cut.partial, cut.removed, repair_op)
        };
        let candidate = model.evaluate(&routes)?;
        history.record(&candidate.routes, candidate.objective);

        let d = op.index();
        stats.selections[d] += 1;
        stats.segment_uses[d] += 1;
        if cut.fell_back {
            stats.fallbacks[d] += 1;
        }

        let f_new = candidate.objective;
        let f_current = current.objective;
        let (score, accepted) = if f_new < best.objective {
            (cfg.scores.new_global, true)
        } else if f_new < f_current {
            (cfg.scores.better_than_current, true)
        } else if accept(f_new, f_current, temperature, &mut rng) {
            (cfg.scores.accepted, true)
        } else {
            (cfg.scores.rejected, false)
        };
        stats.segment_scores[d] += score;

        if f_new < best.objective {
            stats.new_best[d] += 1;
            best = candidate.clone();
            no_improve = 0;
        } else {
            no_improve += 1;
        }
        if accepted {
            if cfg!(debug_assertions) {
                if let Err(msg) = model.check(&candidate) {
                    panic!("accepted an infeasible solution at iteration {iteration}: {msg}");
                }
            }
            current = candidate;
        }

        trace.push(TraceRow {
            iteration,
            operator: op.id(),
            repair: repair_op.id(),
            f_new,
            f_current,
            f_best: best.objective,
            accepted,
            temperature,
        });

        temperature *= cfg.cooling;
        if iteration % cfg.segment_length == 0 {
            update_weights(&mut stats, cfg.gamma);
            on_segment(iteration, &stats);
        }
        if no_improve >= cfg.max_no_improve {
            current = best.clone();
            no_improve = 0;
            restarts += 1;
        }
    }

    Ok(SearchResult { initial, best, stats, trace, restarts })
}

/// Builds the starting routes by cheapest insertion and searches from them.
pub fn solve<M: RoutingModel>(model: &M, cfg: &AlnsConfig) -> Result<SearchResult<M::Plan>> {
    search(model, cfg, construct_routes(model), |_, _| {})
}

/// Runs the search on the synchronized model with the full objective.
pub fn run(inst: &Instance, cfg: &AlnsConfig) -> Result<AlnsOutcome> {
    run_with(inst, cfg, SyncObjective::Full)
}

pub fn run_with(inst: &Instance, cfg: &AlnsConfig, objective: SyncObjective) -> Result<AlnsOutcome> {
    let model = SyncModel::with_objective(inst, objective);
    let result = solve(&model, cfg)?;
    let (solution, schedule) = result.best.plan;
    Ok(AlnsOutcome {
        solution,
        schedule,
        objective: result.best.objective,
        initial_objective: result.initial.objective,
        stats: result.stats,
        trace: result.trace,
        restarts: result.restarts,
    })
}
