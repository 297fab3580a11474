//! Benchmark protocol: run solvers over game corpora and tabulate
//! exploitability.
//!
//! Record CSV columns:
//! `game_class,n_players,n_actions,game_size,seed,algorithm,epsilon,iterations,wall_ms`.
//! Summary CSV columns:
//! `game_class,game_size,algorithm,mean_epsilon,ci95_halfwidth,count`.
//! Trace CSV columns: `iteration,nashd,epsilon`.
//!
//! Every replicate gets its own seed, the first eight bytes (little endian)
//! of `SHA-256("{base}:{class}:{players}:{actions}:{replicate}")`, so a cell
//! can be rerun alone and reproduce the same numbers. Rows come out in plan
//! order (cell, replicate, algorithm) whatever order the workers finish in.

use std::fmt;
use std::io;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::baselines::{self, PlayConfig};
use crate::error::{GameError, Result};
use crate::game::{self, NormalFormGame, StrategyProfile};
use crate::generators::{GameClass, GameSpec};
use crate::solver::{self, GdConfig};

/// z-value of a two-sided 95% normal interval.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    NashdGd,
    Fp,
    Rm,
    /// Scores a strategy profile produced elsewhere.
    External,
}

impl Algorithm {
    pub const SOLVERS: [Algorithm; 3] = [Algorithm::NashdGd, Algorithm::Fp, Algorithm::Rm];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::NashdGd => "nashd_gd",
            Algorithm::Fp => "fp",
            Algorithm::Rm => "rm",
            Algorithm::External => "external",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nashd_gd" => Ok(Algorithm::NashdGd),
            "fp" => Ok(Algorithm::Fp),
            "rm" => Ok(Algorithm::Rm),
            "external" => Ok(Algorithm::External),
            _ => Err(GameError::Range(format!(
                "unknown algorithm {s:?}; expected nashd_gd, fp, rm or external"
            ))),
        }
    }
}

/// Solver settings shared by every run in a benchmark.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    /// NashD-GD hyperparameters; the seed is replaced per run.
    pub gd: GdConfig,
    /// Rounds for fictitious play and regret matching.
    pub rounds: usize,
    /// Trace sampling interval for fictitious play and regret matching.
    pub sample_every: usize,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            gd: GdConfig::default(),
            rounds: 1000,
            sample_every: baselines::DEFAULT_SAMPLE_EVERY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub nashd: f64,
    pub epsilon: f64,
}

/// Result of one solver run on one game.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub profile: StrategyProfile,
    pub epsilon: f64,
    pub iterations: usize,
    pub wall_ms: f64,
    pub trace: Vec<TraceRow>,
}

/// Runs one solver. Exploitability is measured on the normalized game.
pub fn run_algorithm(
    game: &NormalFormGame,
    algorithm: Algorithm,
    settings: &RunSettings,
    seed: u64,
) -> Result<RunOutcome> {
    match algorithm {
        Algorithm::NashdGd => {
            let config = settings.gd.clone().with_seed(seed);
            let trace = solver::solve_nashd_gd(game, &config)?;
            Ok(RunOutcome {
                epsilon: trace.epsilon(),
                iterations: trace.iterations(),
                wall_ms: trace.wall_ms,
                trace: trace
                    .records
                    .iter()
                    .map(|r| TraceRow { iteration: r.iteration, nashd: r.nashd, epsilon: r.epsilon })
                    .collect(),
                profile: trace.profile().clone(),
            })
        }
        Algorithm::Fp | Algorithm::Rm => {
            let config = PlayConfig {
                rounds: settings.rounds,
                seed,
                sample_every: settings.sample_every,
            };
            let trace = if algorithm == Algorithm::Fp {
                baselines::fictitious_play(game, &config)?
            } else {
                baselines::regret_matching(game, &config)?
            };
            Ok(RunOutcome {
                epsilon: trace.epsilon,
                iterations: trace.rounds,
                wall_ms: trace.wall_ms,
                trace: trace
                    .records
                    .iter()
                    .map(|r| TraceRow { iteration: r.round, nashd: r.nashd, epsilon: r.epsilon })
                    .collect(),
                profile: trace.profile,
            })
        }
        Algorithm::External => Err(GameError::Range(
            "the external algorithm needs a profile; use score_external".into(),
        )),
    }
}

/// Exploitability of an externally computed profile on the normalized game.
pub fn score_external(game: &NormalFormGame, profile: &StrategyProfile) -> Result<f64> {
    game::epsilon(&game::normalize(game), profile)
}

/// Where a benchmark cell's games come from.
#[derive(Debug, Clone, PartialEq)]
pub enum CellSource {
    Generated(GameClass),
    Imported { label: String, game: NormalFormGame },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub source: CellSource,
    pub players: usize,
    pub actions: usize,
}

impl Cell {
    pub fn generated(class: GameClass, players: usize, actions: usize) -> Self {
        let actions = if class == GameClass::PrisonersDilemmaN { 2 } else { actions };
        Self {
            source: CellSource::Generated(class),
            players,
            actions,
        }
    }

    pub fn imported(label: impl Into<String>, game: NormalFormGame) -> Self {
        Self {
            players: game.num_players(),
            actions: game.action_counts().iter().copied().max().unwrap_or(0),
            source: CellSource::Imported { label: label.into(), game },
        }
    }

    pub fn class_label(&self) -> &str {
        match &self.source {
            CellSource::Generated(c) => c.as_str(),
            CellSource::Imported { label, .. } => label,
        }
    }

    /// Checks class preconditions and the capacity guard without
    /// allocating the game.
    pub fn validate(&self) -> Result<()> {
        let CellSource::Generated(class) = self.source else {
            return Ok(());
        };
        let (n, m) = (self.players, self.actions);
        let ok = match class {
            GameClass::Random => n >= 1 && m >= 2,
            GameClass::PrisonersDilemmaN => (2..=crate::generators::PD_MAX_PLAYERS).contains(&n),
            GameClass::MajorityVoting => n >= 3 && m >= 2,
            GameClass::Congestion | GameClass::Coordination => n >= 2 && m >= 2,
        };
        if !ok {
            return Err(GameError::Range(format!("{class} is undefined for {n} players with {m} actions")));
        }
        let entries = (m as u128)
            .checked_pow(n as u32)
            .map_or(u128::MAX, |p| p.saturating_mul(n as u128));
        if entries > game::MAX_PAYOFF_ENTRIES {
            return Err(GameError::Capacity { entries, limit: game::MAX_PAYOFF_ENTRIES });
        }
        Ok(())
    }

    fn game(&self, seed: u64) -> Result<NormalFormGame> {
        match &self.source {
            CellSource::Generated(class) => GameSpec::new(*class, self.players, self.actions, seed).build(),
            CellSource::Imported { game, .. } => Ok(game.clone()),
        }
    }
}

/// Seed of replicate `replicate` in a cell.
pub fn cell_seed(base: u64, class: &str, players: usize, actions: usize, replicate: usize) -> u64 {
    let digest = Sha256::digest(format!("{base}:{class}:{players}:{actions}:{replicate}").as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub cells: Vec<Cell>,
    pub seeds_per_cell: usize,
    pub algorithms: Vec<Algorithm>,
    pub settings: RunSettings,
    pub seed_base: u64,
    /// When false, `wall_ms` is written as 0 so record files are
    /// byte-reproducible.
    pub record_timing: bool,
}

impl BenchPlan {
    pub fn new(cells: Vec<Cell>) -> Self {
        Self {
            cells,
            seeds_per_cell: 100,
            algorithms: Algorithm::SOLVERS.to_vec(),
            settings: RunSettings::default(),
            seed_base: 0,
            record_timing: false,
        }
    }
}

/// Builds the cells of a class x players x actions grid.
///
/// Cells a class cannot generate (for example majority voting with two
/// players) are returned separately; duplicate cells collapse, which happens
/// for the prisoner's dilemma whose action count is fixed at 2. Capacity
/// violations are errors.
pub fn grid_cells(
    classes: &[GameClass],
    players: &[usize],
    actions: &[usize],
) -> Result<(Vec<Cell>, Vec<(Cell, GameError)>)> {
    let mut cells: Vec<Cell> = Vec::new();
    let mut skipped = Vec::new();
    for &class in classes {
        for &n in players {
            for &m in actions {
                let cell = Cell::generated(class, n, m);
                if cells.contains(&cell) || skipped.iter().any(|(c, _)| c == &cell) {
                    continue;
                }
                match cell.validate() {
                    Ok(()) => cells.push(cell),
                    Err(e @ GameError::Capacity { .. }) => return Err(e),
                    Err(e) => skipped.push((cell, e)),
                }
            }
        }
    }
    Ok((cells, skipped))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub game_class: String,
    pub n_players: usize,
    pub n_actions: usize,
    pub game_size: usize,
    pub seed: u64,
    pub algorithm: String,
    pub epsilon: f64,
    pub iterations: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub game_class: String,
    pub game_size: usize,
    pub algorithm: String,
    pub mean_epsilon: f64,
    pub ci95_halfwidth: f64,
    pub count: usize,
}

/// Runs every (cell, replicate, algorithm) triple, in parallel, and returns
/// the records in plan order.
pub fn run_bench(plan: &BenchPlan) -> Result<Vec<BenchRecord>> {
    if plan.seeds_per_cell == 0 {
        return Err(GameError::Range("seeds per cell must be at least 1".into()));
    }
    if plan.algorithms.contains(&Algorithm::External) {
        return Err(GameError::Range("the external algorithm cannot be benchmarked; score profiles with `solve`".into()));
    }
    for cell in &plan.cells {
        cell.validate()?;
    }
    let jobs: Vec<(&Cell, usize)> = plan
        .cells
        .iter()
        .flat_map(|cell| (0..plan.seeds_per_cell).map(move |r| (cell, r)))
        .collect();
    let per_job: Vec<Vec<BenchRecord>> = jobs
        .par_iter()
        .map(|&(cell, replicate)| {
            let seed = cell_seed(plan.seed_base, cell.class_label(), cell.players, cell.actions, replicate);
            let game = cell.game(seed)?;
            plan.algorithms
                .iter()
                .map(|&alg| {
                    let outcome = run_algorithm(&game, alg, &plan.settings, seed)?;
                    Ok(BenchRecord {
                        game_class: cell.class_label().to_string(),
                        n_players: game.num_players(),
                        n_actions: cell.actions,
                        game_size: game.size(),
                        seed,
                        algorithm: alg.as_str().to_string(),
                        epsilon: outcome.epsilon,
                        iterations: outcome.iterations,
                        wall_ms: if plan.record_timing { outcome.wall_ms } else { 0.0 },
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_job.into_iter().flatten().collect())
}

/// Mean exploitability with a normal-approximation 95% interval per
/// (class, size, algorithm), in order of first appearance.
pub fn summarize(records: &[BenchRecord]) -> Vec<SummaryRow> {
    let mut groups: Vec<((&str, usize, &str), Vec<f64>)> = Vec::new();
    for r in records {
        let key = (r.game_class.as_str(), r.game_size, r.algorithm.as_str());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, values)) => values.push(r.epsilon),
            None => groups.push((key, vec![r.epsilon])),
        }
    }
    groups
        .into_iter()
        .map(|((class, size, alg), values)| {
            let (mean, half) = mean_ci95(&values);
            SummaryRow {
                game_class: class.to_string(),
                game_size: size,
                algorithm: alg.to_string(),
                mean_epsilon: mean,
                ci95_halfwidth: half,
                count: values.len(),
            }
        })
        .collect()
}

/// Mean and `1.96 * s / sqrt(n)` with the sample standard deviation `s`;
/// the half-width is 0 for a single value.
pub fn mean_ci95(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Z_95 * var.sqrt() / n.sqrt())
}

fn write_csv<T: Serialize>(writer: impl io::Write, rows: &[T], header: &[&str]) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

pub const RECORD_COLUMNS: [&str; 9] = [
    "game_class", "n_players", "n_actions", "game_size", "seed", "algorithm", "epsilon", "iterations", "wall_ms",
];
pub const SUMMARY_COLUMNS: [&str; 6] =
    ["game_class", "game_size", "algorithm", "mean_epsilon", "ci95_halfwidth", "count"];
pub const TRACE_COLUMNS: [&str; 3] = ["iteration", "nashd", "epsilon"];

pub fn write_records_csv(writer: impl io::Write, records: &[BenchRecord]) -> io::Result<()> {
    write_csv(writer, records, &RECORD_COLUMNS)
}

pub fn write_summary_csv(writer: impl io::Write, rows: &[SummaryRow]) -> io::Result<()> {
    write_csv(writer, rows, &SUMMARY_COLUMNS)
}

pub fn write_trace_csv(writer: impl io::Write, rows: &[TraceRow]) -> io::Result<()> {
    write_csv(writer, rows, &TRACE_COLUMNS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::matching_pennies;

    fn small_plan() -> BenchPlan {
        let (cells, _) = grid_cells(&[GameClass::Random], &[2], &[3]).unwrap();
        let mut plan = BenchPlan::new(cells);
        plan.seeds_per_cell = 3;
        plan.settings.gd.max_iters = 20;
        plan.settings.rounds = 20;
        plan
    }

    #[test]
    fn seeds_differ_per_replicate_and_are_stable() {
        let a = cell_seed(0, "random", 2, 10, 0);
        assert_eq!(a, cell_seed(0, "random", 2, 10, 0));
        assert_ne!(a, cell_seed(0, "random", 2, 10, 1));
        assert_ne!(a, cell_seed(1, "random", 2, 10, 0));
        assert_ne!(a, cell_seed(0, "random", 3, 10, 0));
    }

    #[test]
    fn records_follow_plan_order() {
        let records = run_bench(&small_plan()).unwrap();
        assert_eq!(records.len(), 9);
        let algs: Vec<&str> = records.iter().take(3).map(|r| r.algorithm.as_str()).collect();
        assert_eq!(algs, ["nashd_gd", "fp", "rm"]);
        assert!(records.iter().all(|r| r.game_size == 9 && r.epsilon >= 0.0 && r.wall_ms == 0.0));
        assert_eq!(records[0].seed, cell_seed(0, "random", 2, 3, 0));
    }

    #[test]
    fn single_record_summary_has_zero_width() {
        let mut plan = small_plan();
        plan.seeds_per_cell = 1;
        plan.algorithms = vec![Algorithm::Fp];
        let records = run_bench(&plan).unwrap();
        let summary = summarize(&records);
        assert_eq!(records.len(), 1);
        assert_eq!(summary.len(), 1);
        assert_eq!(summary[0].ci95_halfwidth, 0.0);
        assert_eq!(summary[0].mean_epsilon, records[0].epsilon);
    }

    #[test]
    fn ci_matches_hand_computation() {
        let (mean, half) = mean_ci95(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(mean, 2.5);
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((half - 1.96 * sd / 2.0).abs() < 1e-15);
    }

    #[test]
    fn grid_skips_undefined_cells_and_dedupes_pd() {
        let (cells, skipped) = grid_cells(
            &[GameClass::MajorityVoting, GameClass::PrisonersDilemmaN],
            &[2, 3],
            &[2, 3],
        )
        .unwrap();
        let labels: Vec<_> = cells.iter().map(|c| (c.class_label(), c.players, c.actions)).collect();
        assert_eq!(
            labels,
            [
                ("majority_voting", 3, 2),
                ("majority_voting", 3, 3),
                ("prisoners_dilemma_n", 2, 2),
                ("prisoners_dilemma_n", 3, 2)
            ]
        );
        assert_eq!(skipped.len(), 2);
        assert!(matches!(
            grid_cells(&[GameClass::Random], &[8], &[10]),
            Err(GameError::Capacity { .. })
        ));
    }

    #[test]
    fn csv_headers_and_external_rejection() {
        let mut buf = Vec::new();
        write_records_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "game_class,n_players,n_actions,game_size,seed,algorithm,epsilon,iterations,wall_ms\n"
        );
        let mut plan = small_plan();
        plan.algorithms = vec![Algorithm::External];
        assert!(run_bench(&plan).is_err());
        assert!(run_algorithm(&matching_pennies(), Algorithm::External, &RunSettings::default(), 0).is_err());
    }

    #[test]
    fn external_scoring_uses_normalized_game() {
        let g = NormalFormGame::new("mp10", vec![2, 2], vec![vec![10.0, 0.0, 0.0, 10.0], vec![0.0, 10.0, 10.0, 0.0]])
            .unwrap();
        let p = StrategyProfile::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(score_external(&g, &p).unwrap(), 1.0);
    }
}
