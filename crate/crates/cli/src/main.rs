//! `nashd` command-line front end.
//!
//! Exit codes: 0 on success, 1 for input errors (bad flags, unreadable or
//! malformed files), 2 when a game would exceed the dense size limit.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nashd_core::experiment::{
    self, grid_cells, run_algorithm, run_bench, score_external, summarize, BenchPlan, Cell, RunSettings,
};
use nashd_core::{
    parse_nfg, serialize_nfg, Algorithm, GameClass, GameError, GameSpec, GdConfig, NfgError, NormalFormGame,
    ReportMode, StrategyProfile,
};

#[derive(Debug, Parser)]
#[command(name = "nashd", version, about = "Approximate Nash equilibria of N-player normal-form games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one game and print a one-line result.
    Solve(SolveArgs),
    /// Write a generated game as a Gambit .nfg file.
    Generate(GenerateArgs),
    /// Run a benchmark grid and write record and summary CSVs.
    Bench(BenchArgs),
    /// Write the per-iteration NashD / epsilon trace of one solve as CSV.
    Trace(TraceArgs),
}

#[derive(Debug, Args)]
struct GameSource {
    /// Read the game from a .nfg file.
    #[arg(long, conflicts_with = "class")]
    game: Option<PathBuf>,
    /// Generate a game of this class instead.
    #[arg(long, value_parser = parse_class)]
    class: Option<GameClass>,
    #[arg(long, default_value_t = 2)]
    players: usize,
    #[arg(long, default_value_t = 2)]
    actions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GameSource {
    fn load(&self) -> Result<NormalFormGame> {
        match (&self.game, self.class) {
            (Some(path), _) => read_game(path),
            (None, Some(class)) => Ok(GameSpec::new(class, self.players, self.actions, self.seed).build()?),
            (None, None) => bail!(GameError::Range("pass --game FILE or --class CLASS".into())),
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Report {
    Final,
    Best,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Gradient-descent iterations.
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 0.5)]
    lr: f64,
    /// Learning-rate multiplier applied every --decay-every iterations.
    #[arg(long, default_value_t = 0.8)]
    decay: f64,
    #[arg(long, default_value_t = 100)]
    decay_every: usize,
    /// Stop gradient descent once epsilon is at or below this value.
    #[arg(long)]
    early_stop: Option<f64>,
    #[arg(long, value_enum, default_value_t = Report::Final)]
    report: Report,
    /// Rounds for fp and rm.
    #[arg(long, default_value_t = 1000)]
    rounds: usize,
}

impl SolverArgs {
    fn settings(&self, sample_every: usize) -> RunSettings {
        RunSettings {
            gd: GdConfig {
                max_iters: self.iters,
                initial_lr: self.lr,
                decay_factor: self.decay,
                decay_every: self.decay_every,
                seed: 0,
                early_stop_eps: self.early_stop,
                report: match self.report {
                    Report::Final => ReportMode::Final,
                    Report::Best => ReportMode::Best,
                },
            },
            rounds: self.rounds,
            sample_every,
        }
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    source: GameSource,
    #[arg(long, value_parser = parse_algorithm)]
    alg: Algorithm,
    /// Strategy-profile file scored by `--alg external`: one line of
    /// probabilities per player.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Seed for the solver's random initialization.
    #[arg(long, default_value_t = 0)]
    solver_seed: u64,
    /// Also write the trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_class)]
    class: GameClass,
    #[arg(long, default_value_t = 2)]
    players: usize,
    #[arg(long, default_value_t = 2)]
    actions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Comma-separated game classes.
    #[arg(long, value_delimiter = ',', value_parser = parse_class, default_value = "random")]
    classes: Vec<GameClass>,
    /// Player counts, as a list (`2,3,5`) or range (`2-6`).
    #[arg(long, value_parser = parse_int_list, default_value = "2")]
    players: IntList,
    /// Action counts, as a list or range.
    #[arg(long, value_parser = parse_int_list, default_value = "10")]
    actions: IntList,
    /// Additional games read from .nfg files; each file is its own cell.
    #[arg(long = "import")]
    imports: Vec<PathBuf>,
    /// Replicates per cell.
    #[arg(long, default_value_t = 100)]
    seeds: usize,
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm, default_value = "nashd_gd,fp,rm")]
    algs: Vec<Algorithm>,
    #[arg(long, default_value_t = 0)]
    seed_base: u64,
    /// Record CSV path.
    #[arg(short, long)]
    out: PathBuf,
    /// Summary CSV path; defaults to the record path with a `.summary.csv`
    /// suffix.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Write measured wall times instead of 0. Record files then differ
    /// between runs in that column.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Args)]
struct TraceArgs {
    #[command(flatten)]
    source: GameSource,
    #[arg(long, value_parser = parse_algorithm)]
    alg: Algorithm,
    #[arg(long, default_value_t = 0)]
    solver_seed: u64,
    /// Trace CSV path; standard output when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Debug, Clone)]
struct IntList(Vec<usize>);

fn parse_int_list(s: &str) -> Result<IntList, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let parsed = match part.split_once('-') {
            Some((lo, hi)) => {
                let lo: usize = lo.trim().parse().map_err(|_| format!("bad range {part:?}"))?;
                let hi: usize = hi.trim().parse().map_err(|_| format!("bad range {part:?}"))?;
                if lo > hi {
                    return Err(format!("empty range {part:?}"));
                }
                (lo..=hi).collect()
            }
            None => vec![part.parse().map_err(|_| format!("bad integer {part:?}"))?],
        };
        out.extend(parsed);
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(IntList(out))
}

fn parse_class(s: &str) -> Result<GameClass, String> {
    s.parse().map_err(|e: GameError| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: GameError| e.to_string())
}

fn read_game(path: &Path) -> Result<NormalFormGame> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_nfg(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    let game = args.source.load()?;
    let (epsilon, iterations, wall_ms, trace) = if args.alg == Algorithm::External {
        let path = args.profile.as_ref().context("--alg external needs --profile FILE")?;
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let profile = StrategyProfile::parse_text(&text).with_context(|| format!("invalid profile {}", path.display()))?;
        (score_external(&game, &profile)?, 0, 0.0, Vec::new())
    } else {
        let outcome = run_algorithm(&game, args.alg, &args.solver.settings(1), args.solver_seed)?;
        (outcome.epsilon, outcome.iterations, outcome.wall_ms, outcome.trace)
    };
    if let Some(path) = &args.trace {
        let mut buf = Vec::new();
        experiment::write_trace_csv(&mut buf, &trace)?;
        write_file(path, &buf)?;
    }
    println!(
        "game={} algorithm={} epsilon={epsilon:?} iterations={iterations} wall_ms={wall_ms:.3}",
        game.name(),
        args.alg
    );
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let game = GameSpec::new(args.class, args.players, args.actions, args.seed).build()?;
    write_file(&args.output, serialize_nfg(&game).as_bytes())
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "records".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.summary.csv"))
}

fn cmd_bench(args: &BenchArgs) -> Result<()> {
    let (mut cells, skipped) = grid_cells(&args.classes, &args.players.0, &args.actions.0)?;
    for (cell, reason) in skipped {
        eprintln!(
            "skipping {} with {} players and {} actions: {reason}",
            cell.class_label(),
            cell.players,
            cell.actions
        );
    }
    for path in &args.imports {
        let game = read_game(path)?;
        let label = path.file_stem().map_or_else(|| "imported".into(), |s| s.to_string_lossy().into_owned());
        cells.push(Cell::imported(label, game));
    }
    if cells.is_empty() {
        bail!(GameError::Range("the benchmark grid has no valid cells".into()));
    }
    let mut plan = BenchPlan::new(cells);
    plan.seeds_per_cell = args.seeds;
    plan.algorithms = args.algs.clone();
    plan.settings = args.solver.settings(args.solver.rounds.max(1));
    plan.seed_base = args.seed_base;
    plan.record_timing = args.timing;
    let records = run_bench(&plan)?;

    let mut buf = Vec::new();
    experiment::write_records_csv(&mut buf, &records)?;
    write_file(&args.out, &buf)?;
    let summary = summarize(&records);
    let mut buf = Vec::new();
    experiment::write_summary_csv(&mut buf, &summary)?;
    let summary_out = args.summary.clone().unwrap_or_else(|| summary_path(&args.out));
    write_file(&summary_out, &buf)?;
    eprintln!(
        "wrote {} records to {} and {} summary rows to {}",
        records.len(),
        args.out.display(),
        summary.len(),
        summary_out.display()
    );
    Ok(())
}

fn cmd_trace(args: &TraceArgs) -> Result<()> {
    if args.alg == Algorithm::External {
        bail!(GameError::Range("trace needs a solver: nashd_gd, fp or rm".into()));
    }
    let game = args.source.load()?;
    let outcome = run_algorithm(&game, args.alg, &args.solver.settings(1), args.solver_seed)?;
    let mut buf = Vec::new();
    experiment::write_trace_csv(&mut buf, &outcome.trace)?;
    match &args.out {
        Some(path) => write_file(path, &buf),
        None => io::stdout().write_all(&buf).context("cannot write to standard output"),
    }
}

fn is_capacity_error(err: &anyhow::Error) -> bool {
    err.chain().any(|cause| {
        matches!(cause.downcast_ref::<GameError>(), Some(GameError::Capacity { .. }))
            || matches!(cause.downcast_ref::<NfgError>(), Some(NfgError::Game(GameError::Capacity { .. })))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Trace(args) => cmd_trace(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_capacity_error(&err) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
