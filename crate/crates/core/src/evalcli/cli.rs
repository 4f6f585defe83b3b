//! `mec-offload` command line.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, CommandFactory, Parser, Subcommand};
use log::{error, info};

use super::output::{read_cell, write_evaluation, write_run};
use super::report::report;
use crate::error::{Error, Result};
use crate::orchestrator::{
    evaluate_policy, load_checkpoints, run_cell, save_checkpoints, Agents, Cell, ExperimentConfig, Scheme, Setup,
};

/// Checkpoint stem of the agents at the end of training.
pub const FINAL_STEM: &str = "final";

#[derive(Debug, Parser)]
#[command(name = "mec-offload", version, about = "Partial offloading and VNF placement simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train and evaluate one (scheme, capacity, seed) cell.
    Train(CellArgs),
    /// Train every cell of schemes x capacities x seeds.
    Sweep(SweepArgs),
    /// Evaluate a trained cell's final checkpoints.
    Eval(EvalArgs),
    /// Metrics, Friedman ranks and plot series over finished runs.
    Report(ReportArgs),
}

fn scheme_parser() -> impl TypedValueParser<Value = Scheme> {
    PossibleValuesParser::new(Scheme::ALL.map(Scheme::name)).map(|s| s.parse::<Scheme>().expect("listed scheme"))
}

#[derive(Debug, Args)]
pub struct CellArgs {
    /// TOML experiment configuration; built-in defaults otherwise.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, value_name = "NAME", value_parser = scheme_parser())]
    pub scheme: Option<Scheme>,
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Training episodes.
    #[arg(long, value_name = "N")]
    pub episodes: Option<usize>,
    /// Mobile-device capacity.
    #[arg(long = "cp-md", value_name = "GHZ")]
    pub cp_md: Option<f64>,
    /// Directory receiving `<run_id>/` folders.
    #[arg(long, value_name = "DIR", default_value = "runs")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub cell: CellArgs,
    /// Cells trained in parallel (overrides run.workers).
    #[arg(long, value_name = "N")]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub cell: CellArgs,
    /// Run directory holding the final checkpoints and cell.toml.
    #[arg(long, value_name = "DIR")]
    pub checkpoint: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory receiving the report CSVs.
    #[arg(long, value_name = "DIR", default_value = "report")]
    pub out: PathBuf,
    /// Directory of finished runs.
    #[arg(long, value_name = "DIR", default_value = "runs")]
    pub runs: PathBuf,
}

fn load_config(args: &CellArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::from_toml(&fs::read_to_string(p)?)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = args.scheme {
        cfg.run.scheme = s;
        cfg.run.schemes = vec![s];
    }
    if let Some(s) = args.seed {
        cfg.run.seed = s;
        cfg.run.seeds = vec![s];
    }
    if let Some(e) = args.episodes {
        cfg.run.episodes = e;
    }
    if let Some(cp) = args.cp_md {
        cfg.run.cp_md = vec![cp];
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Train one cell and write its run directory, including final checkpoints.
pub fn train_cell(cfg: &ExperimentConfig, cell: Cell, out: &Path) -> Result<PathBuf> {
    let dir = out.join(cell.run_id());
    let (log, agents) = run_cell(cfg, cell, Some(&dir))?;
    let dir = write_run(out, &log, cfg)?;
    save_checkpoints(&agents, &dir, FINAL_STEM)?;
    info!("{}: wrote {}", cell.run_id(), dir.display());
    Ok(dir)
}

fn train(args: &CellArgs) -> Result<()> {
    let cfg = load_config(args)?;
    let cp_md = match args.cp_md {
        Some(cp) => cp,
        None => *cfg.run.cp_md.first().ok_or_else(|| Error::config("run.cp_md is empty"))?,
    };
    let cell = Cell {
        scheme: cfg.run.scheme,
        cp_md,
        seed: cfg.run.seed,
    };
    train_cell(&cfg, cell, &args.out)?;
    Ok(())
}

/// Run every cell on at most `workers` threads. All cells are attempted; the
/// first failure is returned.
pub fn sweep_cells(cfg: &ExperimentConfig, cells: &[Cell], out: &Path, workers: usize) -> Result<Vec<PathBuf>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<PathBuf>>>> = Mutex::new((0..cells.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, cells.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&cell) = cells.get(i) else { break };
                let r = train_cell(cfg, cell, out);
                if let Err(e) = &r {
                    error!("{}: {e}", cell.run_id());
                }
                results.lock().expect("no worker panicked")[i] = Some(r);
            });
        }
    });
    results
        .into_inner()
        .expect("no worker panicked")
        .into_iter()
        .map(|r| r.expect("every cell ran"))
        .collect()
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let cfg = load_config(&args.cell)?;
    let mut cells = Vec::new();
    for &scheme in &cfg.run.schemes {
        for &cp_md in &cfg.run.cp_md {
            for &seed in &cfg.run.seeds {
                cells.push(Cell { scheme, cp_md, seed });
            }
        }
    }
    let workers = args.workers.unwrap_or(cfg.run.workers);
    info!("sweep: {} cells on {workers} workers", cells.len());
    sweep_cells(&cfg, &cells, &args.cell.out, workers)?;
    Ok(())
}

fn eval(args: &EvalArgs) -> Result<()> {
    let cfg = load_config(&args.cell)?;
    let trained = read_cell(&args.checkpoint)?;
    let cell = Cell {
        scheme: args.cell.scheme.unwrap_or(trained.scheme),
        cp_md: args.cell.cp_md.unwrap_or(trained.cp_md),
        seed: args.cell.seed.unwrap_or(trained.seed),
    };
    let setup = Setup::new(&cfg, cell.cp_md, cell.seed)?;
    let mut agents = Agents::new(cell.scheme, &cfg, &setup, cell.seed);
    load_checkpoints(&mut agents, &args.checkpoint, FINAL_STEM)?;
    let episodes = args.cell.episodes.unwrap_or(cfg.run.eval_episodes);
    let logs = evaluate_policy(&agents, &setup, cell, episodes)?;
    let dir = write_evaluation(&args.cell.out, cell, &logs)?;
    info!("{}: wrote {}", cell.run_id(), dir.display());
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Train(a) => train(a),
        Command::Sweep(a) => sweep(a),
        Command::Eval(a) => eval(a),
        Command::Report(a) => report(&a.runs, &a.out).map(|_| ()),
    }
}

/// Parse `args` (program name first) and run. Usage errors print the message and
/// the help text and exit with status 2; runtime failures exit with status 1.
pub fn run_cli<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            eprintln!("{}", Cli::command().render_help());
            return ExitCode::from(2);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
