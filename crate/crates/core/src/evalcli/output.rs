//! Run directories and their CSV files.
//!
//! A run directory holds `cell.toml` (scheme, device capacity, seed), the config it
//! was produced with, and the CSV logs. Reals are written with 9 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::orchestrator::{Cell, EpisodeLog, ExperimentConfig, RunLog, Scheme};

pub const EPISODES_HEADER: [&str; 5] = ["run_id", "episode", "cumulative_reward", "mean_cost", "infeasible_slots"];
pub const SLOTS_HEADER: [&str; 11] = ["run_id", "episode", "slot", "x", "DL", "DE", "DC", "EC", "UC", "cost", "r_o"];

/// `%.9g`-style rendering: 9 significant digits, trailing zeros dropped, exponent
/// form outside `[1e-4, 1e9)`.
pub fn fmt_real(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellFile {
    pub scheme: Scheme,
    pub cp_md: f64,
    pub seed: u64,
}

impl From<Cell> for CellFile {
    fn from(c: Cell) -> Self {
        Self {
            scheme: c.scheme,
            cp_md: c.cp_md,
            seed: c.seed,
        }
    }
}

impl From<CellFile> for Cell {
    fn from(c: CellFile) -> Self {
        Self {
            scheme: c.scheme,
            cp_md: c.cp_md,
            seed: c.seed,
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Usage(format!("csv: {other:?}")),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(csv_err)
}

pub fn write_episodes(path: &Path, run_id: &str, episodes: &[EpisodeLog]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(EPISODES_HEADER).map_err(csv_err)?;
    for e in episodes {
        w.write_record([
            run_id.to_string(),
            e.episode.to_string(),
            fmt_real(e.cumulative_reward()),
            fmt_real(e.mean_cost()),
            e.infeasible_slots().to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_slots(path: &Path, run_id: &str, episodes: &[EpisodeLog]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(SLOTS_HEADER).map_err(csv_err)?;
    for e in episodes {
        for s in &e.slots {
            w.write_record([
                run_id.to_string(),
                e.episode.to_string(),
                s.slot.to_string(),
                fmt_real(s.x),
                fmt_real(s.local_delay),
                fmt_real(s.edge_delay),
                fmt_real(s.execution_delay),
                fmt_real(s.md_energy),
                fmt_real(s.usage_charge),
                fmt_real(s.cost),
                fmt_real(s.md_reward),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Placement decisions, finalized stage rewards and violated constraints.
pub fn write_placements(path: &Path, run_id: &str, phases: &[(&str, &[EpisodeLog])]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["run_id", "phase", "episode", "slot", "hosts", "stage_rewards", "violations"])
        .map_err(csv_err)?;
    for (phase, episodes) in phases {
        for e in *episodes {
            for s in &e.slots {
                let hosts: Vec<String> = s.hosts.iter().map(|h| h.to_string()).collect();
                let rewards: Vec<String> = s.stage_rewards.iter().map(|r| fmt_real(*r)).collect();
                let violations: Vec<String> = s
                    .feasibility
                    .as_array()
                    .iter()
                    .enumerate()
                    .filter(|(_, ok)| !**ok)
                    .map(|(i, _)| format!("C{}", i + 1))
                    .collect();
                w.write_record([
                    run_id.to_string(),
                    phase.to_string(),
                    e.episode.to_string(),
                    s.slot.to_string(),
                    hosts.join(";"),
                    rewards.join(";"),
                    violations.join(";"),
                ])
                .map_err(csv_err)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostics(path: &Path, run_id: &str, episodes: &[EpisodeLog]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["run_id", "episode", "critic_loss", "actor_loss", "placement_loss", "epsilon"])
        .map_err(csv_err)?;
    for e in episodes {
        let s = &e.stats;
        w.write_record([
            run_id.to_string(),
            e.episode.to_string(),
            fmt_real(s.critic_loss),
            fmt_real(s.actor_loss),
            fmt_real(s.placement_loss),
            fmt_real(s.epsilon),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run_dir(out: &Path, cell: Cell) -> PathBuf {
    out.join(cell.run_id())
}

/// Write every artifact of a finished cell under `out/<run_id>/`.
pub fn write_run(out: &Path, log: &RunLog, cfg: &ExperimentConfig) -> Result<PathBuf> {
    let dir = run_dir(out, log.cell);
    fs::create_dir_all(&dir)?;
    let id = log.run_id();
    fs::write(
        dir.join("cell.toml"),
        toml::to_string(&CellFile::from(log.cell)).expect("cell is serializable"),
    )?;
    fs::write(dir.join("config.toml"), cfg.to_toml())?;
    write_episodes(&dir.join("episodes.csv"), &id, &log.training)?;
    write_slots(&dir.join("slots.csv"), &id, &log.training)?;
    write_episodes(&dir.join("eval_episodes.csv"), &id, &log.evaluation)?;
    write_slots(&dir.join("eval_slots.csv"), &id, &log.evaluation)?;
    write_diagnostics(&dir.join("diagnostics.csv"), &id, &log.training)?;
    write_placements(
        &dir.join("placements.csv"),
        &id,
        &[("train", &log.training), ("eval", &log.evaluation)],
    )?;
    Ok(dir)
}

/// Evaluation-only artifacts (used by `eval`).
pub fn write_evaluation(out: &Path, cell: Cell, episodes: &[EpisodeLog]) -> Result<PathBuf> {
    let dir = run_dir(out, cell);
    fs::create_dir_all(&dir)?;
    let id = cell.run_id();
    fs::write(
        dir.join("cell.toml"),
        toml::to_string(&CellFile::from(cell)).expect("cell is serializable"),
    )?;
    write_episodes(&dir.join("eval_episodes.csv"), &id, episodes)?;
    write_slots(&dir.join("eval_slots.csv"), &id, episodes)?;
    write_placements(&dir.join("placements.csv"), &id, &[("eval", episodes)])?;
    Ok(dir)
}

/// Parsed `slots.csv` row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotRow {
    pub episode: usize,
    pub x: f64,
    pub execution_delay: f64,
    pub md_energy: f64,
    pub usage_charge: f64,
    pub cost: f64,
    pub md_reward: f64,
}

fn parse<T: std::str::FromStr>(field: &str, path: &Path) -> Result<T> {
    field
        .parse()
        .map_err(|_| Error::Usage(format!("{}: cannot parse {field:?}", path.display())))
}

fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<csv::StringRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let got = r.headers().map_err(csv_err)?.clone();
    if got.iter().ne(header.iter().copied()) {
        return Err(Error::Usage(format!("{}: unexpected header", path.display())));
    }
    r.records().map(|x| x.map_err(csv_err)).collect()
}

pub fn read_slots(path: &Path) -> Result<Vec<SlotRow>> {
    read_rows(path, &SLOTS_HEADER)?
        .iter()
        .map(|rec| {
            Ok(SlotRow {
                episode: parse(&rec[1], path)?,
                x: parse(&rec[3], path)?,
                execution_delay: parse(&rec[6], path)?,
                md_energy: parse(&rec[7], path)?,
                usage_charge: parse(&rec[8], path)?,
                cost: parse(&rec[9], path)?,
                md_reward: parse(&rec[10], path)?,
            })
        })
        .collect()
}

/// `(episode, cumulative_reward)` pairs of an `episodes.csv`.
pub fn read_episode_rewards(path: &Path) -> Result<Vec<(usize, f64)>> {
    read_rows(path, &EPISODES_HEADER)?
        .iter()
        .map(|rec| Ok((parse(&rec[1], path)?, parse(&rec[2], path)?)))
        .collect()
}

pub fn read_cell(dir: &Path) -> Result<Cell> {
    let text = fs::read_to_string(dir.join("cell.toml"))?;
    let c: CellFile = toml::from_str(&text).map_err(|e| Error::Usage(format!("{}: {e}", dir.display())))?;
    Ok(c.into())
}
