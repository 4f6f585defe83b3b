//! `report`: metrics, ranks and plot-ready series from a directory of finished runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use log::{info, warn};

use super::metrics::{compute_metrics, friedman_ranks, CellSummaryInput, MetricsTable, RankTable, RankedMetric};
use super::output::{fmt_real, read_cell, read_episode_rewards, read_slots};
use crate::error::Result;

pub const METRICS_HEADER: [&str; 10] = [
    "scheme",
    "cp_md",
    "seed",
    "AED",
    "AEC",
    "AUC",
    "mean_cost",
    "NAC",
    "mean_cumulative_reward",
    "avg_episodic_reward",
];
pub const RANKS_HEADER: [&str; 4] = ["metric", "scheme", "average_rank", "position"];

/// Run directories directly under `root`, in name order.
pub fn find_runs(root: &Path) -> Result<Vec<PathBuf>> {
    let mut dirs = Vec::new();
    for entry in fs::read_dir(root)? {
        let p = entry?.path();
        if p.join("cell.toml").is_file() {
            dirs.push(p);
        }
    }
    dirs.sort();
    Ok(dirs)
}

/// Read one run directory. Missing logs yield empty series, which the metrics
/// step treats as an incomplete cell.
pub fn load_run(dir: &Path) -> Result<CellSummaryInput> {
    let cell = read_cell(dir)?;
    let optional = |name: &str| {
        let p = dir.join(name);
        if p.is_file() {
            Some(p)
        } else {
            warn!("{}: no {name}", dir.display());
            None
        }
    };
    let training_rewards = match optional("episodes.csv") {
        Some(p) => read_episode_rewards(&p)?.into_iter().map(|(_, r)| r).collect(),
        None => Vec::new(),
    };
    let eval_rewards = match optional("eval_episodes.csv") {
        Some(p) => read_episode_rewards(&p)?.into_iter().map(|(_, r)| r).collect(),
        None => Vec::new(),
    };
    let eval_slots = match optional("eval_slots.csv") {
        Some(p) => read_slots(&p)?
            .into_iter()
            .map(|s| [s.execution_delay, s.md_energy, s.usage_charge, s.cost])
            .collect(),
        None => Vec::new(),
    };
    Ok(CellSummaryInput {
        scheme: cell.scheme.to_string(),
        cp_md: cell.cp_md,
        seed: cell.seed,
        training_rewards,
        eval_rewards,
        eval_slots,
    })
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut text = header.join(",");
    text.push('\n');
    for r in rows {
        text.push_str(&r.join(","));
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn write_metrics(path: &Path, table: &MetricsTable) -> Result<()> {
    write_csv(
        path,
        &METRICS_HEADER,
        table.rows.iter().map(|r| {
            vec![
                r.scheme.clone(),
                fmt_real(r.cp_md),
                r.seed.to_string(),
                fmt_real(r.aed),
                fmt_real(r.aec),
                fmt_real(r.auc),
                fmt_real(r.mean_cost),
                fmt_real(r.nac),
                fmt_real(r.mean_cumulative_reward),
                fmt_real(r.avg_episodic_reward),
            ]
        }),
    )
}

/// Average ranks use the 4-decimal layout of a ranking table.
pub fn write_ranks(path: &Path, ranks: &[RankTable]) -> Result<()> {
    write_csv(
        path,
        &RANKS_HEADER,
        ranks.iter().flat_map(|t| {
            t.entries.iter().map(|e| {
                vec![
                    t.metric.clone(),
                    e.scheme.clone(),
                    format!("{:.4}", e.average_rank),
                    e.position.to_string(),
                ]
            })
        }),
    )
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    (m, var.sqrt())
}

/// Training reward per episode, averaged over seeds, per `(scheme, cp_md)`.
pub fn write_reward_curves(path: &Path, cells: &[CellSummaryInput]) -> Result<()> {
    let mut curves: BTreeMap<(String, String), Vec<Vec<f64>>> = BTreeMap::new();
    for c in cells.iter().filter(|c| !c.training_rewards.is_empty()) {
        let key = (c.scheme.clone(), fmt_real(c.cp_md));
        let slot = curves.entry(key).or_default();
        for (e, r) in c.training_rewards.iter().enumerate() {
            if slot.len() <= e {
                slot.push(Vec::new());
            }
            slot[e].push(*r);
        }
    }
    write_csv(
        path,
        &["scheme", "cp_md", "episode", "mean_reward", "seeds"],
        curves.into_iter().flat_map(|((scheme, cp), eps)| {
            eps.into_iter().enumerate().map(move |(e, rs)| {
                vec![
                    scheme.clone(),
                    cp.clone(),
                    e.to_string(),
                    fmt_real(mean_std(&rs).0),
                    rs.len().to_string(),
                ]
            })
        }),
    )
}

/// Per-metric bar heights (seed mean and population std) per `(scheme, cp_md)`.
pub fn write_bars(path: &Path, table: &MetricsTable) -> Result<()> {
    let mut groups: BTreeMap<(String, String), Vec<usize>> = BTreeMap::new();
    for (i, r) in table.rows.iter().enumerate() {
        groups.entry((r.scheme.clone(), fmt_real(r.cp_md))).or_default().push(i);
    }
    let mut rows = Vec::new();
    for m in RankedMetric::ALL {
        for ((scheme, cp), idx) in &groups {
            let v: Vec<f64> = idx.iter().map(|&i| m.value(&table.rows[i])).collect();
            let (mean, std) = mean_std(&v);
            rows.push(vec![
                m.name().to_string(),
                scheme.clone(),
                cp.clone(),
                fmt_real(mean),
                fmt_real(std),
                v.len().to_string(),
            ]);
        }
    }
    write_csv(path, &["metric", "scheme", "cp_md", "mean", "std", "seeds"], rows)
}

/// Build every report file from the runs under `runs` into `out`. Fails with
/// [`crate::Error::MissingCells`] (after writing metrics.csv) when the runs are not a
/// full scheme by capacity grid.
pub fn report(runs: &Path, out: &Path) -> Result<MetricsTable> {
    let cells: Vec<CellSummaryInput> = find_runs(runs)?.iter().map(|d| load_run(d)).collect::<Result<_>>()?;
    info!("report over {} runs in {}", cells.len(), runs.display());
    let table = compute_metrics(&cells);
    fs::create_dir_all(out)?;
    write_metrics(&out.join("metrics.csv"), &table)?;
    let ranks = friedman_ranks(&table)?;
    write_ranks(&out.join("ranks.csv"), &ranks)?;
    write_reward_curves(&out.join("reward_curves.csv"), &cells)?;
    write_bars(&out.join("bars.csv"), &table)?;
    Ok(table)
}
