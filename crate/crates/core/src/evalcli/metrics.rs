//! Per-cell summary metrics and Friedman average ranks.

use std::cmp::Ordering;

use log::warn;

use crate::error::{Error, Result};

/// What one cell contributes to the metrics table.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummaryInput {
    pub scheme: String,
    pub cp_md: f64,
    pub seed: u64,
    /// Cumulative reward of every training episode, in order.
    pub training_rewards: Vec<f64>,
    /// Cumulative reward of every evaluation episode.
    pub eval_rewards: Vec<f64>,
    /// `(DC, EC, UC, cost)` of every evaluation slot.
    pub eval_slots: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub scheme: String,
    pub cp_md: f64,
    pub seed: u64,
    pub aed: f64,
    pub aec: f64,
    pub auc: f64,
    pub mean_cost: f64,
    pub nac: f64,
    pub mean_cumulative_reward: f64,
    pub avg_episodic_reward: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricsTable {
    pub rows: Vec<MetricsRow>,
}

fn mean(v: impl IntoIterator<Item = f64>) -> f64 {
    let (s, n) = v.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

/// Mean of the final tenth (at least one) of the training episodes.
pub fn average_episodic_reward(training_rewards: &[f64]) -> f64 {
    let n = training_rewards.len();
    let tail = n.div_ceil(10).max(1).min(n);
    mean(training_rewards[n - tail..].iter().copied())
}

/// AED/AEC/AUC are per-slot means over the evaluation episodes. NAC min-max scales
/// each cell's mean cost against the other schemes sharing its device capacity and
/// seed (0 when that group has one scheme or no spread). Cells without evaluation
/// slots are dropped with a warning.
pub fn compute_metrics(cells: &[CellSummaryInput]) -> MetricsTable {
    let mut rows: Vec<MetricsRow> = Vec::with_capacity(cells.len());
    for c in cells {
        if c.eval_slots.is_empty() || c.training_rewards.is_empty() {
            warn!(
                "skipping incomplete cell {}-cp{}-s{}",
                c.scheme, c.cp_md, c.seed
            );
            continue;
        }
        rows.push(MetricsRow {
            scheme: c.scheme.clone(),
            cp_md: c.cp_md,
            seed: c.seed,
            aed: mean(c.eval_slots.iter().map(|s| s[0])),
            aec: mean(c.eval_slots.iter().map(|s| s[1])),
            auc: mean(c.eval_slots.iter().map(|s| s[2])),
            mean_cost: mean(c.eval_slots.iter().map(|s| s[3])),
            nac: 0.0,
            mean_cumulative_reward: mean(c.eval_rewards.iter().copied()),
            avg_episodic_reward: average_episodic_reward(&c.training_rewards),
        });
    }
    let groups: Vec<(f64, u64)> = rows.iter().map(|r| (r.cp_md, r.seed)).collect();
    for (cp, seed) in groups {
        let members = || rows.iter().filter(|r| r.cp_md == cp && r.seed == seed);
        let lo = members().map(|r| r.mean_cost).fold(f64::INFINITY, f64::min);
        let hi = members().map(|r| r.mean_cost).fold(f64::NEG_INFINITY, f64::max);
        for r in rows.iter_mut().filter(|r| r.cp_md == cp && r.seed == seed) {
            r.nac = if hi > lo { (r.mean_cost - lo) / (hi - lo) } else { 0.0 };
        }
    }
    rows.sort_by(|a, b| {
        a.scheme
            .cmp(&b.scheme)
            .then(a.cp_md.total_cmp(&b.cp_md))
            .then(a.seed.cmp(&b.seed))
    });
    MetricsTable { rows }
}

/// Metrics that are ranked (all lower-is-better).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankedMetric {
    Aed,
    Aec,
    Auc,
    Nac,
}

impl RankedMetric {
    pub const ALL: [RankedMetric; 4] = [RankedMetric::Aed, RankedMetric::Aec, RankedMetric::Auc, RankedMetric::Nac];

    pub fn name(self) -> &'static str {
        match self {
            RankedMetric::Aed => "AED",
            RankedMetric::Aec => "AEC",
            RankedMetric::Auc => "AUC",
            RankedMetric::Nac => "NAC",
        }
    }

    pub fn value(self, r: &MetricsRow) -> f64 {
        match self {
            RankedMetric::Aed => r.aed,
            RankedMetric::Aec => r.aec,
            RankedMetric::Auc => r.auc,
            RankedMetric::Nac => r.nac,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub scheme: String,
    pub average_rank: f64,
    /// 1 + number of schemes with a strictly lower average rank, so ties share a position.
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub metric: String,
    /// Ordered by position.
    pub entries: Vec<RankEntry>,
}

/// Ascending ranks `1..=n`, ties sharing the mean of their slots.
pub fn rank_ascending(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(Ordering::Equal));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Rank `schemes` within every scenario (one score row per scenario, lower is
/// better) and average across scenarios.
pub fn friedman_from_scores(metric: &str, schemes: &[String], scenarios: &[Vec<f64>]) -> Result<RankTable> {
    if schemes.is_empty() || scenarios.is_empty() {
        return Err(Error::MissingCells(format!("{metric}: no schemes or scenarios to rank")));
    }
    let mut totals = vec![0.0; schemes.len()];
    for (i, row) in scenarios.iter().enumerate() {
        if row.len() != schemes.len() {
            return Err(Error::MissingCells(format!(
                "{metric}: scenario {i} has {} scores for {} schemes",
                row.len(),
                schemes.len()
            )));
        }
        for (t, r) in totals.iter_mut().zip(rank_ascending(row)) {
            *t += r;
        }
    }
    let n = scenarios.len() as f64;
    let mut entries: Vec<RankEntry> = schemes
        .iter()
        .zip(totals)
        .map(|(s, t)| RankEntry {
            scheme: s.clone(),
            average_rank: t / n,
            position: 0,
        })
        .collect();
    entries.sort_by(|a, b| {
        a.average_rank
            .total_cmp(&b.average_rank)
            .then_with(|| a.scheme.cmp(&b.scheme))
    });
    for i in 0..entries.len() {
        let ahead = entries.iter().filter(|o| o.average_rank < entries[i].average_rank).count();
        entries[i].position = ahead + 1;
    }
    Ok(RankTable {
        metric: metric.to_string(),
        entries,
    })
}

/// Friedman average ranks of every scheme for each ranked metric. Scenarios are
/// device capacities; a scheme's score in a scenario is its mean over seeds.
pub fn friedman_ranks(table: &MetricsTable) -> Result<Vec<RankTable>> {
    let mut schemes: Vec<String> = table.rows.iter().map(|r| r.scheme.clone()).collect();
    schemes.sort();
    schemes.dedup();
    let mut caps: Vec<f64> = table.rows.iter().map(|r| r.cp_md).collect();
    caps.sort_by(f64::total_cmp);
    caps.dedup();
    let missing: Vec<String> = caps
        .iter()
        .flat_map(|&cp| schemes.iter().map(move |s| (s, cp)))
        .filter(|(s, cp)| !table.rows.iter().any(|r| &r.scheme == *s && r.cp_md == *cp))
        .map(|(s, cp)| format!("{s}@{cp}"))
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingCells(missing.join(", ")));
    }
    RankedMetric::ALL
        .iter()
        .map(|&m| {
            let scenarios: Vec<Vec<f64>> = caps
                .iter()
                .map(|&cp| {
                    schemes
                        .iter()
                        .map(|s| {
                            mean(
                                table
                                    .rows
                                    .iter()
                                    .filter(|r| &r.scheme == s && r.cp_md == cp)
                                    .map(|r| m.value(r)),
                            )
                        })
                        .collect()
                })
                .collect();
            friedman_from_scores(m.name(), &schemes, &scenarios)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cell(scheme: &str, cp: f64, dc: &[f64], cost: f64) -> CellSummaryInput {
        CellSummaryInput {
            scheme: scheme.into(),
            cp_md: cp,
            seed: 0,
            training_rewards: vec![-1.0; 10],
            eval_rewards: vec![-2.0],
            eval_slots: dc.iter().map(|&d| [d, 1.0, 0.0, cost]).collect(),
        }
    }

    #[test]
    fn aed_is_slot_mean() {
        let t = compute_metrics(&[cell("local", 0.6, &[2.0, 4.0], 1.0)]);
        assert_eq!(t.rows[0].aed, 3.0);
        assert_eq!(t.rows[0].nac, 0.0);
        assert_eq!(t.rows[0].auc, 0.0);
    }

    #[test]
    fn nac_min_max_per_group() {
        let t = compute_metrics(&[
            cell("a", 0.6, &[1.0], 2.0),
            cell("b", 0.6, &[1.0], 4.0),
            cell("c", 0.6, &[1.0], 3.0),
            cell("a", 1.6, &[1.0], 7.0),
        ]);
        let nac: Vec<(String, f64, f64)> = t.rows.iter().map(|r| (r.scheme.clone(), r.cp_md, r.nac)).collect();
        assert_eq!(
            nac,
            vec![
                ("a".into(), 0.6, 0.0),
                ("a".into(), 1.6, 0.0),
                ("b".into(), 0.6, 1.0),
                ("c".into(), 0.6, 0.5)
            ]
        );
    }

    #[test]
    fn incomplete_cells_dropped() {
        let mut c = cell("a", 0.6, &[], 1.0);
        c.eval_slots.clear();
        assert!(compute_metrics(&[c]).rows.is_empty());
    }

    #[test]
    fn tail_average() {
        let r: Vec<f64> = (0..20).map(|i| i as f64).collect();
        assert_eq!(average_episodic_reward(&r), 18.5);
        assert_eq!(average_episodic_reward(&[4.0]), 4.0);
    }

    #[test]
    fn ties_share_rank() {
        assert_eq!(rank_ascending(&[3.0, 1.0, 3.0, 2.0]), vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn missing_cells_listed() {
        let t = compute_metrics(&[
            cell("a", 0.6, &[1.0], 1.0),
            cell("b", 0.6, &[1.0], 1.0),
            cell("a", 1.6, &[1.0], 1.0),
        ]);
        match friedman_ranks(&t) {
            Err(Error::MissingCells(m)) => assert_eq!(m, "b@1.6"),
            other => panic!("expected missing cells, got {other:?}"),
        }
    }
}
