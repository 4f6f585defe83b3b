//! Weighted per-slot cost and the feasibility constraints C1..C7.

use serde::{Deserialize, Serialize};

use crate::edge_exec::PlacementRecord;
use crate::error::{Error, Result};
use crate::local_exec::{fits_on_device, MobileDevice};
use crate::range::ValueRange;
use crate::topology::EdgeInfrastructure;
use crate::workload::Task;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    pub delay: f64,
    pub energy: f64,
    pub charge: f64,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            delay: 1.0 / 3.0,
            energy: 1.0 / 3.0,
            charge: 1.0 / 3.0,
        }
    }
}

impl CostWeights {
    pub fn new(delay: f64, energy: f64, charge: f64) -> Result<Self> {
        let w = Self {
            delay,
            energy,
            charge,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if self.delay < 0.0 || self.energy < 0.0 || self.charge < 0.0 {
            return Err(Error::config("cost weights must be non-negative"));
        }
        let sum = self.delay + self.energy + self.charge;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!("cost weights sum to {sum}, expected 1")));
        }
        Ok(())
    }
}

/// Optional min-max rescaling of delay, energy and charge onto `[0, 1]` before
/// weighting. Values outside the bounds are clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub delay: ValueRange,
    pub energy: ValueRange,
    pub charge: ValueRange,
}

impl Normalization {
    fn scale(v: f64, r: ValueRange) -> f64 {
        if r.max == r.min {
            return 0.0;
        }
        ((v - r.min) / (r.max - r.min)).clamp(0.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostModel {
    pub weights: CostWeights,
    pub normalization: Option<Normalization>,
}

impl CostModel {
    pub fn cost(&self, delay: f64, energy: f64, charge: f64) -> f64 {
        let (d, e, c) = match &self.normalization {
            None => (delay, energy, charge),
            Some(n) => (
                Normalization::scale(delay, n.delay),
                Normalization::scale(energy, n.energy),
                Normalization::scale(charge, n.charge),
            ),
        };
        self.weights.delay * d + self.weights.energy * e + self.weights.charge * c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityFlags {
    pub c1: bool,
    pub c2: bool,
    pub c3: bool,
    pub c4: bool,
    pub c5: bool,
    pub c6: bool,
    pub c7: bool,
}

impl Default for FeasibilityFlags {
    fn default() -> Self {
        Self::all_satisfied()
    }
}

impl FeasibilityFlags {
    pub const fn all_satisfied() -> Self {
        Self {
            c1: true,
            c2: true,
            c3: true,
            c4: true,
            c5: true,
            c6: true,
            c7: true,
        }
    }

    pub fn all(&self) -> bool {
        self.as_array().iter().all(|&b| b)
    }

    pub fn as_array(&self) -> [bool; 7] {
        [self.c1, self.c2, self.c3, self.c4, self.c5, self.c6, self.c7]
    }

    pub fn violations(&self) -> usize {
        self.as_array().iter().filter(|&&b| !b).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotResult {
    pub local_delay: f64,
    pub edge_delay: f64,
    pub execution_delay: f64,
    pub local_energy: f64,
    pub edge_energy: f64,
    pub md_energy: f64,
    pub usage_charge: f64,
    pub cost: f64,
    pub feasibility: FeasibilityFlags,
}

/// Aggregate the local and edge components of one slot. Feasibility starts out all
/// satisfied; attach the real flags with [`SlotResult::with_flags`].
pub fn task_cost(dl: f64, el: f64, de: f64, ee: f64, uc: f64, model: &CostModel) -> SlotResult {
    let dc = dl.max(de);
    let ec = el + ee;
    SlotResult {
        local_delay: dl,
        edge_delay: de,
        execution_delay: dc,
        local_energy: el,
        edge_energy: ee,
        md_energy: ec,
        usage_charge: uc,
        cost: model.cost(dc, ec, uc),
        feasibility: FeasibilityFlags::all_satisfied(),
    }
}

impl SlotResult {
    pub fn with_flags(mut self, flags: FeasibilityFlags) -> Self {
        self.feasibility = flags;
        self
    }
}

/// Evaluate C1..C7 for a complete placement against the ledger in `infra`.
/// Constraints that belong to a pipeline the ratio skips are reported satisfied.
#[allow(clippy::too_many_arguments)]
pub fn check_constraints(
    task: &Task,
    x: f64,
    placement: Option<&PlacementRecord>,
    md: &MobileDevice,
    dl: f64,
    de: f64,
    infra: &EdgeInfrastructure,
) -> FeasibilityFlags {
    let mut f = FeasibilityFlags::all_satisfied();
    f.c1 = (0.0..=1.0).contains(&x);
    let runs_local = x < 1.0;
    let runs_edge = x > 0.0;
    if runs_local {
        f.c3 = dl <= task.deadline;
        f.c4 = fits_on_device(&task.chain, md);
    }
    if runs_edge {
        match placement {
            None => {
                f.c2 = false;
                f.c5 = false;
                f.c6 = false;
            }
            Some(p) => {
                let n = infra.station_count();
                f.c2 = p.hosts.len() == task.chain.len() && p.hosts.iter().all(|&h| h < n);
                if f.c2 {
                    f.c5 = p
                        .hosts
                        .iter()
                        .zip(&task.chain.vnfs)
                        .all(|(&h, v)| v.compute_demand <= infra.stations[h].compute_available);
                    f.c6 = task
                        .chain
                        .inter_vnf_bandwidth
                        .iter()
                        .enumerate()
                        .all(|(i, &br)| br <= infra.path_min_bandwidth(p.inter_segment(i)));
                } else {
                    f.c5 = false;
                    f.c6 = false;
                }
            }
        }
        f.c7 = de <= task.deadline;
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{BaseStation, RouteWeight, WiredLink};
    use crate::workload::{ServiceChain, VnfSpec};

    fn task(br: f64) -> Task {
        let v = |i: usize| VnfSpec {
            index_in_chain: i + 1,
            compute_demand: 0.3,
            instantiation_delay: 0.1,
            output_ratio: 1.0,
        };
        Task {
            chain: ServiceChain {
                vnfs: vec![v(0), v(1)],
                inter_vnf_bandwidth: vec![br],
            },
            input_bits: 1e6,
            cycles_per_bit: 1000.0,
            deadline: 20.0,
            slot: 0,
        }
    }

    fn md() -> MobileDevice {
        MobileDevice {
            compute_capacity: 0.6,
            tx_power: 0.5,
            rx_power: 0.1,
            capacitance_coefficient: 1e-26,
        }
    }

    fn infra() -> EdgeInfrastructure {
        let st = |id| BaseStation {
            id,
            compute_capacity_total: 3.0,
            compute_available: 3.0,
            tx_power: 1.0,
            distance_to_md: 200.0,
        };
        EdgeInfrastructure::new(
            vec![st(0), st(1)],
            vec![WiredLink {
                endpoints: (0, 1),
                bandwidth_total: 7.0,
                bandwidth_available: 7.0,
            }],
            RouteWeight::Hops,
        )
        .unwrap()
    }

    #[test]
    fn weighted_cost() {
        let m = CostModel::default();
        let r = task_cost(2.0, 0.5, 3.0, 0.1, 0.9, &m);
        assert_eq!(r.execution_delay, 3.0);
        assert!((r.md_energy - 0.6).abs() < 1e-15);
        assert!((r.cost - 1.5).abs() < 1e-12);
        let delay_only = CostModel {
            weights: CostWeights::new(1.0, 0.0, 0.0).unwrap(),
            normalization: None,
        };
        assert_eq!(task_cost(2.0, 0.5, 3.0, 0.1, 0.9, &delay_only).cost, 3.0);
    }

    #[test]
    fn weights_validated() {
        assert!(CostWeights::new(0.5, 0.5, 0.5).is_err());
        assert!(CostWeights::new(-0.1, 0.6, 0.5).is_err());
    }

    #[test]
    fn normalized_components() {
        let m = CostModel {
            weights: CostWeights::default(),
            normalization: Some(Normalization {
                delay: ValueRange::new(0.0, 10.0),
                energy: ValueRange::new(0.0, 2.0),
                charge: ValueRange::new(0.0, 1.0),
            }),
        };
        let c = m.cost(5.0, 4.0, 0.5);
        assert!((c - (0.5 + 1.0 + 0.5) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_out_of_range_flags_c1() {
        let t = task(5.0);
        let f = check_constraints(&t, 1.2, None, &md(), 0.0, 0.0, &infra());
        assert!(!f.c1);
        assert!(!f.all());
    }

    #[test]
    fn deadline_boundary_inclusive() {
        let t = task(5.0);
        let f = check_constraints(&t, 0.0, None, &md(), 20.0, 0.0, &infra());
        assert!(f.c3 && f.all());
        let f = check_constraints(&t, 0.0, None, &md(), 20.000001, 0.0, &infra());
        assert!(!f.c3);
    }

    #[test]
    fn bandwidth_shortfall_flags_c6() {
        let inf = infra();
        let t = task(8.0);
        let p = PlacementRecord::route(&inf, 0, vec![0, 1]).unwrap();
        let f = check_constraints(&t, 0.5, Some(&p), &md(), 1.0, 1.0, &inf);
        assert!(!f.c6);
        assert!(f.c5);
        let t = task(7.0);
        let f = check_constraints(&t, 0.5, Some(&p), &md(), 1.0, 1.0, &inf);
        assert!(f.c6);
    }

    #[test]
    fn skipped_pipelines_are_satisfied() {
        let inf = infra();
        let t = task(50.0);
        // edge-only: huge DL ignored
        let p = PlacementRecord::route(&inf, 0, vec![0, 1]).unwrap();
        let f = check_constraints(&t, 1.0, Some(&p), &md(), 99.0, 1.0, &inf);
        assert!(f.c3 && f.c4);
        assert!(!f.c6);
        // local-only: huge DE ignored, no placement needed
        let f = check_constraints(&t, 0.0, None, &md(), 1.0, 99.0, &inf);
        assert!(f.all());
    }
}
