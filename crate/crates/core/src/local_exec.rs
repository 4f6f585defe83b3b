//! On-device execution of the local share of a task.
//!
//! The chain is cut into consecutive groups whose summed compute demand fits on the
//! device; each group is instantiated (paying its slowest VNF's instantiation delay),
//! runs, and is torn down before the next group starts.

use serde::{Deserialize, Serialize};

use crate::error::{Constraint, Error, Result};
use crate::workload::{ServiceChain, Task};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobileDevice {
    /// GHz
    pub compute_capacity: f64,
    /// W
    pub tx_power: f64,
    /// W
    pub rx_power: f64,
    pub capacitance_coefficient: f64,
}

/// Consecutive groups of 0-based VNF indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPartition {
    pub groups: Vec<Vec<usize>>,
}

impl GroupPartition {
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }
}

/// Greedy in-order packing under `capacity` GHz. A VNF that alone exceeds the
/// capacity still gets its own group; callers that care check C4 first.
pub(crate) fn greedy_groups(chain: &ServiceChain, capacity: f64) -> GroupPartition {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    let mut load = 0.0;
    for (i, vnf) in chain.vnfs.iter().enumerate() {
        if !current.is_empty() && load + vnf.compute_demand > capacity {
            groups.push(std::mem::take(&mut current));
            load = 0.0;
        }
        current.push(i);
        load += vnf.compute_demand;
    }
    if !current.is_empty() {
        groups.push(current);
    }
    GroupPartition { groups }
}

/// True when every VNF fits on the device on its own (C4).
pub fn fits_on_device(chain: &ServiceChain, md: &MobileDevice) -> bool {
    chain
        .vnfs
        .iter()
        .all(|v| v.compute_demand <= md.compute_capacity)
}

pub fn partition_into_groups(chain: &ServiceChain, md: &MobileDevice) -> Result<GroupPartition> {
    if let Some(v) = chain
        .vnfs
        .iter()
        .find(|v| v.compute_demand > md.compute_capacity)
    {
        return Err(Error::Infeasible {
            constraint: Constraint::C4,
            detail: format!(
                "VNF {} needs {} GHz, device has {} GHz",
                v.index_in_chain, v.compute_demand, md.compute_capacity
            ),
        });
    }
    Ok(greedy_groups(chain, md.compute_capacity))
}

pub(crate) fn check_ratio(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Infeasible {
            constraint: Constraint::C1,
            detail: format!("offloading ratio {x} outside [0, 1]"),
        });
    }
    Ok(())
}

/// Local computing delay (s). Zero when everything is offloaded.
pub fn local_delay(task: &Task, x: f64, partition: &GroupPartition) -> Result<f64> {
    check_ratio(x)?;
    if x == 1.0 {
        return Ok(0.0);
    }
    let vnfs = &task.chain.vnfs;
    let chi = (1.0 - x) * task.cycles();
    let mut total = 0.0;
    for (k, group) in partition.groups.iter().enumerate() {
        let inst = group
            .iter()
            .map(|&i| vnfs[i].instantiation_delay)
            .fold(0.0, f64::max);
        let mut processing = 0.0;
        for (j, &i) in group.iter().enumerate() {
            let scale = match (k, j) {
                (0, 0) => 1.0,
                // first VNF of a later group: last output of the previous group
                (_, 0) => {
                    let prev = *partition.groups[k - 1].last().expect("groups are non-empty");
                    vnfs[prev].output_ratio
                }
                _ => vnfs[group[j - 1]].output_ratio,
            };
            processing += scale * chi / vnfs[i].compute_hz();
        }
        total += inst + processing;
    }
    Ok(total)
}

/// Local computing energy (J), with compute expressed in cycles/s.
pub fn local_energy(task: &Task, x: f64, md: &MobileDevice) -> Result<f64> {
    check_ratio(x)?;
    if x == 1.0 {
        return Ok(0.0);
    }
    let base = (1.0 - x) * task.cycles() * md.capacitance_coefficient;
    Ok(task
        .chain
        .vnfs
        .iter()
        .enumerate()
        .map(|(i, v)| task.chain.input_ratio(i) * base * v.compute_hz().powi(2))
        .sum())
}
