//! The two cooperating environments.
//!
//! The MD environment sees one task per slot and receives an offloading ratio. When
//! the ratio is positive the EI environment walks the chain one VNF per stage,
//! reserving compute and bandwidth on the live ledger, and reports delay, energy
//! and charge back to the MD side. All holds are released when the slot finishes.

use serde::{Deserialize, Serialize};

use crate::cost::{task_cost, CostModel, FeasibilityFlags, SlotResult};
use crate::edge_exec::{access_rates, evaluate_edge, EdgeOutcome, LinkRates, PlacementRecord, Pricing};
use crate::error::{Error, Result};
use crate::local_exec::{fits_on_device, greedy_groups, local_delay, local_energy, MobileDevice};
use crate::topology::{EdgeInfrastructure, ReservationReceipt, ReservationRequest, TopologyConfig};
use crate::workload::{Channel, Task, WorkloadConfig};

/// Penalties and placement-reward weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    /// MD reward when any constraint fails.
    pub infeasible_penalty: f64,
    pub c5_penalty: f64,
    pub c6_penalty: f64,
    pub c7_penalty: f64,
    /// Weight of the edge delay in the final placement reward.
    pub placement_delay_weight: f64,
    /// Weight of the usage charge in the final placement reward.
    pub placement_charge_weight: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            infeasible_penalty: 100.0,
            c5_penalty: 100.0,
            c6_penalty: 100.0,
            c7_penalty: 100.0,
            placement_delay_weight: 0.5,
            placement_charge_weight: 0.5,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.infeasible_penalty,
            self.c5_penalty,
            self.c6_penalty,
            self.c7_penalty,
            self.placement_delay_weight,
            self.placement_charge_weight,
        ];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::config("penalties and placement weights must be finite and non-negative"));
        }
        Ok(())
    }
}

/// Maxima used to scale state features onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateScales {
    pub max_vnfs: usize,
    pub vnf_compute_ghz: f64,
    pub inter_vnf_mbps: f64,
    pub output_ratio: f64,
    pub input_kbits: f64,
    pub cycles_per_bit: f64,
    pub deadline_s: f64,
    pub md_compute_ghz: f64,
    pub station_compute_ghz: f64,
    pub link_mbps: f64,
}

impl StateScales {
    pub fn new(workload: &WorkloadConfig, topology: &TopologyConfig) -> Self {
        Self {
            max_vnfs: workload.vnf_count.max,
            vnf_compute_ghz: workload.vnf_compute_ghz.max,
            inter_vnf_mbps: workload.inter_vnf_mbps.max,
            output_ratio: workload.output_ratio.max,
            input_kbits: workload.input_kbits.max,
            cycles_per_bit: workload.cycles_per_bit.max,
            deadline_s: workload.deadline_s.max,
            md_compute_ghz: workload.md_compute_max_ghz,
            station_compute_ghz: topology.compute_ghz.max,
            link_mbps: topology.bandwidth_mbps.max,
        }
    }

    fn chain_features(&self, task: &Task, out: &mut Vec<f64>) {
        let n = self.max_vnfs;
        let chain = &task.chain;
        out.push(scaled(chain.len() as f64, n as f64));
        let padded = |out: &mut Vec<f64>, values: &mut dyn Iterator<Item = f64>, len: usize, max: f64| {
            let mut written = 0;
            for v in values.take(len) {
                out.push(scaled(v, max));
                written += 1;
            }
            out.extend(std::iter::repeat_n(0.0, len - written));
        };
        padded(out, &mut chain.vnfs.iter().map(|v| v.compute_demand), n, self.vnf_compute_ghz);
        padded(out, &mut chain.inter_vnf_bandwidth.iter().copied(), n.saturating_sub(1), self.inter_vnf_mbps);
        padded(out, &mut chain.vnfs.iter().map(|v| v.output_ratio), n, self.output_ratio);
    }

    pub fn md_dim(&self) -> usize {
        3 * self.max_vnfs + 4
    }

    pub fn ei_dim(&self, stations: usize, links: usize) -> usize {
        3 * self.max_vnfs + 2 + stations + 1 + self.max_vnfs + stations + links
    }
}

fn scaled(v: f64, max: f64) -> f64 {
    if max > 0.0 {
        (v / max).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// MD observation: chain summary, data size, cycles per bit, deadline, device capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct MdState {
    pub features: Vec<f64>,
}

pub fn md_observe(task: &Task, md: &MobileDevice, scales: &StateScales) -> MdState {
    let mut f = Vec::with_capacity(scales.md_dim());
    scales.chain_features(task, &mut f);
    f.push(scaled(task.input_bits / crate::workload::BITS_PER_KB, scales.input_kbits));
    f.push(scaled(task.cycles_per_bit, scales.cycles_per_bit));
    f.push(scaled(task.deadline, scales.deadline_s));
    f.push(scaled(md.compute_capacity, scales.md_compute_ghz));
    MdState { features: f }
}

/// `-Cost` when every constraint holds, otherwise `-penalty`.
pub fn md_reward(result: &SlotResult, penalty: f64) -> f64 {
    if result.feasibility.all() {
        -result.cost
    } else {
        -penalty
    }
}

/// EI observation at one placement stage.
#[derive(Debug, Clone, PartialEq)]
pub struct EiState {
    /// 0-based index of the VNF about to be placed.
    pub stage: usize,
    /// Host per VNF, `-1` while unplaced.
    pub placement: Vec<i32>,
    pub features: Vec<f64>,
}

fn ei_encode(
    task: &Task,
    x: f64,
    access: usize,
    placement: &[i32],
    infra: &EdgeInfrastructure,
    scales: &StateScales,
) -> Vec<f64> {
    let v = infra.station_count();
    let mut f = Vec::with_capacity(scales.ei_dim(v, infra.link_count()));
    scales.chain_features(task, &mut f);
    f.push(scaled(task.input_bits / crate::workload::BITS_PER_KB, scales.input_kbits));
    f.push(scaled(task.deadline, scales.deadline_s));
    f.extend((0..v).map(|s| if s == access { 1.0 } else { 0.0 }));
    f.push(x);
    for k in 0..scales.max_vnfs {
        f.push(match placement.get(k) {
            Some(&h) if h >= 0 => h as f64 / v as f64,
            _ => -1.0,
        });
    }
    f.extend(
        infra
            .stations
            .iter()
            .map(|s| scaled(s.compute_available, scales.station_compute_ghz)),
    );
    f.extend(
        infra
            .links
            .iter()
            .map(|l| scaled(l.bandwidth_available, scales.link_mbps)),
    );
    f
}

#[derive(Debug, Clone, PartialEq)]
pub struct StagedTransition {
    pub state: EiState,
    pub action: usize,
    pub penalty: f64,
    /// Reward before the delayed update.
    pub reward: f64,
}

/// Placement transitions of the current slot, in stage order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StagedTransitionBuffer {
    pub stages: usize,
    pub entries: Vec<StagedTransition>,
}

impl StagedTransitionBuffer {
    pub fn new(stages: usize) -> Self {
        Self {
            stages,
            entries: Vec::with_capacity(stages),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.stages > 0 && self.entries.len() == self.stages
    }
}

/// Subtract the final-stage reward component from every earlier stage. Returns the
/// finalized rewards in stage order.
pub fn apply_dur(buffer: &StagedTransitionBuffer, final_component: f64) -> Result<Vec<f64>> {
    if !buffer.is_complete() {
        return Err(Error::usage(format!(
            "delayed update needs {} staged transitions, have {}",
            buffer.stages,
            buffer.entries.len()
        )));
    }
    let last = buffer.entries.len() - 1;
    Ok(buffer
        .entries
        .iter()
        .enumerate()
        .map(|(i, t)| if i < last { t.reward - final_component } else { t.reward })
        .collect())
}

/// What the EI reports back to the MD for one slot.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EdgeResults {
    pub edge_delay: f64,
    pub edge_energy: f64,
    pub usage_charge: f64,
    /// Only C2, C5, C6 and C7 are meaningful here.
    pub feasibility: FeasibilityFlags,
}

/// The two messages of the MD/EI protocol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExchangeMessage {
    OffloadRatio { x: f64 },
    EdgeResults(EdgeResults),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageOutcome {
    pub penalty: f64,
    /// Pre-DUR reward of this stage.
    pub reward: f64,
    /// `None` after the last stage.
    pub next: Option<EiState>,
}

/// One finalized placement transition. The last stage of a slot has no next state
/// inside the slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PlacementTransition {
    pub state: EiState,
    pub action: usize,
    pub reward: f64,
    pub next_state: Option<EiState>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSlotReport {
    pub results: EdgeResults,
    pub outcome: EdgeOutcome,
    pub placement: PlacementRecord,
    /// `R_reward` of the final stage.
    pub final_component: f64,
    pub stage_penalties: Vec<f64>,
    pub transitions: Vec<PlacementTransition>,
}

#[derive(Debug)]
struct SlotPlacement {
    task: Task,
    x: f64,
    access: usize,
    rates: LinkRates,
    hosts: Vec<usize>,
    receipts: Vec<ReservationReceipt>,
    buffer: StagedTransitionBuffer,
    c5: bool,
    c6: bool,
    c7: bool,
    final_component: f64,
    outcome: Option<(EdgeOutcome, PlacementRecord)>,
    current: Option<EiState>,
}

/// Edge side: owns the infrastructure ledger and runs the placement stages.
#[derive(Debug)]
pub struct EiEnv {
    infra: EdgeInfrastructure,
    /// Ledger as it stood when the slot began; end-to-end delays are computed
    /// against it so a slot's own holds do not slow its access hops.
    slot_start: EdgeInfrastructure,
    channel: Channel,
    md: MobileDevice,
    pricing: Pricing,
    rewards: RewardConfig,
    scales: StateScales,
    slot: Option<SlotPlacement>,
}

impl EiEnv {
    pub fn new(
        infra: EdgeInfrastructure,
        channel: Channel,
        md: MobileDevice,
        pricing: Pricing,
        rewards: RewardConfig,
        scales: StateScales,
    ) -> Self {
        Self {
            slot_start: infra.clone(),
            infra,
            channel,
            md,
            pricing,
            rewards,
            scales,
            slot: None,
        }
    }

    pub fn infrastructure(&self) -> &EdgeInfrastructure {
        &self.infra
    }

    pub fn state_dim(&self) -> usize {
        self.scales
            .ei_dim(self.infra.station_count(), self.infra.link_count())
    }

    pub fn action_count(&self) -> usize {
        self.infra.station_count()
    }

    fn encode(&self, s: &SlotPlacement) -> EiState {
        let mut placement = vec![-1i32; s.task.chain.len()];
        for (p, &h) in placement.iter_mut().zip(&s.hosts) {
            *p = h as i32;
        }
        EiState {
            stage: s.hosts.len(),
            features: ei_encode(&s.task, s.x, s.access, &placement, &self.infra, &self.scales),
            placement,
        }
    }

    /// Start placing `task` for offloading ratio `x`; returns the stage-1 observation.
    pub fn begin_slot(&mut self, task: &Task, x: f64) -> Result<EiState> {
        if self.slot.is_some() {
            return Err(Error::usage("previous slot still open"));
        }
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::usage(format!("edge placement needs 0 < x <= 1, got {x}")));
        }
        if task.chain.is_empty() {
            return Err(Error::usage("task has an empty chain"));
        }
        let access = self.infra.access_station();
        let rates = access_rates(&self.infra, access, &self.channel, &self.md)?;
        self.slot_start = self.infra.clone();
        let mut s = SlotPlacement {
            task: task.clone(),
            x,
            access,
            rates,
            hosts: Vec::with_capacity(task.chain.len()),
            receipts: Vec::new(),
            buffer: StagedTransitionBuffer::new(task.chain.len()),
            c5: true,
            c6: true,
            c7: true,
            final_component: 0.0,
            outcome: None,
            current: None,
        };
        let obs = self.encode(&s);
        s.current = Some(obs.clone());
        self.slot = Some(s);
        Ok(obs)
    }

    /// Current observation of the open slot.
    pub fn observe(&self) -> Result<EiState> {
        self.slot
            .as_ref()
            .and_then(|s| s.current.clone())
            .ok_or_else(|| Error::usage("no placement stage pending"))
    }

    /// Place the next VNF on `station`. Infeasible choices are penalized, not
    /// rejected; whatever part of the demand fits is still reserved.
    pub fn step(&mut self, station: usize) -> Result<StageOutcome> {
        let n_stations = self.infra.station_count();
        let mut s = self
            .slot
            .take()
            .ok_or_else(|| Error::usage("step called outside a slot"))?;
        let result = self.step_inner(&mut s, station, n_stations);
        self.slot = Some(s);
        result
    }

    fn step_inner(&mut self, s: &mut SlotPlacement, station: usize, n_stations: usize) -> Result<StageOutcome> {
        if station >= n_stations {
            return Err(Error::usage(format!("station {station} out of range")));
        }
        let state = s
            .current
            .take()
            .ok_or_else(|| Error::usage("all stages already placed"))?;
        let k = s.hosts.len();
        let vnf = &s.task.chain.vnfs[k];
        let mut request = ReservationRequest::default();

        let c5 = vnf.compute_demand <= self.infra.stations[station].compute_available;
        if c5 {
            request.compute.push((station, vnf.compute_demand));
        }
        let mut c6 = true;
        if k > 0 {
            let path = self.infra.shortest_path(s.hosts[k - 1], station)?;
            let br = s.task.chain.inter_vnf_bandwidth[k - 1];
            c6 = br <= self.infra.path_min_bandwidth(&path);
            if c6 {
                request.bandwidth.push((path, br));
            }
        }
        if !request.is_empty() {
            s.receipts.push(self.infra.reserve(&request)?);
        }
        s.hosts.push(station);
        s.c5 &= c5;
        s.c6 &= c6;

        let mut penalty = 0.0;
        if !c5 {
            penalty += self.rewards.c5_penalty;
        }
        if !c6 {
            penalty += self.rewards.c6_penalty;
        }
        let mut component = 0.0;
        let last = s.hosts.len() == s.task.chain.len();
        if last {
            let placement = PlacementRecord::route(&self.slot_start, s.access, s.hosts.clone())?;
            let outcome = evaluate_edge(
                &s.task,
                s.x,
                &placement,
                s.rates,
                &self.slot_start,
                &self.md,
                self.pricing,
            );
            s.c7 = outcome.edge_delay <= s.task.deadline;
            if !s.c7 {
                penalty += self.rewards.c7_penalty;
            }
            component = self.rewards.placement_delay_weight * outcome.edge_delay
                + self.rewards.placement_charge_weight * outcome.usage_charge;
            s.final_component = component;
            s.outcome = Some((outcome, placement));
        }
        let reward = -(component + penalty);
        s.buffer.entries.push(StagedTransition {
            state,
            action: station,
            penalty,
            reward,
        });
        let next = if last {
            None
        } else {
            let obs = self.encode(s);
            s.current = Some(obs.clone());
            Some(obs)
        };
        Ok(StageOutcome {
            penalty,
            reward,
            next,
        })
    }

    /// Close the slot: apply the delayed update, release every hold, and report.
    pub fn finish(&mut self) -> Result<EdgeSlotReport> {
        let ready = self
            .slot
            .as_ref()
            .is_some_and(|s| s.buffer.is_complete());
        if !ready {
            return Err(Error::usage("finish called before every VNF was placed"));
        }
        let s = self.slot.take().expect("checked above");
        for r in &s.receipts {
            self.infra.release_slot(r)?;
        }
        let rewards = apply_dur(&s.buffer, s.final_component)?;
        let (outcome, placement) = s.outcome.expect("set at the last stage");
        let mut transitions: Vec<PlacementTransition> = Vec::with_capacity(rewards.len());
        let entries = s.buffer.entries;
        let stage_penalties = entries.iter().map(|e| e.penalty).collect();
        let mut next_states: Vec<Option<EiState>> =
            entries.iter().skip(1).map(|e| Some(e.state.clone())).collect();
        next_states.push(None);
        for ((e, r), next) in entries.into_iter().zip(rewards).zip(next_states) {
            transitions.push(PlacementTransition {
                state: e.state,
                action: e.action,
                reward: r,
                next_state: next,
            });
        }
        let feasibility = FeasibilityFlags {
            c5: s.c5,
            c6: s.c6,
            c7: s.c7,
            ..FeasibilityFlags::all_satisfied()
        };
        Ok(EdgeSlotReport {
            results: EdgeResults {
                edge_delay: outcome.edge_delay,
                edge_energy: outcome.edge_energy,
                usage_charge: outcome.usage_charge,
                feasibility,
            },
            outcome,
            placement,
            final_component: s.final_component,
            stage_penalties,
            transitions,
        })
    }
}

/// Device side: local execution and the MD reward.
#[derive(Debug, Clone)]
pub struct MdEnv {
    pub md: MobileDevice,
    pub cost: CostModel,
    pub rewards: RewardConfig,
    pub scales: StateScales,
}

/// Local-pipeline results for one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalResults {
    pub delay: f64,
    pub energy: f64,
    pub c3: bool,
    pub c4: bool,
}

impl MdEnv {
    pub fn observe(&self, task: &Task) -> MdState {
        md_observe(task, &self.md, &self.scales)
    }

    pub fn state_dim(&self) -> usize {
        self.scales.md_dim()
    }

    /// Local delay and energy. A VNF too large for the device still gets its own
    /// group so the numbers stay defined; C4 is reported false.
    pub fn local(&self, task: &Task, x: f64) -> Result<LocalResults> {
        if x == 1.0 {
            return Ok(LocalResults {
                delay: 0.0,
                energy: 0.0,
                c3: true,
                c4: true,
            });
        }
        let partition = greedy_groups(&task.chain, self.md.compute_capacity);
        let delay = local_delay(task, x, &partition)?;
        Ok(LocalResults {
            delay,
            energy: local_energy(task, x, &self.md)?,
            c3: delay <= task.deadline,
            c4: fits_on_device(&task.chain, &self.md),
        })
    }

    pub fn settle(&self, x: f64, local: LocalResults, edge: &EdgeResults) -> SlotResult {
        let flags = FeasibilityFlags {
            c1: (0.0..=1.0).contains(&x),
            c3: local.c3,
            c4: local.c4,
            ..edge.feasibility
        };
        task_cost(
            local.delay,
            local.energy,
            edge.edge_delay,
            edge.edge_energy,
            edge.usage_charge,
            &self.cost,
        )
        .with_flags(flags)
    }

    pub fn reward(&self, result: &SlotResult) -> f64 {
        md_reward(result, self.rewards.infeasible_penalty)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotOutcome {
    pub x: f64,
    pub result: SlotResult,
    pub md_reward: f64,
    /// Present exactly when `x > 0`.
    pub edge: Option<EdgeSlotReport>,
}

/// Run one slot of the MD/EI protocol. `place` picks a station for each stage from
/// the observation and the live ledger; it is only called when `x > 0`.
pub fn exchange<F>(md_env: &MdEnv, ei: &mut EiEnv, task: &Task, x: f64, mut place: F) -> Result<SlotOutcome>
where
    F: FnMut(&EiState, &EdgeInfrastructure) -> usize,
{
    crate::local_exec::check_ratio(x)?;
    let local = md_env.local(task, x)?;
    let edge = if x > 0.0 {
        let mut obs = ei.begin_slot(task, x)?;
        loop {
            let action = place(&obs, ei.infrastructure());
            match ei.step(action)?.next {
                Some(next) => obs = next,
                None => break,
            }
        }
        Some(ei.finish()?)
    } else {
        None
    };
    let results = edge.as_ref().map(|e| e.results).unwrap_or_default();
    let result = md_env.settle(x, local, &results);
    Ok(SlotOutcome {
        x,
        md_reward: md_env.reward(&result),
        result,
        edge,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::range::ValueRange;
    use crate::topology::{BaseStation, RouteWeight, WiredLink};
    use crate::workload::{ServiceChain, VnfSpec};

    fn scales() -> StateScales {
        StateScales::new(&WorkloadConfig::default(), &TopologyConfig::default())
    }

    fn task(cps: &[f64], br: &[f64]) -> Task {
        Task {
            chain: ServiceChain {
                vnfs: cps
                    .iter()
                    .enumerate()
                    .map(|(i, &cp)| VnfSpec {
                        index_in_chain: i + 1,
                        compute_demand: cp,
                        instantiation_delay: 0.1,
                        output_ratio: 1.0,
                    })
                    .collect(),
                inter_vnf_bandwidth: br.to_vec(),
            },
            input_bits: 9e5,
            cycles_per_bit: 900.0,
            deadline: 30.0,
            slot: 0,
        }
    }

    fn md(cap: f64) -> MobileDevice {
        MobileDevice {
            compute_capacity: cap,
            tx_power: 0.5,
            rx_power: 0.1,
            capacitance_coefficient: 1e-26,
        }
    }

    fn line_infra() -> EdgeInfrastructure {
        let st = |id, cap, dist| BaseStation {
            id,
            compute_capacity_total: cap,
            compute_available: cap,
            tx_power: 1.0,
            distance_to_md: dist,
        };
        let link = |a, b, bw| WiredLink {
            endpoints: (a, b),
            bandwidth_total: bw,
            bandwidth_available: bw,
        };
        EdgeInfrastructure::new(
            vec![st(0, 2.0, 150.0), st(1, 0.4, 300.0), st(2, 3.0, 500.0)],
            vec![link(0, 1, 50.0), link(1, 2, 8.0)],
            RouteWeight::Hops,
        )
        .unwrap()
    }

    fn envs() -> (MdEnv, EiEnv) {
        let m = md(0.6);
        let md_env = MdEnv {
            md: m.clone(),
            cost: CostModel::default(),
            rewards: RewardConfig::default(),
            scales: scales(),
        };
        let ei = EiEnv::new(
            line_infra(),
            Channel::default(),
            m,
            Pricing::default(),
            RewardConfig::default(),
            scales(),
        );
        (md_env, ei)
    }

    #[test]
    fn md_state_padding_and_scaling() {
        let t = task(&[0.2, 0.3, 0.5], &[5.0, 10.0]);
        let s = md_observe(&t, &md(0.6), &scales());
        assert_eq!(s.features.len(), 19);
        // cp slots 1..=5, br slots 6..=9, ratio slots 10..=14
        assert_eq!(&s.features[4..6], &[0.0, 0.0]);
        assert_eq!(&s.features[8..10], &[0.0, 0.0]);
        assert!((s.features[18] - 0.375).abs() < 1e-15);
        assert!(s.features.iter().all(|v| (0.0..=1.0).contains(v)));
        assert_eq!(s, md_observe(&t, &md(0.6), &scales()));
    }

    #[test]
    fn md_reward_branches() {
        let mut r = task_cost(1.0, 0.5, 1.0, 0.5, 2.5, &CostModel::default());
        assert!((md_reward(&r, 100.0) + 1.5).abs() < 1e-12);
        r.feasibility.c6 = false;
        assert_eq!(md_reward(&r, 100.0), -100.0);
        let z = task_cost(0.0, 0.0, 0.0, 0.0, 0.0, &CostModel::default());
        assert_eq!(md_reward(&z, 100.0), 0.0);
    }

    #[test]
    fn dur_traces() {
        let mk = |pens: &[f64], last: f64| {
            let mut b = StagedTransitionBuffer::new(pens.len());
            for (i, &p) in pens.iter().enumerate() {
                let comp = if i + 1 == pens.len() { last } else { 0.0 };
                b.entries.push(StagedTransition {
                    state: EiState {
                        stage: i,
                        placement: vec![],
                        features: vec![],
                    },
                    action: 0,
                    penalty: p,
                    reward: -(p + comp),
                });
            }
            b
        };
        assert_eq!(apply_dur(&mk(&[0.0, 0.0, 0.0], 5.0), 5.0).unwrap(), vec![-5.0, -5.0, -5.0]);
        assert_eq!(apply_dur(&mk(&[0.0, 10.0, 0.0], 5.0), 5.0).unwrap(), vec![-5.0, -15.0, -5.0]);
        assert_eq!(apply_dur(&mk(&[1.0, 2.0], 0.0), 0.0).unwrap(), vec![-1.0, -2.0]);
        let mut partial = mk(&[0.0, 0.0, 0.0], 5.0);
        partial.entries.pop();
        assert!(matches!(apply_dur(&partial, 5.0), Err(Error::Usage(_))));
    }

    #[test]
    fn final_stage_reward_scalar() {
        let r: f64 = -(0.5 * 2.12 + 0.5 * 0.477);
        assert!((r + 1.2985).abs() < 1e-12);
    }

    #[test]
    fn stages_see_earlier_reservations() {
        let (_, mut ei) = envs();
        let t = task(&[0.3, 0.3, 0.3], &[5.0, 5.0]);
        let s0 = ei.begin_slot(&t, 0.5).unwrap();
        assert_eq!(s0.placement, vec![-1, -1, -1]);
        assert_eq!(ei.state_dim(), s0.features.len());
        let out = ei.step(0).unwrap();
        assert_eq!(out.reward, 0.0);
        let s1 = out.next.unwrap();
        assert_eq!(s1.placement, vec![0, -1, -1]);
        assert!((ei.infrastructure().stations[0].compute_available - 1.7).abs() < 1e-12);
        // station 0 availability feature reflects the hold
        let before = &s0.features;
        assert_ne!(before, &s1.features);
    }

    #[test]
    fn c5_penalty_and_release() {
        let (_, mut ei) = envs();
        let initial = ei.infrastructure().clone();
        let t = task(&[0.5, 0.3], &[5.0]);
        ei.begin_slot(&t, 1.0).unwrap();
        let out = ei.step(1).unwrap(); // 0.5 > 0.4 available
        assert_eq!(out.penalty, 100.0);
        assert_eq!(out.reward, -100.0);
        let out = ei.step(2).unwrap(); // path 1->2 has 8 Mbps, needs 5
        assert!(out.next.is_none());
        let rep = ei.finish().unwrap();
        assert!(!rep.results.feasibility.c5);
        assert!(rep.results.feasibility.c6);
        assert_eq!(rep.transitions.len(), 2);
        assert_eq!(rep.transitions[0].reward, -100.0 - rep.final_component);
        assert_eq!(ei.infrastructure(), &initial);
    }

    #[test]
    fn c6_penalty_on_thin_path() {
        let (_, mut ei) = envs();
        let t = task(&[0.1, 0.1], &[9.0]);
        ei.begin_slot(&t, 1.0).unwrap();
        ei.step(0).unwrap();
        let out = ei.step(2).unwrap(); // 0->1->2 bottleneck 8 < 9
        assert!(out.penalty >= 100.0);
        assert!(!ei.finish().unwrap().results.feasibility.c6);
    }

    #[test]
    fn zero_ratio_skips_edge() {
        let (md_env, mut ei) = envs();
        let t = task(&[0.3, 0.3], &[5.0]);
        assert!(ei.begin_slot(&t, 0.0).is_err());
        let mut called = false;
        let out = exchange(&md_env, &mut ei, &t, 0.0, |_, _| {
            called = true;
            0
        })
        .unwrap();
        assert!(!called);
        assert!(out.edge.is_none());
        assert_eq!(out.result.edge_delay, 0.0);
        assert_eq!(out.result.edge_energy, 0.0);
        assert_eq!(out.result.usage_charge, 0.0);
    }

    #[test]
    fn full_offload_zeroes_local() {
        let (md_env, mut ei) = envs();
        let t = task(&[0.3, 0.3], &[5.0]);
        let out = exchange(&md_env, &mut ei, &t, 1.0, |_, _| 0).unwrap();
        assert_eq!(out.result.local_delay, 0.0);
        assert_eq!(out.result.local_energy, 0.0);
        let e = out.edge.unwrap();
        assert_eq!(e.transitions.len(), 2);
        assert_eq!(e.placement.hosts, vec![0, 0]);
        assert!(out.result.feasibility.all());
        assert!((out.md_reward + out.result.cost).abs() < 1e-15);
    }

    #[test]
    fn oversize_vnf_flags_c4() {
        let (md_env, _) = envs();
        let t = task(&[0.7, 0.3], &[5.0]);
        let l = md_env.local(&t, 0.0).unwrap();
        assert!(!l.c4);
        assert!(l.delay > 0.0);
    }

    #[test]
    fn scales_follow_config() {
        let mut w = WorkloadConfig::default();
        w.vnf_compute_ghz = ValueRange::new(0.1, 1.0);
        let s = StateScales::new(&w, &TopologyConfig::default());
        assert_eq!(s.vnf_compute_ghz, 1.0);
    }
}
