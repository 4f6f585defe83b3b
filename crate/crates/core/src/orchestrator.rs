//! Experiment driver: the cooperative training loop, the baseline schemes and
//! frozen-policy evaluation.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use log::{debug, info};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agents::{ContinuousMode, DdqnAgent, DdqnConfig, DiscreteMode, Td3Agent, Td3Config, Transition};
use crate::cost::{CostModel, CostWeights, FeasibilityFlags, Normalization};
use crate::edge_exec::Pricing;
use crate::env::{exchange, EiEnv, EiState, MdEnv, PlacementTransition, RewardConfig, SlotOutcome, StateScales};
use crate::error::{Error, Result};
use crate::local_exec::MobileDevice;
use crate::topology::{build_infrastructure, EdgeInfrastructure, TopologyConfig};
use crate::workload::{generate_task, Channel, Task, WorkloadConfig, BPS_PER_MBPS};
use crate::{stream_rng, SimRng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Cdadrl,
    Td3Ddqn,
    DdpgDuel,
    DdpgDdqn,
    Local,
    Edge,
    Binary,
    Random,
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::Cdadrl,
        Scheme::Td3Ddqn,
        Scheme::DdpgDuel,
        Scheme::DdpgDdqn,
        Scheme::Local,
        Scheme::Edge,
        Scheme::Binary,
        Scheme::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Cdadrl => "cdadrl",
            Scheme::Td3Ddqn => "td3-ddqn",
            Scheme::DdpgDuel => "ddpg-duel",
            Scheme::DdpgDdqn => "ddpg-ddqn",
            Scheme::Local => "local",
            Scheme::Edge => "edge",
            Scheme::Binary => "binary",
            Scheme::Random => "random",
        }
    }

    /// Ratio agent, if the scheme learns one.
    pub fn continuous_mode(self) -> Option<ContinuousMode> {
        match self {
            Scheme::Cdadrl | Scheme::Td3Ddqn => Some(ContinuousMode::Td3),
            Scheme::DdpgDuel | Scheme::DdpgDdqn => Some(ContinuousMode::Ddpg),
            _ => None,
        }
    }

    /// Placement agent, if the scheme learns one.
    pub fn discrete_mode(self) -> Option<DiscreteMode> {
        match self {
            Scheme::Cdadrl | Scheme::DdpgDuel => Some(DiscreteMode::DUELING_DOUBLE),
            Scheme::Td3Ddqn | Scheme::DdpgDdqn => Some(DiscreteMode::DOUBLE),
            Scheme::Edge => Some(DiscreteMode::PLAIN),
            _ => None,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Scheme::ALL.iter().map(|k| k.name()).collect();
                Error::usage(format!("unknown scheme {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// Cost weights, prices, penalties and placement-reward weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostConfig {
    pub delay_weight: f64,
    pub energy_weight: f64,
    pub charge_weight: f64,
    pub price_alpha: f64,
    pub price_beta: f64,
    pub infeasible_penalty: f64,
    pub c5_penalty: f64,
    pub c6_penalty: f64,
    pub c7_penalty: f64,
    pub placement_delay_weight: f64,
    pub placement_charge_weight: f64,
    pub normalization: Option<Normalization>,
}

impl Default for CostConfig {
    fn default() -> Self {
        let w = CostWeights::default();
        let p = Pricing::default();
        let r = RewardConfig::default();
        Self {
            delay_weight: w.delay,
            energy_weight: w.energy,
            charge_weight: w.charge,
            price_alpha: p.alpha,
            price_beta: p.beta,
            infeasible_penalty: r.infeasible_penalty,
            c5_penalty: r.c5_penalty,
            c6_penalty: r.c6_penalty,
            c7_penalty: r.c7_penalty,
            placement_delay_weight: r.placement_delay_weight,
            placement_charge_weight: r.placement_charge_weight,
            normalization: None,
        }
    }
}

impl CostConfig {
    pub fn model(&self) -> CostModel {
        CostModel {
            weights: CostWeights {
                delay: self.delay_weight,
                energy: self.energy_weight,
                charge: self.charge_weight,
            },
            normalization: self.normalization,
        }
    }

    pub fn pricing(&self) -> Pricing {
        Pricing {
            alpha: self.price_alpha,
            beta: self.price_beta,
        }
    }

    pub fn rewards(&self) -> RewardConfig {
        RewardConfig {
            infeasible_penalty: self.infeasible_penalty,
            c5_penalty: self.c5_penalty,
            c6_penalty: self.c6_penalty,
            c7_penalty: self.c7_penalty,
            placement_delay_weight: self.placement_delay_weight,
            placement_charge_weight: self.placement_charge_weight,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model().weights.validate()?;
        self.rewards().validate()?;
        if !self.price_alpha.is_finite() || !(self.price_beta >= 0.0) {
            return Err(Error::config("cost.price_alpha must be finite and price_beta non-negative"));
        }
        if let Some(n) = &self.normalization {
            n.delay.validate("cost.normalization.delay")?;
            n.energy.validate("cost.normalization.energy")?;
            n.charge.validate("cost.normalization.charge")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Scheme for single-cell commands.
    pub scheme: Scheme,
    /// Schemes crossed by a sweep.
    pub schemes: Vec<Scheme>,
    pub episodes: usize,
    /// Slots per episode.
    pub slots: usize,
    /// Seed for single-cell commands.
    pub seed: u64,
    /// Seeds crossed by a sweep.
    pub seeds: Vec<u64>,
    /// Device capacities (GHz) crossed by a sweep.
    pub cp_md: Vec<f64>,
    /// Frozen-policy episodes run after training.
    pub eval_episodes: usize,
    /// Save agent checkpoints every this many episodes; 0 disables.
    pub checkpoint_interval: usize,
    /// When false the agents are neither updated nor exploring.
    pub learning: bool,
    /// Every training episode replays the same task sequence.
    pub repeat_workload: bool,
    /// Parallel cells in a sweep.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Cdadrl,
            schemes: vec![Scheme::Cdadrl, Scheme::Local, Scheme::Edge, Scheme::Binary, Scheme::Random],
            episodes: 3000,
            slots: 20,
            seed: 0,
            seeds: vec![0],
            cp_md: vec![0.6, 0.8, 1.0, 1.2, 1.4, 1.6],
            eval_episodes: 10,
            checkpoint_interval: 0,
            learning: true,
            repeat_workload: false,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub topology: TopologyConfig,
    pub workload: WorkloadConfig,
    pub channel: Channel,
    pub cost: CostConfig,
    pub td3: Td3Config,
    pub ddqn: DdqnConfig,
    pub run: RunConfig,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.topology.validate()?;
        self.workload.validate()?;
        self.channel.validate()?;
        self.cost.validate()?;
        self.td3.validate()?;
        self.ddqn.validate()?;
        let r = &self.run;
        if r.episodes == 0 || r.slots == 0 {
            return Err(Error::config("run.episodes and run.slots must be at least 1"));
        }
        if r.workers == 0 {
            return Err(Error::config("run.workers must be at least 1"));
        }
        for &cp in &r.cp_md {
            self.check_cp_md(cp)?;
        }
        Ok(())
    }

    fn check_cp_md(&self, cp: f64) -> Result<()> {
        if !(cp > 0.0) || cp > self.workload.md_compute_max_ghz {
            return Err(Error::config(format!(
                "device capacity {cp} GHz outside (0, {}]",
                self.workload.md_compute_max_ghz
            )));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }
}

/// One `(scheme, device capacity, seed)` combination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub scheme: Scheme,
    pub cp_md: f64,
    pub seed: u64,
}

impl Cell {
    pub fn run_id(&self) -> String {
        format!("{}-cp{}-s{}", self.scheme, self.cp_md, self.seed)
    }
}

/// Static pieces of one cell: the infrastructure and both environments' parameters.
#[derive(Debug, Clone)]
pub struct Setup {
    pub infra: EdgeInfrastructure,
    pub md_env: MdEnv,
    pub channel: Channel,
    pub pricing: Pricing,
    pub workload: WorkloadConfig,
    pub slots: usize,
}

impl Setup {
    pub fn new(cfg: &ExperimentConfig, cp_md: f64, seed: u64) -> Result<Self> {
        cfg.validate()?;
        cfg.check_cp_md(cp_md)?;
        let mut topo_rng = stream_rng(seed, Stream::Topology);
        let infra = build_infrastructure(&cfg.topology, &mut topo_rng)?;
        let md = MobileDevice {
            compute_capacity: cp_md,
            tx_power: cfg.channel.md_tx_power,
            rx_power: cfg.channel.md_rx_power,
            capacitance_coefficient: cfg.workload.capacitance,
        };
        Ok(Self {
            infra,
            md_env: MdEnv {
                md,
                cost: cfg.cost.model(),
                rewards: cfg.cost.rewards(),
                scales: StateScales::new(&cfg.workload, &cfg.topology),
            },
            channel: cfg.channel.clone(),
            pricing: cfg.cost.pricing(),
            workload: cfg.workload.clone(),
            slots: cfg.run.slots,
        })
    }

    pub fn ei_env(&self) -> EiEnv {
        EiEnv::new(
            self.infra.clone(),
            self.channel.clone(),
            self.md_env.md.clone(),
            self.pricing,
            self.md_env.rewards,
            self.md_env.scales,
        )
    }

    /// Task sequence of one episode. Depends only on `(seed, stream, episode)`.
    pub fn episode_tasks(&self, seed: u64, stream: Stream, episode: usize) -> Vec<Task> {
        let mut rng = episode_rng(seed, stream, episode);
        (0..self.slots)
            .map(|t| generate_task(&self.workload, t, &mut rng))
            .collect()
    }
}

fn episode_rng(seed: u64, stream: Stream, episode: usize) -> SimRng {
    use rand::SeedableRng;
    let mut rng = SimRng::seed_from_u64(seed ^ (episode as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(stream as u64 + 1);
    rng
}

/// The learning agents of a cell (either may be absent for baselines).
#[derive(Debug, Clone, Default)]
pub struct Agents {
    pub ratio: Option<Td3Agent>,
    pub placement: Option<DdqnAgent>,
}

impl Agents {
    pub fn new(scheme: Scheme, cfg: &ExperimentConfig, setup: &Setup, seed: u64) -> Self {
        let mut rng = stream_rng(seed, Stream::Agent);
        let ratio = scheme
            .continuous_mode()
            .map(|m| Td3Agent::new(setup.md_env.state_dim(), cfg.td3, m, &mut rng));
        let ei = setup.ei_env();
        let placement = scheme
            .discrete_mode()
            .map(|m| DdqnAgent::new(ei.state_dim(), ei.action_count(), cfg.ddqn, m, &mut rng));
        Self { ratio, placement }
    }

    pub fn fingerprint(&self) -> u64 {
        let a = self.ratio.as_ref().map_or(0, |r| r.fingerprint());
        let b = self.placement.as_ref().map_or(0, |p| p.fingerprint());
        a ^ b.rotate_left(31)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotLog {
    pub slot: usize,
    pub x: f64,
    pub hosts: Vec<usize>,
    pub local_delay: f64,
    pub edge_delay: f64,
    pub execution_delay: f64,
    pub md_energy: f64,
    pub usage_charge: f64,
    pub cost: f64,
    pub md_reward: f64,
    /// Finalized placement rewards, one per stage (empty when `x = 0`).
    pub stage_rewards: Vec<f64>,
    pub feasibility: FeasibilityFlags,
}

impl SlotLog {
    fn from_outcome(slot: usize, o: &SlotOutcome) -> Self {
        let r = &o.result;
        Self {
            slot,
            x: o.x,
            hosts: o.edge.as_ref().map(|e| e.placement.hosts.clone()).unwrap_or_default(),
            local_delay: r.local_delay,
            edge_delay: r.edge_delay,
            execution_delay: r.execution_delay,
            md_energy: r.md_energy,
            usage_charge: r.usage_charge,
            cost: r.cost,
            md_reward: o.md_reward,
            stage_rewards: o
                .edge
                .as_ref()
                .map(|e| e.transitions.iter().map(|t| t.reward).collect())
                .unwrap_or_default(),
            feasibility: r.feasibility,
        }
    }
}

/// Mean losses of the update calls made during an episode.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct UpdateStats {
    pub critic_updates: usize,
    pub critic_loss: f64,
    pub actor_updates: usize,
    pub actor_loss: f64,
    pub placement_updates: usize,
    pub placement_loss: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeLog {
    pub episode: usize,
    pub slots: Vec<SlotLog>,
    pub stats: UpdateStats,
}

impl EpisodeLog {
    /// Sum of the MD rewards.
    pub fn cumulative_reward(&self) -> f64 {
        self.slots.iter().map(|s| s.md_reward).sum()
    }

    pub fn mean_cost(&self) -> f64 {
        self.slots.iter().map(|s| s.cost).sum::<f64>() / self.slots.len().max(1) as f64
    }

    pub fn infeasible_slots(&self) -> usize {
        self.slots.iter().filter(|s| !s.feasibility.all()).count()
    }
}

/// Everything one cell produced.
#[derive(Debug, Clone)]
pub struct RunLog {
    pub cell: Cell,
    pub training: Vec<EpisodeLog>,
    pub evaluation: Vec<EpisodeLog>,
    pub md_transitions: usize,
    pub ei_transitions: usize,
}

impl RunLog {
    pub fn run_id(&self) -> String {
        self.cell.run_id()
    }
}

/// Stage-by-stage station choice of the Binary baseline: among stations that can
/// host the VNF and carry its inbound flow, the one adding the least processing
/// plus wired transmission delay; lowest id on ties. Falls back to all stations
/// when none is feasible.
pub fn greedy_station(task: &Task, x: f64, state: &EiState, infra: &EdgeInfrastructure) -> usize {
    let k = state.stage;
    let chain = &task.chain;
    let vnf = &chain.vnfs[k];
    let access = infra.access_station();
    let prev = if k == 0 { access } else { state.placement[k - 1] as usize };
    let sent = x * task.input_bits;
    let inbound = chain.input_ratio(k) * sent;
    let processing = inbound * task.cycles_per_bit / vnf.compute_hz();
    let wired = |from: usize, to: usize, bits: f64| -> Option<f64> {
        let path = infra.shortest_path(from, to).ok()?;
        Some(
            path.links
                .iter()
                .map(|&l| bits / (infra.links[l].bandwidth_available * BPS_PER_MBPS))
                .sum(),
        )
    };
    let last = k + 1 == chain.len();
    let mut best: Option<(bool, f64, usize)> = None;
    for v in 0..infra.station_count() {
        let Some(mut delay) = wired(prev, v, inbound) else {
            continue;
        };
        delay += processing;
        if last {
            delay += wired(v, access, chain.last_output_ratio() * sent).unwrap_or(f64::INFINITY);
        }
        let mut feasible = vnf.compute_demand <= infra.stations[v].compute_available;
        if k > 0 {
            let bw = infra
                .shortest_path(prev, v)
                .map(|p| infra.path_min_bandwidth(&p))
                .unwrap_or(0.0);
            feasible &= chain.inter_vnf_bandwidth[k - 1] <= bw;
        }
        let better = match best {
            None => true,
            Some((bf, bd, _)) => (feasible && !bf) || (feasible == bf && delay < bd),
        };
        if better {
            best = Some((feasible, delay, v));
        }
    }
    best.map_or(0, |b| b.2)
}

/// How actions are chosen during an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Train { explore: bool, learn: bool },
    Evaluate,
}

struct Runner<'a> {
    scheme: Scheme,
    setup: &'a Setup,
    ei: EiEnv,
    rng: SimRng,
}

impl Runner<'_> {
    fn choose_ratio(&mut self, agents: &Agents, state: &[f64], explore: bool) -> Result<f64> {
        Ok(match self.scheme {
            Scheme::Local => 0.0,
            Scheme::Edge => 1.0,
            Scheme::Binary => {
                if self.rng.random_bool(0.5) {
                    0.0
                } else {
                    1.0
                }
            }
            Scheme::Random => self.rng.random::<f64>(),
            _ => {
                let agent = agents.ratio.as_ref().expect("learning schemes carry a ratio agent");
                agent.select_action(state, explore, &mut self.rng)?
            }
        })
    }

    /// One episode. Agents are mutated only when `phase` is training.
    fn episode(&mut self, agents: &mut Agents, tasks: &[Task], episode: usize, phase: Phase) -> Result<(EpisodeLog, usize, usize)> {
        let (explore, learn) = match phase {
            Phase::Train { explore, learn } => (explore, learn),
            Phase::Evaluate => (false, false),
        };
        let md_env = &self.setup.md_env;
        let states: Vec<Vec<f64>> = tasks.iter().map(|t| md_env.observe(t).features).collect();
        let mut slots = Vec::with_capacity(tasks.len());
        let mut stats = UpdateStats::default();
        let mut pending: Option<PlacementTransition> = None;
        let (mut md_count, mut ei_count) = (0, 0);

        for (t, task) in tasks.iter().enumerate() {
            let x = self.choose_ratio(agents, &states[t], explore)?;
            let scheme = self.scheme;
            let rng = &mut self.rng;
            let placement_agent = &mut agents.placement;
            let mut failure = None;
            let outcome = exchange(md_env, &mut self.ei, task, x, |obs, infra| match scheme {
                Scheme::Binary => greedy_station(task, x, obs, infra),
                Scheme::Random => rng.random_range(0..infra.station_count()),
                _ => {
                    let agent = placement_agent.as_mut().expect("scheme carries a placement agent");
                    let picked = if explore {
                        agent.select_action(&obs.features, true, rng)
                    } else {
                        agent.greedy(&obs.features)
                    };
                    picked.unwrap_or_else(|e| {
                        failure = Some(e);
                        0
                    })
                }
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            let log = SlotLog::from_outcome(t, &outcome);

            if let (Phase::Train { .. }, Some(agent)) = (phase, agents.ratio.as_mut()) {
                let terminal = t + 1 == tasks.len();
                agent.buffer.push(Transition {
                    state: states[t].clone(),
                    action: x,
                    reward: outcome.md_reward,
                    next_state: if terminal { states[t].clone() } else { states[t + 1].clone() },
                    terminal,
                });
                md_count += 1;
                if learn {
                    let d = agent.td3_update(&mut self.rng)?;
                    if !d.skipped {
                        stats.critic_updates += 1;
                        stats.critic_loss += d.critic1_loss;
                        if let Some(a) = d.actor_loss {
                            stats.actor_updates += 1;
                            stats.actor_loss += a;
                        }
                    }
                }
            }
            if let (Phase::Train { .. }, Some(agent), Some(edge)) =
                (phase, agents.placement.as_mut(), outcome.edge)
            {
                let stages = edge.transitions.len();
                let mut finalized = edge.transitions.into_iter();
                let first = finalized.next().expect("a chain has at least one VNF");
                if let Some(p) = pending.take() {
                    agent.buffer.push(Transition {
                        state: p.state.features,
                        action: p.action,
                        reward: p.reward,
                        next_state: first.state.features.clone(),
                        terminal: false,
                    });
                    ei_count += 1;
                }
                for tr in std::iter::once(first).chain(finalized) {
                    match tr.next_state {
                        Some(next) => {
                            agent.buffer.push(Transition {
                                state: tr.state.features,
                                action: tr.action,
                                reward: tr.reward,
                                next_state: next.features,
                                terminal: false,
                            });
                            ei_count += 1;
                        }
                        None => {
                            pending = Some(PlacementTransition {
                                next_state: None,
                                ..tr
                            });
                        }
                    }
                }
                if learn {
                    for _ in 0..stages {
                        let d = agent.ddqn_update(&mut self.rng)?;
                        if !d.skipped {
                            stats.placement_updates += 1;
                            stats.placement_loss += d.loss;
                        }
                    }
                }
            }
            slots.push(log);
        }
        if let (Some(p), Some(agent)) = (pending, agents.placement.as_mut()) {
            let features = p.state.features;
            agent.buffer.push(Transition {
                next_state: features.clone(),
                state: features,
                action: p.action,
                reward: p.reward,
                terminal: true,
            });
            ei_count += 1;
        }
        if stats.critic_updates > 0 {
            stats.critic_loss /= stats.critic_updates as f64;
        }
        if stats.actor_updates > 0 {
            stats.actor_loss /= stats.actor_updates as f64;
        }
        if stats.placement_updates > 0 {
            stats.placement_loss /= stats.placement_updates as f64;
        }
        stats.epsilon = agents.placement.as_ref().map_or(0.0, |a| a.epsilon());
        Ok((
            EpisodeLog {
                episode,
                slots,
                stats,
            },
            md_count,
            ei_count,
        ))
    }
}

/// Train (or, for baselines, just run) one cell, then evaluate the frozen policy.
pub fn run_cell(cfg: &ExperimentConfig, cell: Cell, checkpoint_dir: Option<&Path>) -> Result<(RunLog, Agents)> {
    let setup = Setup::new(cfg, cell.cp_md, cell.seed)?;
    let mut agents = Agents::new(cell.scheme, cfg, &setup, cell.seed);
    let mut runner = Runner {
        scheme: cell.scheme,
        ei: setup.ei_env(),
        setup: &setup,
        rng: stream_rng(cell.seed, Stream::Policy),
    };
    let learning = cfg.run.learning;
    let phase = Phase::Train {
        explore: learning,
        learn: learning,
    };
    let mut log = RunLog {
        cell,
        training: Vec::with_capacity(cfg.run.episodes),
        evaluation: Vec::new(),
        md_transitions: 0,
        ei_transitions: 0,
    };
    info!("{}: training {} episodes", cell.run_id(), cfg.run.episodes);
    for e in 0..cfg.run.episodes {
        let tasks = setup.episode_tasks(cell.seed, Stream::Workload, if cfg.run.repeat_workload { 0 } else { e });
        let (ep, md, ei) = runner.episode(&mut agents, &tasks, e, phase)?;
        debug!(
            "{} episode {e}: reward {:.4}, infeasible {}",
            cell.run_id(),
            ep.cumulative_reward(),
            ep.infeasible_slots()
        );
        log.md_transitions += md;
        log.ei_transitions += ei;
        log.training.push(ep);
        let interval = cfg.run.checkpoint_interval;
        if let Some(dir) = checkpoint_dir {
            if interval > 0 && (e + 1) % interval == 0 {
                save_checkpoints(&agents, dir, &format!("{}-ep{}", cell.run_id(), e + 1))?;
            }
        }
    }
    log.evaluation = evaluate_policy(&agents, &setup, cell, cfg.run.eval_episodes)?;
    Ok((log, agents))
}

/// Frozen, noiseless rollouts on the evaluation task stream. Agents are read only.
pub fn evaluate_policy(agents: &Agents, setup: &Setup, cell: Cell, episodes: usize) -> Result<Vec<EpisodeLog>> {
    let mut frozen = agents.clone();
    let mut runner = Runner {
        scheme: cell.scheme,
        ei: setup.ei_env(),
        setup,
        rng: stream_rng(cell.seed, Stream::Evaluation),
    };
    (0..episodes)
        .map(|e| {
            let tasks = setup.episode_tasks(cell.seed, Stream::Evaluation, e);
            runner
                .episode(&mut frozen, &tasks, e, Phase::Evaluate)
                .map(|r| r.0)
        })
        .collect()
}

pub fn save_checkpoints(agents: &Agents, dir: &Path, stem: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    if let Some(a) = &agents.ratio {
        a.checkpoint().save(&dir.join(format!("{stem}-ratio.ckpt")))?;
    }
    if let Some(a) = &agents.placement {
        a.checkpoint().save(&dir.join(format!("{stem}-placement.ckpt")))?;
    }
    Ok(())
}

/// Load checkpoints written by [`save_checkpoints`] into freshly built agents.
pub fn load_checkpoints(agents: &mut Agents, dir: &Path, stem: &str) -> Result<()> {
    if let Some(a) = &mut agents.ratio {
        a.restore(&crate::neural::Checkpoint::load(&dir.join(format!("{stem}-ratio.ckpt")))?)?;
    }
    if let Some(a) = &mut agents.placement {
        a.restore(&crate::neural::Checkpoint::load(&dir.join(format!("{stem}-placement.ckpt")))?)?;
    }
    Ok(())
}
