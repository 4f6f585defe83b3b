use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{stack, ReplayBuffer, Transition};
use crate::error::{Error, Result};
use crate::neural::{backward_and_step, AdamState, Architecture, Checkpoint, DenseNet, Head, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContinuousMode {
    /// Twin critics, target smoothing, delayed actor updates.
    Td3,
    /// One critic, no smoothing, actor updated every call.
    Ddpg,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Td3Config {
    pub tau: f64,
    pub policy_delay: u64,
    /// Std-dev of the Gaussian exploration noise.
    pub exploration_noise: f64,
    /// Std-dev of the target-policy smoothing noise.
    pub target_noise: f64,
    pub noise_clip: f64,
    pub gamma: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub hidden_layers: usize,
    pub hidden_units: usize,
}

impl Default for Td3Config {
    fn default() -> Self {
        Self {
            tau: 0.005,
            policy_delay: 2,
            exploration_noise: 0.1,
            target_noise: 0.2,
            noise_clip: 0.5,
            gamma: 0.99,
            learning_rate: 1e-3,
            batch_size: 128,
            buffer_capacity: 2000,
            hidden_layers: 4,
            hidden_units: 64,
        }
    }
}

impl Td3Config {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::config(format!("td3: {what}")));
        if !(0.0..=1.0).contains(&self.tau) {
            return bad("tau must lie in [0, 1]");
        }
        if self.policy_delay == 0 {
            return bad("policy_delay must be at least 1");
        }
        if self.exploration_noise < 0.0 || self.target_noise < 0.0 || self.noise_clip < 0.0 {
            return bad("noise parameters must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1]");
        }
        if self.learning_rate <= 0.0 {
            return bad("learning_rate must be positive");
        }
        if self.batch_size == 0 || self.buffer_capacity < self.batch_size {
            return bad("need 0 < batch_size <= buffer_capacity");
        }
        if self.hidden_units == 0 {
            return bad("hidden_units must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Td3Diagnostics {
    /// Buffer held fewer than `batch_size` transitions; nothing changed.
    pub skipped: bool,
    pub critic1_loss: f64,
    pub critic2_loss: Option<f64>,
    /// Set on calls that also stepped the actor and the targets.
    pub actor_loss: Option<f64>,
}

/// Per-element pieces of the critic target.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetBreakdown {
    pub y: Vec<f64>,
    pub q1: Vec<f64>,
    /// Absent in DDPG mode.
    pub q2: Option<Vec<f64>>,
    /// Smoothed target action fed to the target critics.
    pub actions: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Td3Agent {
    pub config: Td3Config,
    pub mode: ContinuousMode,
    state_dim: usize,
    actor: DenseNet,
    actor_target: DenseNet,
    critic1: DenseNet,
    critic1_target: DenseNet,
    critic2: Option<(DenseNet, DenseNet, AdamState)>,
    actor_opt: AdamState,
    critic1_opt: AdamState,
    updates: u64,
    pub buffer: ReplayBuffer<f64>,
}

fn with_actions(states: &Matrix, actions: &[f64]) -> Matrix {
    let cols = states.cols + 1;
    let mut data = Vec::with_capacity(states.rows * cols);
    for (r, a) in actions.iter().enumerate() {
        data.extend_from_slice(states.row(r));
        data.push(*a);
    }
    Matrix {
        rows: states.rows,
        cols,
        data,
    }
}

impl Td3Agent {
    pub fn new<R: Rng + ?Sized>(state_dim: usize, config: Td3Config, mode: ContinuousMode, rng: &mut R) -> Self {
        let actor_arch = Architecture::mlp(
            state_dim,
            config.hidden_layers,
            config.hidden_units,
            Head::Sigmoid { outputs: 1 },
        );
        let critic_arch = Architecture::mlp(
            state_dim + 1,
            config.hidden_layers,
            config.hidden_units,
            Head::Linear { outputs: 1 },
        );
        let actor = DenseNet::new(actor_arch, rng);
        let critic1 = DenseNet::new(critic_arch.clone(), rng);
        let critic2 = match mode {
            ContinuousMode::Td3 => {
                let c = DenseNet::new(critic_arch, rng);
                let opt = AdamState::for_net(&c, config.learning_rate);
                Some((c.clone(), c, opt))
            }
            ContinuousMode::Ddpg => None,
        };
        Self {
            actor_opt: AdamState::for_net(&actor, config.learning_rate),
            critic1_opt: AdamState::for_net(&critic1, config.learning_rate),
            actor_target: actor.clone(),
            critic1_target: critic1.clone(),
            actor,
            critic1,
            critic2,
            updates: 0,
            buffer: ReplayBuffer::new(config.buffer_capacity),
            state_dim,
            config,
            mode,
        }
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn update_count(&self) -> u64 {
        self.updates
    }

    fn policy_delay(&self) -> u64 {
        match self.mode {
            ContinuousMode::Td3 => self.config.policy_delay,
            ContinuousMode::Ddpg => 1,
        }
    }

    pub fn actor(&self) -> &DenseNet {
        &self.actor
    }

    pub fn actor_target(&self) -> &DenseNet {
        &self.actor_target
    }

    pub fn critic1(&self) -> &DenseNet {
        &self.critic1
    }

    pub fn critic1_target(&self) -> &DenseNet {
        &self.critic1_target
    }

    pub fn critic2(&self) -> Option<&DenseNet> {
        self.critic2.as_ref().map(|c| &c.0)
    }

    pub fn critic2_target(&self) -> Option<&DenseNet> {
        self.critic2.as_ref().map(|c| &c.1)
    }

    pub fn actor_mut(&mut self) -> &mut DenseNet {
        &mut self.actor
    }

    pub fn actor_target_mut(&mut self) -> &mut DenseNet {
        &mut self.actor_target
    }

    pub fn critic1_target_mut(&mut self) -> &mut DenseNet {
        &mut self.critic1_target
    }

    pub fn critic2_target_mut(&mut self) -> Option<&mut DenseNet> {
        self.critic2.as_mut().map(|c| &mut c.1)
    }

    /// Combined fingerprint of every network.
    pub fn fingerprint(&self) -> u64 {
        let mut h = self.actor.fingerprint() ^ self.actor_target.fingerprint().rotate_left(7);
        h ^= self.critic1.fingerprint().rotate_left(13) ^ self.critic1_target.fingerprint().rotate_left(19);
        if let Some((c, t, _)) = &self.critic2 {
            h ^= c.fingerprint().rotate_left(29) ^ t.fingerprint().rotate_left(37);
        }
        h
    }

    /// Noiseless policy output clipped to `[0, 1]`.
    pub fn act(&self, state: &[f64]) -> Result<f64> {
        Ok(self.actor.forward(state)?[0].clamp(0.0, 1.0))
    }

    /// `clip(pi(s) + noise, 0, 1)`.
    pub fn act_with_noise(&self, state: &[f64], noise: f64) -> Result<f64> {
        Ok((self.actor.forward(state)?[0] + noise).clamp(0.0, 1.0))
    }

    pub fn select_action<R: Rng + ?Sized>(&self, state: &[f64], explore: bool, rng: &mut R) -> Result<f64> {
        if !explore || self.config.exploration_noise == 0.0 {
            return self.act(state);
        }
        let noise = Normal::new(0.0, self.config.exploration_noise)
            .map_err(|e| Error::config(e.to_string()))?
            .sample(rng);
        self.act_with_noise(state, noise)
    }

    /// Draw target-smoothing noise for a batch (zeros in DDPG mode).
    pub fn smoothing_noise<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        if self.mode == ContinuousMode::Ddpg || self.config.target_noise == 0.0 {
            return Ok(vec![0.0; n]);
        }
        let dist = Normal::new(0.0, self.config.target_noise).map_err(|e| Error::config(e.to_string()))?;
        Ok((0..n).map(|_| dist.sample(rng)).collect())
    }

    /// Critic targets with explicit smoothing noise, one value per transition.
    pub fn target_breakdown(&self, batch: &[&Transition<f64>], noise: &[f64]) -> Result<TargetBreakdown> {
        if batch.is_empty() {
            return Err(Error::usage("empty batch"));
        }
        if noise.len() != batch.len() {
            return Err(Error::Dimension {
                expected: batch.len(),
                got: noise.len(),
            });
        }
        let next = stack(batch.iter().map(|t| t.next_state.as_slice()), self.state_dim);
        let pi = self.actor_target.forward_batch(&next)?;
        let c = self.config.noise_clip;
        let actions: Vec<f64> = pi
            .data
            .iter()
            .zip(noise)
            .map(|(a, e)| match self.mode {
                ContinuousMode::Td3 => (a + e.clamp(-c, c)).clamp(0.0, 1.0),
                ContinuousMode::Ddpg => a.clamp(0.0, 1.0),
            })
            .collect();
        let input = with_actions(&next, &actions);
        let q1 = self.critic1_target.forward_batch(&input)?.data;
        let q2 = match &self.critic2 {
            Some((_, t, _)) => Some(t.forward_batch(&input)?.data),
            None => None,
        };
        let gamma = self.config.gamma;
        let y = batch
            .iter()
            .enumerate()
            .map(|(i, t)| {
                if t.terminal {
                    t.reward
                } else {
                    let q = match &q2 {
                        Some(q2) => q1[i].min(q2[i]),
                        None => q1[i],
                    };
                    t.reward + gamma * q
                }
            })
            .collect();
        Ok(TargetBreakdown { y, q1, q2, actions })
    }

    pub fn td3_target<R: Rng + ?Sized>(&self, batch: &[&Transition<f64>], rng: &mut R) -> Result<Vec<f64>> {
        let noise = self.smoothing_noise(batch.len(), rng)?;
        Ok(self.target_breakdown(batch, &noise)?.y)
    }

    fn critic_step(net: &mut DenseNet, opt: &mut AdamState, input: &Matrix, y: &[f64]) -> Result<f64> {
        let pred = net.forward_cached(input)?;
        let n = y.len() as f64;
        let mut loss = 0.0;
        let grad: Vec<f64> = pred
            .data
            .iter()
            .zip(y)
            .map(|(p, t)| {
                let d = p - t;
                loss += d * d;
                2.0 * d / n
            })
            .collect();
        backward_and_step(net, opt, &Matrix::from_vec(y.len(), 1, grad)?)?;
        Ok(loss / n)
    }

    /// One critic step on a sampled batch; every `policy_delay`-th call also steps
    /// the actor through the first critic and soft-updates all targets.
    pub fn td3_update<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Td3Diagnostics> {
        if self.buffer.len() < self.config.batch_size {
            return Ok(Td3Diagnostics {
                skipped: true,
                ..Default::default()
            });
        }
        let idx = self.buffer.sample_indices(self.config.batch_size, rng)?;
        let noise = self.smoothing_noise(idx.len(), rng)?;
        self.update_on(&idx, &noise)
    }

    /// Update on the given buffer positions with explicit smoothing noise.
    pub fn update_on(&mut self, indices: &[usize], noise: &[f64]) -> Result<Td3Diagnostics> {
        let batch: Vec<&Transition<f64>> = indices
            .iter()
            .map(|&i| {
                self.buffer
                    .get(i)
                    .ok_or_else(|| Error::usage(format!("no transition at {i}")))
            })
            .collect::<Result<_>>()?;
        let y = self.target_breakdown(&batch, noise)?.y;
        let states = stack(batch.iter().map(|t| t.state.as_slice()), self.state_dim);
        let taken: Vec<f64> = batch.iter().map(|t| t.action).collect();
        let input = with_actions(&states, &taken);

        let mut diag = Td3Diagnostics {
            critic1_loss: Self::critic_step(&mut self.critic1, &mut self.critic1_opt, &input, &y)?,
            ..Default::default()
        };
        if let Some((c, _, opt)) = &mut self.critic2 {
            diag.critic2_loss = Some(Self::critic_step(c, opt, &input, &y)?);
        }

        self.updates += 1;
        if self.updates % self.policy_delay() == 0 {
            diag.actor_loss = Some(self.actor_step(&states)?);
            let tau = self.config.tau;
            self.actor_target.soft_update(&self.actor, tau)?;
            self.critic1_target.soft_update(&self.critic1, tau)?;
            if let Some((c, t, _)) = &mut self.critic2 {
                t.soft_update(c, tau)?;
            }
        }
        Ok(diag)
    }

    /// Ascend `mean Q1(s, pi(s))` with respect to the actor only.
    fn actor_step(&mut self, states: &Matrix) -> Result<f64> {
        let n = states.rows as f64;
        let actions = self.actor.forward_cached(states)?;
        let q = self.critic1.forward_cached(&with_actions(states, &actions.data))?;
        let loss = -q.data.iter().sum::<f64>() / n;
        let dq = self.critic1.backward(&Matrix::from_vec(states.rows, 1, vec![-1.0 / n; states.rows])?)?;
        let last = dq.input.cols - 1;
        let grad: Vec<f64> = (0..states.rows).map(|r| dq.input.get(r, last)).collect();
        backward_and_step(&mut self.actor, &mut self.actor_opt, &Matrix::from_vec(states.rows, 1, grad)?)?;
        Ok(loss)
    }

    pub fn checkpoint(&self) -> Checkpoint {
        let mut c = Checkpoint::default();
        self.actor.export("actor", &mut c);
        self.actor_target.export("actor_target", &mut c);
        self.critic1.export("critic1", &mut c);
        self.critic1_target.export("critic1_target", &mut c);
        if let Some((n, t, _)) = &self.critic2 {
            n.export("critic2", &mut c);
            t.export("critic2_target", &mut c);
        }
        c
    }

    /// Load network parameters; optimizer moments are reset.
    pub fn restore(&mut self, ckpt: &Checkpoint) -> Result<()> {
        self.actor.import("actor", ckpt)?;
        self.actor_target.import("actor_target", ckpt)?;
        self.critic1.import("critic1", ckpt)?;
        self.critic1_target.import("critic1_target", ckpt)?;
        if let Some((n, t, _)) = &mut self.critic2 {
            n.import("critic2", ckpt)?;
            t.import("critic2_target", ckpt)?;
        }
        Ok(())
    }
}
