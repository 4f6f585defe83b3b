use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{stack, ReplayBuffer, Transition};
use crate::error::{Error, Result};
use crate::neural::{backward_and_step, AdamState, Architecture, Checkpoint, DenseNet, Head, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DdqnConfig {
    pub gamma: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    pub epsilon_start: f64,
    pub epsilon_floor: f64,
    /// Multiplicative decay per exploratory selection.
    pub epsilon_decay: f64,
    /// Hard target copy every this many updates.
    pub target_sync: u64,
    pub hidden_layers: usize,
    pub hidden_units: usize,
}

impl Default for DdqnConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            learning_rate: 1e-3,
            batch_size: 128,
            buffer_capacity: 2000,
            epsilon_start: 1.0,
            epsilon_floor: 0.01,
            epsilon_decay: 0.9995,
            target_sync: 100,
            hidden_layers: 4,
            hidden_units: 64,
        }
    }
}

impl DdqnConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::config(format!("ddqn: {what}")));
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1]");
        }
        if self.learning_rate <= 0.0 {
            return bad("learning_rate must be positive");
        }
        if self.batch_size == 0 || self.buffer_capacity < self.batch_size {
            return bad("need 0 < batch_size <= buffer_capacity");
        }
        if !(0.0..=1.0).contains(&self.epsilon_floor)
            || !(self.epsilon_floor..=1.0).contains(&self.epsilon_start)
            || !(0.0..=1.0).contains(&self.epsilon_decay)
        {
            return bad("need 0 <= epsilon_floor <= epsilon_start <= 1 and decay in [0, 1]");
        }
        if self.target_sync == 0 {
            return bad("target_sync must be at least 1");
        }
        if self.hidden_units == 0 {
            return bad("hidden_units must be positive");
        }
        Ok(())
    }
}

/// Ablation switches for the placement agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscreteMode {
    /// Value/advantage head instead of a plain linear Q head.
    pub dueling: bool,
    /// Evaluate-net argmax with target-net value instead of a target-net max.
    pub double: bool,
}

impl DiscreteMode {
    pub const DUELING_DOUBLE: Self = Self {
        dueling: true,
        double: true,
    };
    pub const DOUBLE: Self = Self {
        dueling: false,
        double: true,
    };
    pub const PLAIN: Self = Self {
        dueling: false,
        double: false,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DdqnDiagnostics {
    pub skipped: bool,
    pub loss: f64,
    /// The target net was overwritten by this update.
    pub synced: bool,
}

#[derive(Debug, Clone)]
pub struct DdqnAgent {
    pub config: DdqnConfig,
    pub mode: DiscreteMode,
    state_dim: usize,
    actions: usize,
    online: DenseNet,
    target: DenseNet,
    opt: AdamState,
    selections: u64,
    updates: u64,
    pub buffer: ReplayBuffer<usize>,
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

impl DdqnAgent {
    pub fn new<R: Rng + ?Sized>(
        state_dim: usize,
        actions: usize,
        config: DdqnConfig,
        mode: DiscreteMode,
        rng: &mut R,
    ) -> Self {
        let head = if mode.dueling {
            Head::Dueling { actions }
        } else {
            Head::Linear { outputs: actions }
        };
        let online = DenseNet::new(
            Architecture::mlp(state_dim, config.hidden_layers, config.hidden_units, head),
            rng,
        );
        Self {
            opt: AdamState::for_net(&online, config.learning_rate),
            target: online.clone(),
            online,
            selections: 0,
            updates: 0,
            buffer: ReplayBuffer::new(config.buffer_capacity),
            state_dim,
            actions,
            config,
            mode,
        }
    }

    pub fn action_count(&self) -> usize {
        self.actions
    }

    pub fn online(&self) -> &DenseNet {
        &self.online
    }

    pub fn target(&self) -> &DenseNet {
        &self.target
    }

    pub fn online_mut(&mut self) -> &mut DenseNet {
        &mut self.online
    }

    pub fn target_mut(&mut self) -> &mut DenseNet {
        &mut self.target
    }

    pub fn update_count(&self) -> u64 {
        self.updates
    }

    pub fn selections(&self) -> u64 {
        self.selections
    }

    pub fn fingerprint(&self) -> u64 {
        self.online.fingerprint() ^ self.target.fingerprint().rotate_left(17)
    }

    /// `max(floor, start * decay^k)` after `k` exploratory selections.
    pub fn epsilon(&self) -> f64 {
        let k = i32::try_from(self.selections).unwrap_or(i32::MAX);
        (self.config.epsilon_start * self.config.epsilon_decay.powi(k)).max(self.config.epsilon_floor)
    }

    pub fn q_values(&self, state: &[f64]) -> Result<Vec<f64>> {
        self.online.forward(state)
    }

    /// Argmax of the evaluate net, lowest index on ties.
    pub fn greedy(&self, state: &[f64]) -> Result<usize> {
        Ok(argmax(&self.q_values(state)?))
    }

    /// Epsilon-greedy when exploring (and decays epsilon), greedy otherwise.
    pub fn select_action<R: Rng + ?Sized>(&mut self, state: &[f64], explore: bool, rng: &mut R) -> Result<usize> {
        if !explore {
            return self.greedy(state);
        }
        let eps = self.epsilon();
        self.selections += 1;
        if rng.random::<f64>() < eps {
            Ok(rng.random_range(0..self.actions))
        } else {
            self.greedy(state)
        }
    }

    pub fn ddqn_target(&self, batch: &[&Transition<usize>]) -> Result<Vec<f64>> {
        if batch.is_empty() {
            return Err(Error::usage("empty batch"));
        }
        let next = stack(batch.iter().map(|t| t.next_state.as_slice()), self.state_dim);
        let q_target = self.target.forward_batch(&next)?;
        let q_online = if self.mode.double {
            Some(self.online.forward_batch(&next)?)
        } else {
            None
        };
        let gamma = self.config.gamma;
        Ok(batch
            .iter()
            .enumerate()
            .map(|(i, t)| {
                if t.terminal {
                    return t.reward;
                }
                let row = q_target.row(i);
                let bootstrap = match &q_online {
                    Some(q) => row[argmax(q.row(i))],
                    None => row.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                };
                t.reward + gamma * bootstrap
            })
            .collect())
    }

    /// Output gradient of the mean squared TD error: nonzero only at each row's
    /// taken action.
    pub fn loss_gradient(q: &Matrix, actions: &[usize], y: &[f64]) -> (f64, Matrix) {
        let n = actions.len() as f64;
        let mut grad = Matrix::zeros(q.rows, q.cols);
        let mut loss = 0.0;
        for (r, (&a, &t)) in actions.iter().zip(y).enumerate() {
            let d = q.get(r, a) - t;
            loss += d * d;
            grad.row_mut(r)[a] = 2.0 * d / n;
        }
        (loss / n, grad)
    }

    pub fn ddqn_update<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<DdqnDiagnostics> {
        if self.buffer.len() < self.config.batch_size {
            return Ok(DdqnDiagnostics {
                skipped: true,
                ..Default::default()
            });
        }
        let idx = self.buffer.sample_indices(self.config.batch_size, rng)?;
        self.update_on(&idx)
    }

    pub fn update_on(&mut self, indices: &[usize]) -> Result<DdqnDiagnostics> {
        let batch: Vec<&Transition<usize>> = indices
            .iter()
            .map(|&i| {
                self.buffer
                    .get(i)
                    .ok_or_else(|| Error::usage(format!("no transition at {i}")))
            })
            .collect::<Result<_>>()?;
        let y = self.ddqn_target(&batch)?;
        let states = stack(batch.iter().map(|t| t.state.as_slice()), self.state_dim);
        let actions: Vec<usize> = batch.iter().map(|t| t.action).collect();
        let q = self.online.forward_cached(&states)?;
        let (loss, grad) = Self::loss_gradient(&q, &actions, &y);
        backward_and_step(&mut self.online, &mut self.opt, &grad)?;
        self.updates += 1;
        let synced = self.updates % self.config.target_sync == 0;
        if synced {
            self.target.copy_from(&self.online)?;
        }
        Ok(DdqnDiagnostics {
            skipped: false,
            loss,
            synced,
        })
    }

    pub fn checkpoint(&self) -> Checkpoint {
        let mut c = Checkpoint::default();
        self.online.export("q", &mut c);
        self.target.export("q_target", &mut c);
        c
    }

    pub fn restore(&mut self, ckpt: &Checkpoint) -> Result<()> {
        self.online.import("q", ckpt)?;
        self.target.import("q_target", ckpt)
    }
}
