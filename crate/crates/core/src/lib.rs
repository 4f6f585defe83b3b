//! Simulator and learning agents for joint partial computation offloading and
//! service-function-chain placement in multi-access edge computing.
//!
//! A mobile device (MD) splits each task between local execution and an edge
//! infrastructure (EI) of base stations; a TD3 agent picks the offloading ratio
//! and a dueling double-DQN agent places the chain's VNFs stage by stage.

pub mod agents;
pub mod cost;
pub mod edge_exec;
pub mod env;
pub mod error;
pub mod evalcli;
pub mod local_exec;
pub mod neural;
pub mod orchestrator;
pub mod range;
pub mod topology;
pub mod workload;

pub use error::{Constraint, Error, Result};

use rand::SeedableRng;

/// Deterministic generator used everywhere in the crate.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Independent random streams derived from one experiment seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Topology,
    Workload,
    Agent,
    Policy,
    Evaluation,
}

/// Generator for `stream` under `seed`. Streams never share state, so e.g. the
/// workload sequence does not depend on how many random numbers an agent drew.
pub fn stream_rng(seed: u64, stream: Stream) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(stream as u64 + 1);
    rng
}
