//! Learning agents: a TD3 actor-critic for the offloading ratio and a dueling
//! double-DQN for VNF placement. Ablations are mode flags on these two types.

mod ddqn;
mod replay;
mod td3;

pub use ddqn::{DdqnAgent, DdqnConfig, DdqnDiagnostics, DiscreteMode};
pub use replay::{ReplayBuffer, Transition};
pub use td3::{ContinuousMode, TargetBreakdown, Td3Agent, Td3Config, Td3Diagnostics};

use crate::neural::Matrix;

fn stack<'a, I>(rows: I, cols: usize) -> Matrix
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut data = Vec::new();
    let mut n = 0;
    for r in rows {
        debug_assert_eq!(r.len(), cols);
        data.extend_from_slice(r);
        n += 1;
    }
    Matrix {
        rows: n,
        cols,
        data,
    }
}
