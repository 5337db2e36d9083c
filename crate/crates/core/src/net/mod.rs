//! Fully connected networks with periodic activation.
//!
//! Hidden layers compute `sigma(W h + b)`, the output layer is affine. Inputs
//! are expected in normalised coordinates (`[0, 1]` per axis). Input
//! derivatives are propagated forward exactly as jets, and gradients of
//! jet-based losses with respect to the parameters are obtained by a reverse
//! sweep over the same batched program.

mod checkpoint;
mod config;
mod engine;
mod jet;
mod params;

pub use checkpoint::{read_checkpoint, write_checkpoint, Checkpoint, CHECKPOINT_VERSION};
pub use config::{Activation, NetworkConfig, MAX_INPUTS, MAX_OUTPUTS};
pub use engine::{
    eval_jets, forward, forward_jet, loss_gradient, predict, JetLoss, JetPlan, LossEval,
    CHUNK_SIZE,
};
pub use jet::{FieldJet, Jet};
pub use params::{init_network, Layer, ParameterSet};
