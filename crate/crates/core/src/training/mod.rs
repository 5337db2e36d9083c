//! Collocation sampling, the weighted physics-informed loss and its
//! minimisation.

mod collocation;
mod lbfgs;
mod loss;
mod trainer;

pub use collocation::{
    sample_points, split_boundary_initial, BoundaryPoint, Budget, CollocationSet, Constraint,
};
pub use lbfgs::{lbfgs_minimize, LbfgsOptions, LbfgsResult, Objective, StopReason};
pub use loss::{CaseLoss, LossWeights, TermBreakdown, BLOCK_BC, BLOCK_DATA, BLOCK_IC, BLOCK_PDE};
pub use trainer::{
    inference_time, train_case, train_on, HistoryRow, TrainOptions, TrainedModel, TrainingReport,
    Warmup,
};
