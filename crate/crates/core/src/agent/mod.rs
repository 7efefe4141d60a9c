//! Learning agent: network, optimizer, replay memory, Lagrangian SAC,
//! training loop and checkpoints.

pub mod adam;
pub mod net;
pub mod replay;
pub mod sac;
pub mod train;
pub mod checkpoint;

pub use net::DenseNet;
pub use replay::{Batch, ReplayBuffer, Transition};
pub use sac::{LagrangianSac, SacConfig, UpdateStats};
pub use train::{train, train_agent, CurvePoint, EpisodeLog, TrainError, TrainOutcome, TrainSchedule};
pub use checkpoint::{Checkpoint, CheckpointError};
