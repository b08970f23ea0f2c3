//! Dense product-block simulation with Pauli noise trajectories and single-fault injection.

mod engine;
mod fault;
pub mod logical;
mod noise;
mod state;

pub use engine::{
    execute, run_batch, run_shot, run_shot_full, run_shot_indexed, sample_trajectory, shot_rng, Execution, Injection,
    NoiseSource, Op, Schedule, Trajectory,
};
pub use fault::{
    enumerate_fault_locations, ft_check, ft_check_circuit, run_with_fault, FaultKind, FaultOutcome, FaultPosition,
    FaultSpec, FtOptions, FtReport,
};
pub use noise::{Channels, NoiseModel};
pub use state::{overlap, RegisterState};
