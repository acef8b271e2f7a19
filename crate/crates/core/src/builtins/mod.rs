//! Canonical protocols and simple baselines.

mod and;
mod baselines;
pub mod calibration;

pub use and::{
    and_angle_10, and_angle_11, and_prior, and_round_entropy, build_and_protocol,
    engine_branch_entropies, engine_trajectory, reflection,
    AndParams, YBranch,
};
pub use baselines::{
    build_classical_exchange, build_constant, build_dummy, build_random_bit, random_protocol,
    RandomShape,
};
