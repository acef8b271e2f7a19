pub mod builtins;
pub mod disc;
mod dist;
pub mod engine;
mod error;
pub mod files;
pub mod info;
pub mod linalg;
pub mod random;
pub mod verify;

pub use dist::{tv_distance, InputDistribution, TvSplit};
pub use error::{Error, Result};
