//! Batch experiment runner for the `hea-core` kernels: worker-pool drivers,
//! CSV/JSON persistence with embedded provenance, SVG plot emission and the
//! CLI surface.

pub mod config;
pub mod csvio;
pub mod drivers;
pub mod parallel;
pub mod plot;
pub mod runner;

pub use hea_core;

pub const ARTIFACT_NAME: &str = "hea-lab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seed used by the fixed-seed regression baselines.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 2,
            _ => 1,
        }
    }
}
