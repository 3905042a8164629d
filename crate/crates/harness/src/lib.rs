//! Experiment orchestration for the market simulator: scenario
//! configuration, deterministic runs with twin baselines, parameter
//! sweeps, and CSV/SVG emission.

pub mod config;
pub mod emit;
pub mod scenario;
pub mod sweep;

pub use config::{AdversaryKind, ConfigError, ExperimentConfig, PathSpec, ScheduleSpec};
pub use scenario::{
    build_path, run_scenario, AdversaryAction, BlockRow, RunResult, RunSummary, ScenarioError,
};
