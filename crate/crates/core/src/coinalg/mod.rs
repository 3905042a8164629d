//! The collective trading agent: trade distributions and sampling, the
//! public-function disclosure model, schedules, prediction-driven
//! strategies, the covert direction channel, and the randomizing wrapper.

mod dist;
mod grid;
mod schedule;
mod strategy;
mod view;
mod wrapper;

pub use dist::{TradeDistribution, PROB_SUM_TOL};
pub use grid::{TradeGrid, DEFAULT_BUCKETS};
pub use schedule::Schedule;
pub use strategy::{
    ideal_action, trade_distribution, two_step_entry, CoinAlg, CovertChannel, CovertSignal,
    StrategyKind, COVERT_LEAD_BLOCKS,
};
pub use view::{induced_distribution, public_view, PublicView, PublicViewKind};
pub use wrapper::{EpochRecord, PlannedTrade, RandomizingWrapper};

/// Errors from distribution and view operations.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CoinAlgError {
    #[error("distribution support is empty")]
    EmptySupport,

    #[error("support has {support} elements but {probs} probabilities")]
    LengthMismatch { support: usize, probs: usize },

    #[error("probabilities must be non-negative and finite")]
    NegativeProbability,

    #[error("probabilities sum to {sum}, expected 1")]
    BadProbabilitySum { sum: f64 },

    #[error("no grid trades are consistent with the view")]
    EmptyConsistentSet,
}
