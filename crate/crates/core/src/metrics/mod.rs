//! Statistical privacy and economic-fairness estimators: total variation
//! distance on the trade grid, the privacy estimator, the two-fork
//! value-extraction game with its advantage statistic, full-knowledge
//! extractable value, financial utility, cost of transparency, and the
//! executable unfairness-to-privacy distinguisher.

mod fairness;
mod privacy;
mod tv;

pub use fairness::{
    fair_game_run, financial_utility, full_knowledge_extractable_value, privacy_distinguisher,
    AdvantageReport, DistinguisherReport, FairGameParams, FairScenario, Information,
    TrialOutcome, COINALG_PLAYER, EXTRACTOR_PLAYER, GHOST_PLAYER,
};
pub use privacy::{epsilon_privacy, PrivacyReport};
pub use tv::tv_distance;

use crate::coinalg::CoinAlgError;
use crate::market::MarketError;
use crate::oracle::OracleError;

/// 95% binomial half-width for an empirical frequency.
pub fn binomial_half_width(p_hat: f64, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    1.96 * (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}

/// Baseline profit minus exposed profit: what disclosure cost the
/// algorithm, in USD.
pub fn cost_of_transparency(private_profit: f64, exposed_profit: f64) -> f64 {
    private_profit - exposed_profit
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("distributions are not defined over the same support")]
    MismatchedSupports,

    #[error("the state sample is empty")]
    EmptySample,

    #[error("financial utility is undefined: extractable value is zero")]
    UndefinedUtility,

    #[error(transparent)]
    View(#[from] CoinAlgError),

    #[error(transparent)]
    Oracle(#[from] OracleError),

    #[error(transparent)]
    Market(#[from] MarketError),
}
