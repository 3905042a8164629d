//! Finite discrete distributions over trade actions.

use rand::Rng;

use crate::coinalg::{CoinAlgError, TradeGrid};
use crate::market::{TradeAction, TradeDirection};

/// Tolerance on the sum of probabilities.
pub const PROB_SUM_TOL: f64 = 1e-9;

/// A probability distribution over a finite list of trade actions.
/// Probabilities are non-negative and sum to one within [`PROB_SUM_TOL`].
#[derive(Clone, Debug, PartialEq)]
pub struct TradeDistribution {
    support: Vec<TradeAction>,
    probs: Vec<f64>,
}

impl TradeDistribution {
    pub fn new(support: Vec<TradeAction>, probs: Vec<f64>) -> Result<Self, CoinAlgError> {
        if support.is_empty() {
            return Err(CoinAlgError::EmptySupport);
        }
        if support.len() != probs.len() {
            return Err(CoinAlgError::LengthMismatch {
                support: support.len(),
                probs: probs.len(),
            });
        }
        if probs.iter().any(|&p| p < -PROB_SUM_TOL || !p.is_finite()) {
            return Err(CoinAlgError::NegativeProbability);
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(CoinAlgError::BadProbabilitySum { sum });
        }
        Ok(TradeDistribution { support, probs })
    }

    /// Point mass on a single action.
    pub fn degenerate(action: TradeAction) -> Self {
        TradeDistribution {
            support: vec![action],
            probs: vec![1.0],
        }
    }

    /// Uniform over the given actions.
    pub fn uniform(support: Vec<TradeAction>) -> Result<Self, CoinAlgError> {
        if support.is_empty() {
            return Err(CoinAlgError::EmptySupport);
        }
        let p = 1.0 / support.len() as f64;
        let probs = vec![p; support.len()];
        Ok(TradeDistribution { support, probs })
    }

    pub fn support(&self) -> &[TradeAction] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Probability of the most likely outcome.
    pub fn max_prob(&self) -> f64 {
        self.probs.iter().cloned().fold(0.0, f64::max)
    }

    /// True when all mass sits on one support element.
    pub fn is_degenerate(&self) -> bool {
        self.max_prob() >= 1.0 - PROB_SUM_TOL
    }

    /// Inverse-CDF sampling over the listed support order: the first
    /// element whose cumulative probability exceeds the coin.
    pub fn sample(&self, coin: f64) -> &TradeAction {
        debug_assert!((0.0..=1.0).contains(&coin), "coin out of range: {coin}");
        let mut cum = 0.0;
        for (action, &p) in self.support.iter().zip(&self.probs) {
            cum += p;
            if coin < cum {
                return action;
            }
        }
        // Rounding pushed the coin past the last step; return the final
        // element with positive mass.
        self.support
            .iter()
            .zip(&self.probs)
            .rev()
            .find(|(_, &p)| p > 0.0)
            .map(|(a, _)| a)
            .unwrap_or(&self.support[self.support.len() - 1])
    }

    pub fn sample_with<R: Rng>(&self, rng: &mut R) -> &TradeAction {
        self.sample(rng.gen::<f64>())
    }

    /// Project the distribution onto a grid: the returned distribution
    /// has the grid's canonical support (all grid trades plus hold) with
    /// each support element's mass accumulated into its nearest cell.
    pub fn quantize_to_grid(&self, grid: &TradeGrid) -> TradeDistribution {
        let support = grid.support_with_hold();
        let mut probs = vec![0.0; support.len()];
        for (action, &p) in self.support.iter().zip(&self.probs) {
            probs[grid.quantize(action)] += p;
        }
        TradeDistribution { support, probs }
    }

    /// Marginal over trade directions, renormalized over trading mass.
    /// Empty when all mass is on hold.
    pub fn direction_marginal(&self) -> Vec<(TradeDirection, f64)> {
        let mut buy = 0.0;
        let mut sell = 0.0;
        for (action, &p) in self.support.iter().zip(&self.probs) {
            match action.direction() {
                Some(TradeDirection::BuyTok) => buy += p,
                Some(TradeDirection::SellTok) => sell += p,
                None => {}
            }
        }
        let total = buy + sell;
        if total <= 0.0 {
            return Vec::new();
        }
        let mut marginal = Vec::new();
        if buy > 0.0 {
            marginal.push((TradeDirection::BuyTok, buy / total));
        }
        if sell > 0.0 {
            marginal.push((TradeDirection::SellTok, sell / total));
        }
        marginal
    }
}
