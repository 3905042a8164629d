//! The randomizing wrapper: samples trades with private coins and
//! executes them, keeping an audit trail of coin usage counts and
//! per-epoch distributions for external verification.
//!
//! The wrapper's code path is public; its coin values never leave it.
//! The audit records how many coins were drawn per epoch and which
//! distribution was sampled, never the coin values themselves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coinalg::TradeDistribution;
use crate::market::{Block, MarketError, TradeAction, WorldState};

/// A sampled trade decision with its timing offset.
#[derive(Clone, Debug, PartialEq)]
pub struct PlannedTrade {
    pub action: TradeAction,
    /// Blocks to wait beyond the decision block before executing.
    pub delay_blocks: u64,
}

/// One audited sampling epoch.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub decide_block: u64,
    pub execute_block: u64,
    /// The distribution the epoch's trade was drawn from.
    pub dist: TradeDistribution,
    /// The sampled outcome.
    pub action: TradeAction,
    /// Number of private coins consumed (values are never exposed).
    pub coin_draws: u32,
}

/// Wrapper around the sampling step of a trading algorithm.
#[derive(Clone, Debug)]
pub struct RandomizingWrapper {
    rng: ChaCha8Rng,
    /// Uniform execution-time jitter in `[0, jitter_blocks]`.
    pub jitter_blocks: u64,
    audit: Vec<EpochRecord>,
}

impl RandomizingWrapper {
    pub fn new(seed: u64, jitter_blocks: u64) -> Self {
        RandomizingWrapper {
            rng: ChaCha8Rng::seed_from_u64(seed),
            jitter_blocks,
            audit: Vec::new(),
        }
    }

    /// The joint distribution over (action, delay) pairs the wrapper
    /// samples from: the trade distribution crossed with the uniform
    /// timing jitter.
    pub fn plan_distribution(&self, dist: &TradeDistribution) -> Vec<(PlannedTrade, f64)> {
        let offsets = self.jitter_blocks + 1;
        let offset_prob = 1.0 / offsets as f64;
        let mut plans = Vec::with_capacity(dist.len() * offsets as usize);
        for (action, &p) in dist.support().iter().zip(dist.probs()) {
            if p == 0.0 {
                continue;
            }
            for delay in 0..offsets {
                plans.push((
                    PlannedTrade {
                        action: action.clone(),
                        delay_blocks: delay,
                    },
                    p * offset_prob,
                ));
            }
        }
        plans
    }

    /// Draw a trade (and timing offset) with private coins, recording the
    /// epoch in the audit log.
    pub fn sample(&mut self, dist: &TradeDistribution, decide_block: u64) -> PlannedTrade {
        let mut coin_draws = 1u32;
        let action = dist.sample(self.rng.gen::<f64>()).clone();
        let delay_blocks = if self.jitter_blocks > 0 {
            coin_draws += 1;
            self.rng.gen_range(0..=self.jitter_blocks)
        } else {
            0
        };
        let epoch = self.audit.len();
        self.audit.push(EpochRecord {
            epoch,
            decide_block,
            execute_block: decide_block + delay_blocks,
            dist: dist.clone(),
            action: action.clone(),
            coin_draws,
        });
        PlannedTrade {
            action,
            delay_blocks,
        }
    }

    /// Execute a sampled action against the world. Holding leaves the
    /// world unchanged (only the block height advances).
    pub fn execute(
        &self,
        action: &TradeAction,
        world: &WorldState,
    ) -> Result<WorldState, MarketError> {
        match action {
            TradeAction::Hold => world.apply_block(&Block::default()),
            TradeAction::Trade(t) => world.apply_block(&Block::single(t.clone())),
        }
    }

    /// The audit log: per-epoch distributions and coin usage counts.
    pub fn audit(&self) -> &[EpochRecord] {
        &self.audit
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{PlayerId, PoolState, Trade};

    const P: PlayerId = PlayerId(0);

    fn two_point() -> TradeDistribution {
        TradeDistribution::uniform(vec![
            TradeAction::Trade(Trade::buy(P, 10.0)),
            TradeAction::Trade(Trade::sell(P, 0.1)),
        ])
        .unwrap()
    }

    #[test]
    fn degenerate_dist_samples_deterministically() {
        let d = TradeDistribution::degenerate(TradeAction::Trade(Trade::buy(P, 5.0)));
        for seed in 0..20 {
            let mut w = RandomizingWrapper::new(seed, 0);
            let planned = w.sample(&d, 100);
            assert_eq!(planned.action, TradeAction::Trade(Trade::buy(P, 5.0)));
            assert_eq!(planned.delay_blocks, 0);
        }
    }

    #[test]
    fn two_point_jitter_gives_two_equal_probability_variants() {
        let w = RandomizingWrapper::new(0, 1);
        let d = TradeDistribution::degenerate(TradeAction::Trade(Trade::buy(P, 5.0)));
        let plans = w.plan_distribution(&d);
        assert_eq!(plans.len(), 2);
        assert_eq!(plans[0].1, 0.5);
        assert_eq!(plans[1].1, 0.5);
        assert_eq!(plans[0].0.delay_blocks, 0);
        assert_eq!(plans[1].0.delay_blocks, 1);
    }

    #[test]
    fn jitter_split_is_roughly_even() {
        let mut w = RandomizingWrapper::new(7, 1);
        let d = TradeDistribution::degenerate(TradeAction::Hold);
        let n = 10_000;
        let delayed = (0..n)
            .filter(|_| w.sample(&d, 0).delay_blocks == 1)
            .count();
        let frac = delayed as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.03, "delayed fraction {frac}");
    }

    #[test]
    fn audit_records_counts_and_dists_not_coins() {
        let mut w = RandomizingWrapper::new(3, 1);
        let d = two_point();
        w.sample(&d, 50);
        w.sample(&d, 60);
        let audit = w.audit();
        assert_eq!(audit.len(), 2);
        assert_eq!(audit[0].epoch, 0);
        assert_eq!(audit[0].decide_block, 50);
        assert_eq!(audit[0].coin_draws, 2);
        assert_eq!(audit[0].dist, d);
        assert!(audit[0].execute_block >= 50 && audit[0].execute_block <= 51);
    }

    #[test]
    fn executing_hold_changes_nothing_but_height() {
        let w = RandomizingWrapper::new(0, 0);
        let mut world = WorldState::new(PoolState::new(1000.0, 10.0, 0.0), 0.0);
        world.credit(P, 100.0, 0.0);
        let next = w.execute(&TradeAction::Hold, &world).unwrap();
        assert_eq!(next.pool, world.pool);
        assert_eq!(next.balance(P), world.balance(P));
        assert_eq!(next.block_height, world.block_height + 1);
    }

    #[test]
    fn execute_propagates_rejections() {
        let w = RandomizingWrapper::new(0, 0);
        let world = WorldState::new(PoolState::new(1000.0, 10.0, 0.0), 0.0);
        // No balance credited: the trade is invalid.
        let err = w
            .execute(&TradeAction::Trade(Trade::buy(P, 10.0)), &world)
            .unwrap_err();
        assert!(matches!(err, MarketError::InsufficientBalance { .. }));
    }
}
