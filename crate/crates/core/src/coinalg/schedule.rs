//! Trading schedules: fixed intervals and Poisson-process trade times.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// When the agent trades. Poisson gaps are independent draws from a
/// discretized exponential with the configured mean, deterministic per
/// seed.
#[derive(Clone, Debug)]
pub enum Schedule {
    Fixed { interval: u64 },
    Poisson { mean_gap: f64, rng: ChaCha8Rng },
}

impl Schedule {
    pub fn fixed(interval: u64) -> Self {
        assert!(interval >= 1, "interval must be at least one block");
        Schedule::Fixed { interval }
    }

    pub fn poisson(mean_gap: f64, seed: u64) -> Self {
        assert!(mean_gap > 0.0, "mean gap must be positive");
        Schedule::Poisson {
            mean_gap,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Mean gap between trades, in blocks.
    pub fn expected_gap(&self) -> f64 {
        match self {
            Schedule::Fixed { interval } => *interval as f64,
            Schedule::Poisson { mean_gap, .. } => *mean_gap,
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, Schedule::Fixed { .. })
    }

    /// The next trade block after `last`, consuming a gap draw for
    /// Poisson schedules.
    pub fn next_trade_block(&mut self, last: u64) -> u64 {
        match self {
            Schedule::Fixed { interval } => last + *interval,
            Schedule::Poisson { mean_gap, rng } => {
                let u: f64 = rng.gen();
                let gap = (-*mean_gap * (1.0 - u).ln()).round().max(1.0);
                last + gap as u64
            }
        }
    }

    /// The gap the next [`Self::next_trade_block`] call will produce,
    /// without consuming randomness.
    pub fn peek_gap(&self, last: u64) -> u64 {
        match self {
            Schedule::Fixed { .. } => {}
            Schedule::Poisson { .. } => {}
        }
        self.clone().next_trade_block(last) - last
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_schedule_steps_by_interval() {
        let mut s = Schedule::fixed(7200);
        assert_eq!(s.next_trade_block(0), 7200);
        assert_eq!(s.next_trade_block(7200), 14400);
    }

    #[test]
    fn poisson_mean_gap_matches_lambda() {
        let mut s = Schedule::poisson(3600.0, 11);
        let n = 100_000u64;
        let mut total = 0u64;
        let mut last = 0u64;
        for _ in 0..n {
            let next = s.next_trade_block(last);
            total += next - last;
            last = next;
        }
        let mean = total as f64 / n as f64;
        assert!(
            (mean - 3600.0).abs() / 3600.0 < 0.02,
            "empirical mean {mean}"
        );
    }

    #[test]
    fn same_seed_same_gap_sequence() {
        let mut a = Schedule::poisson(100.0, 5);
        let mut b = Schedule::poisson(100.0, 5);
        let mut last_a = 0;
        let mut last_b = 0;
        for _ in 0..100 {
            last_a = a.next_trade_block(last_a);
            last_b = b.next_trade_block(last_b);
            assert_eq!(last_a, last_b);
        }
    }

    #[test]
    fn peek_does_not_consume_randomness() {
        let mut s = Schedule::poisson(50.0, 2);
        let peeked = s.peek_gap(0);
        assert_eq!(s.peek_gap(0), peeked);
        assert_eq!(s.next_trade_block(0), peeked);
    }

    #[test]
    fn gaps_are_at_least_one_block() {
        let mut s = Schedule::poisson(1.0, 3);
        let mut last = 0;
        for _ in 0..1000 {
            let next = s.next_trade_block(last);
            assert!(next > last);
            last = next;
        }
    }
}
