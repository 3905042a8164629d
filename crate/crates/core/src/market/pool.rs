//! Constant-product pool math.
//!
//! The pool holds `reserve_usd` and `reserve_tok` with invariant
//! `k = reserve_usd * reserve_tok`. Swaps quote against the post-fee
//! input but add the full input to reserves, so `k` never decreases
//! when the fee rate is positive and is conserved exactly when it is
//! zero. Spot price is the reserve ratio, USD per TOK.

use crate::market::{MarketError, TradeDirection};

/// Default minimum price increment in USD.
pub const DEFAULT_TICK: f64 = 1e-6;

/// Reserves and fee configuration of the two-asset pool.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoolState {
    /// USD reserve, non-negative.
    pub reserve_usd: f64,
    /// TOK reserve, strictly positive.
    pub reserve_tok: f64,
    /// Proportional fee on swap input, in `[0, 0.1]`.
    pub fee_rate: f64,
    /// Minimum price increment in USD per TOK.
    pub tick: f64,
}

/// Result of a price-limited swap: how much input was consumed, how much
/// output was received, and the pool afterwards.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitFill {
    pub spent: f64,
    pub received: f64,
    pub pool: PoolState,
}

impl PoolState {
    /// Build a pool. Panics on out-of-domain reserves or fee rate; pools
    /// are constructed from validated configuration.
    pub fn new(reserve_usd: f64, reserve_tok: f64, fee_rate: f64) -> Self {
        assert!(
            reserve_usd >= 0.0 && reserve_tok > 0.0,
            "pool reserves out of domain: usd={reserve_usd}, tok={reserve_tok}"
        );
        assert!(
            (0.0..=0.1).contains(&fee_rate),
            "fee rate out of domain: {fee_rate}"
        );
        PoolState {
            reserve_usd,
            reserve_tok,
            fee_rate,
            tick: DEFAULT_TICK,
        }
    }

    pub fn with_tick(mut self, tick: f64) -> Self {
        assert!(tick > 0.0, "tick must be positive");
        self.tick = tick;
        self
    }

    /// Spot price in USD per TOK: the reserve ratio.
    pub fn spot_price(&self) -> f64 {
        self.reserve_usd / self.reserve_tok
    }

    /// The constant-product invariant `k`.
    pub fn product(&self) -> f64 {
        self.reserve_usd * self.reserve_tok
    }

    /// Swap an exact input amount at the pool's own fee rate.
    /// Returns the output amount and the updated pool.
    pub fn swap_exact_in(&self, direction: TradeDirection, amount_in: f64) -> (f64, PoolState) {
        self.swap_exact_in_with_fee(direction, amount_in, self.fee_rate)
    }

    /// Swap with an explicit fee rate (the ghost repeg swaps fee-free
    /// regardless of the pool's configured rate).
    pub fn swap_exact_in_with_fee(
        &self,
        direction: TradeDirection,
        amount_in: f64,
        fee_rate: f64,
    ) -> (f64, PoolState) {
        debug_assert!(amount_in >= 0.0, "negative swap input");
        if amount_in == 0.0 {
            return (0.0, *self);
        }
        let k = self.product();
        let effective = (1.0 - fee_rate) * amount_in;
        let mut next = *self;
        let out = match direction {
            TradeDirection::BuyTok => {
                let out = self.reserve_tok - k / (self.reserve_usd + effective);
                next.reserve_usd += amount_in;
                next.reserve_tok -= out;
                out
            }
            TradeDirection::SellTok => {
                let out = self.reserve_usd - k / (self.reserve_tok + effective);
                next.reserve_tok += amount_in;
                next.reserve_usd -= out;
                out
            }
        };
        (out, next)
    }

    /// USD input required to lift the spot price to `target` at the given
    /// fee rate, or 0 when the target is at or below spot.
    pub fn buy_input_to_price(&self, target: f64, fee_rate: f64) -> f64 {
        if target <= self.spot_price() {
            return 0.0;
        }
        let k = self.product();
        let r = self.reserve_usd;
        // Solve (r + x)(r + (1 - fee) x) = k * target for x >= 0.
        let a = 1.0 - fee_rate;
        let b = r * (1.0 + a);
        let c = r * r - k * target;
        ((b * b - 4.0 * a * c).sqrt() - b) / (2.0 * a)
    }

    /// TOK input required to push the spot price down to `target` at the
    /// given fee rate, or 0 when the target is at or above spot.
    pub fn sell_input_to_price(&self, target: f64, fee_rate: f64) -> f64 {
        if target >= self.spot_price() {
            return 0.0;
        }
        let k = self.product();
        let r = self.reserve_tok;
        // Mirror of the buy case: (r + (1 - fee) y)(r + y) = k / target.
        let a = 1.0 - fee_rate;
        let b = r * (1.0 + a);
        let c = r * r - k / target;
        ((b * b - 4.0 * a * c).sqrt() - b) / (2.0 * a)
    }

    /// Input required to receive exactly `amount_out` of the output
    /// asset at the given fee rate. Panics if the pool cannot supply the
    /// requested output.
    pub fn input_for_exact_output(
        &self,
        direction: TradeDirection,
        amount_out: f64,
        fee_rate: f64,
    ) -> f64 {
        if amount_out == 0.0 {
            return 0.0;
        }
        let k = self.product();
        let a = 1.0 - fee_rate;
        match direction {
            TradeDirection::BuyTok => {
                assert!(amount_out < self.reserve_tok, "output exceeds reserve");
                (k / (self.reserve_tok - amount_out) - self.reserve_usd) / a
            }
            TradeDirection::SellTok => {
                assert!(amount_out < self.reserve_usd, "output exceeds reserve");
                (k / (self.reserve_usd - amount_out) - self.reserve_tok) / a
            }
        }
    }

    /// Buy TOK with up to `budget_usd`, never lifting spot above `p_lim`.
    /// Spends `min(budget, cost-to-reach-limit)`; a zero fill is valid.
    pub fn limit_buy(&self, budget_usd: f64, p_lim: f64) -> LimitFill {
        debug_assert!(p_lim > 0.0 && budget_usd >= 0.0);
        let to_limit = self.buy_input_to_price(p_lim, self.fee_rate);
        let spent = budget_usd.min(to_limit);
        let (received, pool) = self.swap_exact_in(TradeDirection::BuyTok, spent);
        LimitFill {
            spent,
            received,
            pool,
        }
    }

    /// Sell up to `budget_tok` TOK, never pushing spot below `p_lim`.
    pub fn limit_sell(&self, budget_tok: f64, p_lim: f64) -> LimitFill {
        debug_assert!(p_lim > 0.0 && budget_tok >= 0.0);
        let to_limit = self.sell_input_to_price(p_lim, self.fee_rate);
        let spent = budget_tok.min(to_limit);
        let (received, pool) = self.swap_exact_in(TradeDirection::SellTok, spent);
        LimitFill {
            spent,
            received,
            pool,
        }
    }
}

/// Closed-form USD cost of lifting the pool price from `p` to `p + beta`
/// when the reserves are `(p * r0, r0)` and swaps are fee-free.
pub fn invalidation_cost(p: f64, r0: f64, beta: f64) -> Result<f64, MarketError> {
    if p <= 0.0 || r0 <= 0.0 {
        return Err(MarketError::NonPositiveDomain {
            what: "invalidation cost requires p > 0 and r0 > 0",
        });
    }
    if beta < 0.0 {
        return Err(MarketError::NonPositiveDomain {
            what: "invalidation cost requires beta >= 0",
        });
    }
    Ok(p * r0 * (((p + beta) / p).sqrt() - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pool(usd: f64, tok: f64, fee: f64) -> PoolState {
        PoolState::new(usd, tok, fee)
    }

    #[test]
    fn spot_price_is_reserve_ratio() {
        assert_eq!(pool(1000.0, 10.0, 0.0).spot_price(), 100.0);
        assert_eq!(pool(100.0, 100.0, 0.0).spot_price(), 1.0);
    }

    #[test]
    fn fee_free_buy_matches_constant_product() {
        let (out, next) = pool(1000.0, 10.0, 0.0).swap_exact_in(TradeDirection::BuyTok, 100.0);
        assert_relative_eq!(out, 0.909090909090909, max_relative = 1e-12);
        assert_relative_eq!(next.reserve_usd, 1100.0, max_relative = 1e-12);
        assert_relative_eq!(next.reserve_tok, 9.090909090909092, max_relative = 1e-12);
        assert_relative_eq!(next.spot_price(), 121.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_input_is_a_no_op() {
        let p = pool(1000.0, 10.0, 0.003);
        let (out, next) = p.swap_exact_in(TradeDirection::BuyTok, 0.0);
        assert_eq!(out, 0.0);
        assert_eq!(next, p);
    }

    #[test]
    fn fee_reduces_output_and_grows_product() {
        let p = pool(1000.0, 10.0, 0.003);
        let (out, next) = p.swap_exact_in(TradeDirection::BuyTok, 100.0);
        // 10 - 10^4 / (1000 + 99.7)
        assert_relative_eq!(out, 0.9066108938801492, max_relative = 1e-12);
        assert!(next.product() > p.product());
    }

    #[test]
    fn sell_mirrors_buy() {
        // Selling the TOK bought fee-free returns the pool to its start.
        let p = pool(1000.0, 10.0, 0.0);
        let (out, next) = p.swap_exact_in(TradeDirection::BuyTok, 100.0);
        let (back, last) = next.swap_exact_in(TradeDirection::SellTok, out);
        assert_relative_eq!(back, 100.0, max_relative = 1e-12);
        assert_relative_eq!(last.reserve_usd, 1000.0, max_relative = 1e-12);
        assert_relative_eq!(last.reserve_tok, 10.0, max_relative = 1e-12);
    }

    #[test]
    fn limit_buy_stops_at_the_limit() {
        let fill = pool(1000.0, 10.0, 0.0).limit_buy(1e6, 121.0);
        assert_relative_eq!(fill.spent, 100.0, max_relative = 1e-12);
        assert_relative_eq!(fill.received, 0.909090909090909, max_relative = 1e-12);
        assert_relative_eq!(fill.pool.spot_price(), 121.0, max_relative = 1e-9);
    }

    #[test]
    fn limit_buy_zero_fills_when_limit_breached() {
        let fill = pool(1000.0, 10.0, 0.0).limit_buy(500.0, 99.0);
        assert_eq!(fill.spent, 0.0);
        assert_eq!(fill.received, 0.0);
    }

    #[test]
    fn limit_buy_caps_at_budget() {
        let fill = pool(1000.0, 10.0, 0.0).limit_buy(50.0, 121.0);
        assert_eq!(fill.spent, 50.0);
        assert!(fill.pool.spot_price() < 121.0);
    }

    #[test]
    fn limit_buy_respects_limit_under_fees() {
        let fill = pool(1000.0, 10.0, 0.003).limit_buy(1e9, 121.0);
        assert_relative_eq!(fill.pool.spot_price(), 121.0, max_relative = 1e-9);
        // Fee makes the climb more expensive than the fee-free 100 USD.
        assert!(fill.spent > 100.0);
    }

    #[test]
    fn limit_sell_mirrors_limit_buy() {
        let fill = pool(1100.0, 9.090909090909092, 0.0).limit_sell(1e6, 100.0);
        assert_relative_eq!(fill.pool.spot_price(), 100.0, max_relative = 1e-9);
        assert_relative_eq!(fill.pool.reserve_usd, 1000.0, max_relative = 1e-9);
        assert_relative_eq!(fill.spent, 0.909090909090909, max_relative = 1e-9);
    }

    #[test]
    fn invalidation_cost_examples() {
        assert_relative_eq!(invalidation_cost(1.0, 100.0, 3.0).unwrap(), 100.0, max_relative = 1e-12);
        assert_eq!(invalidation_cost(1.0, 100.0, 0.0).unwrap(), 0.0);
        assert_relative_eq!(invalidation_cost(100.0, 10.0, 21.0).unwrap(), 100.0, max_relative = 1e-12);
        assert!(invalidation_cost(0.0, 10.0, 1.0).is_err());
        assert!(invalidation_cost(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn invalidation_cost_matches_limit_buy_spend() {
        // Moving spot 1 -> 4 on a (100, 100) pool costs 100 USD fee-free.
        let fill = pool(100.0, 100.0, 0.0).limit_buy(1e9, 4.0);
        assert_relative_eq!(
            fill.spent,
            invalidation_cost(1.0, 100.0, 3.0).unwrap(),
            max_relative = 1e-9
        );
    }
}
