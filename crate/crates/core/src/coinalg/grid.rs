//! Finite trade grid used as the common support for distribution-level
//! comparisons.
//!
//! The market's trade space is continuous; statistical comparisons need a
//! finite common support. The grid spans two directions times a set of
//! logarithmically spaced size buckets, from a fee-breakeven minimum up
//! to full capital. Sizes are expressed as USD value at a reference
//! price, so buy and sell buckets are economically symmetric.

use crate::market::{PlayerId, Trade, TradeAction, TradeDirection};

/// Default number of size buckets per direction.
pub const DEFAULT_BUCKETS: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub struct TradeGrid {
    player: PlayerId,
    buckets_usd: Vec<f64>,
    reference_price: f64,
    trades: Vec<Trade>,
}

impl TradeGrid {
    /// A grid of `buckets` log-spaced USD sizes in `[min_usd, max_usd]`
    /// for each direction. Sell amounts are the USD size divided by the
    /// reference price.
    pub fn log_spaced(
        player: PlayerId,
        min_usd: f64,
        max_usd: f64,
        buckets: usize,
        reference_price: f64,
    ) -> Self {
        assert!(buckets >= 1, "grid needs at least one bucket");
        assert!(
            min_usd > 0.0 && max_usd >= min_usd,
            "invalid bucket range [{min_usd}, {max_usd}]"
        );
        assert!(reference_price > 0.0, "reference price must be positive");
        let buckets_usd: Vec<f64> = if buckets == 1 {
            vec![min_usd]
        } else {
            let lo = min_usd.ln();
            let hi = max_usd.ln();
            (0..buckets)
                .map(|i| (lo + (hi - lo) * i as f64 / (buckets - 1) as f64).exp())
                .collect()
        };
        let mut trades = Vec::with_capacity(2 * buckets);
        for &size in &buckets_usd {
            trades.push(Trade::buy(player, size));
        }
        for &size in &buckets_usd {
            trades.push(Trade::sell(player, size / reference_price));
        }
        TradeGrid {
            player,
            buckets_usd,
            reference_price,
            trades,
        }
    }

    /// The default grid: two directions times [`DEFAULT_BUCKETS`] buckets
    /// spanning fee breakeven to full capital. Below the breakeven size a
    /// round trip costs more in fees than it can move the market, so
    /// smaller trades are not meaningful strategy choices.
    pub fn default_grid(
        player: PlayerId,
        capital_usd: f64,
        fee_rate: f64,
        tx_fee: f64,
        reference_price: f64,
    ) -> Self {
        assert!(capital_usd > 0.0, "capital must be positive");
        let breakeven = if fee_rate > 0.0 && tx_fee > 0.0 {
            tx_fee / fee_rate
        } else {
            capital_usd * 1e-4
        };
        let min_usd = breakeven.min(capital_usd / 2.0).max(capital_usd * 1e-9);
        Self::log_spaced(player, min_usd, capital_usd, DEFAULT_BUCKETS, reference_price)
    }

    pub fn player(&self) -> PlayerId {
        self.player
    }

    pub fn reference_price(&self) -> f64 {
        self.reference_price
    }

    pub fn buckets_per_direction(&self) -> usize {
        self.buckets_usd.len()
    }

    /// All grid trades, buys first, then sells.
    pub fn trades(&self) -> &[Trade] {
        &self.trades
    }

    pub fn len(&self) -> usize {
        self.trades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trades.is_empty()
    }

    /// The grid as a distribution support: every grid trade followed by
    /// the hold action.
    pub fn support_with_hold(&self) -> Vec<TradeAction> {
        let mut support: Vec<TradeAction> = self
            .trades
            .iter()
            .cloned()
            .map(TradeAction::Trade)
            .collect();
        support.push(TradeAction::Hold);
        support
    }

    /// Index of the hold action in [`Self::support_with_hold`].
    pub fn hold_index(&self) -> usize {
        self.trades.len()
    }

    /// Size bucket of a trade: nearest bucket by log distance of its USD
    /// value at the reference price.
    pub fn bucket_of(&self, trade: &Trade) -> usize {
        let usd_value = match trade.direction {
            TradeDirection::BuyTok => trade.amount,
            TradeDirection::SellTok => trade.amount * self.reference_price,
        };
        if usd_value <= 0.0 {
            return 0;
        }
        let target = usd_value.ln();
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (i, &size) in self.buckets_usd.iter().enumerate() {
            let d = (size.ln() - target).abs();
            if d < best_dist {
                best_dist = d;
                best = i;
            }
        }
        best
    }

    /// Index of an action in [`Self::support_with_hold`]: its grid cell,
    /// or the hold index.
    pub fn quantize(&self, action: &TradeAction) -> usize {
        match action {
            TradeAction::Hold => self.hold_index(),
            TradeAction::Trade(t) => {
                let bucket = self.bucket_of(t);
                match t.direction {
                    TradeDirection::BuyTok => bucket,
                    TradeDirection::SellTok => self.buckets_usd.len() + bucket,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: PlayerId = PlayerId(0);

    #[test]
    fn default_grid_has_two_directions_of_buckets() {
        let grid = TradeGrid::default_grid(P, 10_000.0, 0.003, 0.1, 100.0);
        assert_eq!(grid.len(), 2 * DEFAULT_BUCKETS);
        assert_eq!(grid.support_with_hold().len(), 2 * DEFAULT_BUCKETS + 1);
        let buys = grid
            .trades()
            .iter()
            .filter(|t| t.direction == TradeDirection::BuyTok)
            .count();
        assert_eq!(buys, DEFAULT_BUCKETS);
    }

    #[test]
    fn buckets_span_breakeven_to_capital() {
        let grid = TradeGrid::default_grid(P, 10_000.0, 0.003, 0.1, 100.0);
        let sizes: Vec<f64> = grid
            .trades()
            .iter()
            .filter(|t| t.direction == TradeDirection::BuyTok)
            .map(|t| t.amount)
            .collect();
        assert!((sizes[0] - 0.1 / 0.003).abs() < 1e-9);
        assert!((sizes[sizes.len() - 1] - 10_000.0).abs() < 1e-9);
        assert!(sizes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn quantize_snaps_to_nearest_log_bucket() {
        let grid = TradeGrid::log_spaced(P, 1.0, 1024.0, 11, 100.0);
        // Buckets are powers of 2 from 1 to 1024.
        let t = Trade::buy(P, 5.0); // ln 5 closer to ln 4 than ln 8
        assert_eq!(grid.quantize(&TradeAction::Trade(t)), 2);
        let t = Trade::buy(P, 6.0); // ln 6 closer to ln 8
        assert_eq!(grid.quantize(&TradeAction::Trade(t)), 3);
        // A sell is offset by the bucket count and measured in USD value.
        let t = Trade::sell(P, 5.0 / 100.0);
        assert_eq!(grid.quantize(&TradeAction::Trade(t)), 11 + 2);
        assert_eq!(grid.quantize(&TradeAction::Hold), grid.hold_index());
    }

    #[test]
    fn grid_trades_quantize_to_themselves() {
        let grid = TradeGrid::default_grid(P, 10_000.0, 0.003, 0.1, 100.0);
        for (i, t) in grid.trades().iter().enumerate() {
            assert_eq!(grid.quantize(&TradeAction::Trade(t.clone())), i);
        }
    }
}
