//! World state: pool, player balances, block height, and block execution.

use std::collections::BTreeMap;

use crate::market::{
    AssetId, Block, MarketError, PlayerId, PoolState, Trade, TradeDirection,
};

/// Per-player holdings of the two assets.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Balance {
    pub usd: f64,
    pub tok: f64,
}

impl Balance {
    pub fn new(usd: f64, tok: f64) -> Self {
        Balance { usd, tok }
    }

    /// Portfolio value marked at the given TOK price.
    pub fn value_at(&self, price: f64) -> f64 {
        self.usd + self.tok * price
    }
}

/// Result of executing one trade inside a block.
#[derive(Clone, Debug, PartialEq)]
pub struct TradeFill {
    pub player: PlayerId,
    pub direction: TradeDirection,
    pub spent: f64,
    pub received: f64,
}

/// Complete market state. All mutating operations are functional: they
/// return a new `WorldState`, leaving the input untouched, so a failed
/// block never leaves partial effects behind.
#[derive(Clone, Debug, PartialEq)]
pub struct WorldState {
    pub pool: PoolState,
    balances: BTreeMap<PlayerId, Balance>,
    pub block_height: u64,
    /// Fixed per-transaction fee in USD, debited from the submitter.
    pub tx_fee: f64,
    /// Sink for collected per-transaction fees.
    pub fees_collected: f64,
}

impl WorldState {
    pub fn new(pool: PoolState, tx_fee: f64) -> Self {
        assert!(tx_fee >= 0.0, "tx fee must be non-negative");
        WorldState {
            pool,
            balances: BTreeMap::new(),
            block_height: 0,
            tx_fee,
            fees_collected: 0.0,
        }
    }

    /// Credit a player with starting funds.
    pub fn credit(&mut self, player: PlayerId, usd: f64, tok: f64) {
        let b = self.balances.entry(player).or_default();
        b.usd += usd;
        b.tok += tok;
    }

    pub fn balance(&self, player: PlayerId) -> Balance {
        self.balances.get(&player).copied().unwrap_or_default()
    }

    pub fn balances(&self) -> impl Iterator<Item = (PlayerId, Balance)> + '_ {
        self.balances.iter().map(|(p, b)| (*p, *b))
    }

    /// Total USD held across players, pool, and the fee sink.
    pub fn total_usd(&self) -> f64 {
        self.balances.values().map(|b| b.usd).sum::<f64>()
            + self.pool.reserve_usd
            + self.fees_collected
    }

    /// Total TOK held across players and the pool.
    pub fn total_tok(&self) -> f64 {
        self.balances.values().map(|b| b.tok).sum::<f64>() + self.pool.reserve_tok
    }

    /// Execute a block. Trades run in order; any invalid trade (a balance
    /// that cannot cover the declared input or the transaction fee) voids
    /// the whole block and the prior state is reported unchanged. Each
    /// executed trade debits the fixed fee from its player in USD.
    pub fn apply_block(&self, block: &Block) -> Result<WorldState, MarketError> {
        let mut next = self.clone();
        for (index, trade) in block.trades.iter().enumerate() {
            next.execute_trade(trade, index)?;
        }
        next.block_height += 1;
        Ok(next)
    }

    /// Execute a single trade without pool or transaction fees. Used by
    /// the simulation's ghost player, whose corrective trades are
    /// bookkeeping rather than market activity.
    pub fn apply_trade_fee_exempt(&self, trade: &Trade) -> Result<WorldState, MarketError> {
        let mut next = self.clone();
        if trade.amount == 0.0 {
            return Ok(next);
        }
        let balance = next.balance(trade.player);
        let available = match trade.direction {
            TradeDirection::BuyTok => balance.usd,
            TradeDirection::SellTok => balance.tok,
        };
        if available < trade.amount {
            return Err(MarketError::InsufficientBalance {
                index: 0,
                player: trade.player,
                asset: trade.input_asset(),
                required: trade.amount,
                available,
            });
        }
        let (received, pool) =
            next.pool
                .swap_exact_in_with_fee(trade.direction, trade.amount, 0.0);
        next.pool = pool;
        let entry = next.balances.entry(trade.player).or_default();
        match trade.direction {
            TradeDirection::BuyTok => {
                entry.usd -= trade.amount;
                entry.tok += received;
            }
            TradeDirection::SellTok => {
                entry.tok -= trade.amount;
                entry.usd += received;
            }
        }
        Ok(next)
    }

    fn execute_trade(&mut self, trade: &Trade, index: usize) -> Result<TradeFill, MarketError> {
        debug_assert!(trade.amount >= 0.0, "negative trade amount");
        if trade.amount == 0.0 {
            // A zero-amount trade is never submitted, so no fee applies.
            return Ok(TradeFill {
                player: trade.player,
                direction: trade.direction,
                spent: 0.0,
                received: 0.0,
            });
        }
        let balance = self.balance(trade.player);
        let available = match trade.direction {
            TradeDirection::BuyTok => balance.usd,
            TradeDirection::SellTok => balance.tok,
        };
        if available < trade.amount {
            return Err(MarketError::InsufficientBalance {
                index,
                player: trade.player,
                asset: trade.input_asset(),
                required: trade.amount,
                available,
            });
        }

        // Price-limited trades fill partially up to the limit; a zero
        // fill is valid and still pays the transaction fee.
        let (spent, received, pool) = match (trade.direction, trade.price_limit) {
            (TradeDirection::BuyTok, Some(p_lim)) => {
                let fill = self.pool.limit_buy(trade.amount, p_lim);
                (fill.spent, fill.received, fill.pool)
            }
            (TradeDirection::SellTok, Some(p_lim)) => {
                let fill = self.pool.limit_sell(trade.amount, p_lim);
                (fill.spent, fill.received, fill.pool)
            }
            (direction, None) => {
                let (out, pool) = self.pool.swap_exact_in(direction, trade.amount);
                (trade.amount, out, pool)
            }
        };

        self.pool = pool;
        let entry = self.balances.entry(trade.player).or_default();
        match trade.direction {
            TradeDirection::BuyTok => {
                entry.usd -= spent;
                entry.tok += received;
            }
            TradeDirection::SellTok => {
                entry.tok -= spent;
                entry.usd += received;
            }
        }
        entry.usd -= self.tx_fee;
        self.fees_collected += self.tx_fee;
        if entry.usd < 0.0 {
            return Err(MarketError::InsufficientBalance {
                index,
                player: trade.player,
                asset: AssetId::Usd,
                required: self.tx_fee,
                available: entry.usd + self.tx_fee,
            });
        }
        Ok(TradeFill {
            player: trade.player,
            direction: trade.direction,
            spent,
            received,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const P: PlayerId = PlayerId(0);
    const Q: PlayerId = PlayerId(1);

    fn world() -> WorldState {
        let mut w = WorldState::new(PoolState::new(1000.0, 10.0, 0.0), 0.0);
        w.credit(P, 100.0, 0.0);
        w
    }

    #[test]
    fn empty_block_only_advances_height() {
        let w = world();
        let next = w.apply_block(&Block::default()).unwrap();
        assert_eq!(next.block_height, w.block_height + 1);
        assert_eq!(next.pool, w.pool);
        assert_eq!(next.balance(P), w.balance(P));
    }

    #[test]
    fn buy_spends_usd_and_credits_tok() {
        let next = world().apply_block(&Block::single(Trade::buy(P, 100.0))).unwrap();
        let b = next.balance(P);
        assert_relative_eq!(b.usd, 0.0, epsilon = 1e-12);
        assert_relative_eq!(b.tok, 0.909090909090909, max_relative = 1e-12);
        assert_relative_eq!(next.pool.reserve_usd, 1100.0, max_relative = 1e-12);
    }

    #[test]
    fn overdrawn_trade_voids_the_block() {
        let w = world();
        let err = w
            .apply_block(&Block::new(vec![
                Trade::buy(P, 50.0),
                Trade::buy(P, 200.0),
            ]))
            .unwrap_err();
        match err {
            MarketError::InsufficientBalance { index, player, .. } => {
                assert_eq!(index, 1);
                assert_eq!(player, P);
            }
            other => panic!("unexpected error: {other}"),
        }
        // Original world is untouched.
        assert_eq!(w.balance(P).usd, 100.0);
        assert_eq!(w.block_height, 0);
    }

    #[test]
    fn tx_fee_is_debited_per_trade() {
        let mut w = WorldState::new(PoolState::new(1000.0, 10.0, 0.0), 0.25);
        w.credit(P, 100.0, 0.0);
        let next = w
            .apply_block(&Block::single(Trade::buy(P, 50.0)))
            .unwrap();
        assert_relative_eq!(next.balance(P).usd, 49.75, max_relative = 1e-12);
        assert_relative_eq!(next.fees_collected, 0.25, max_relative = 1e-12);
    }

    #[test]
    fn zero_fill_still_pays_the_fee() {
        let mut w = WorldState::new(PoolState::new(1000.0, 10.0, 0.0), 0.25);
        w.credit(P, 100.0, 0.0);
        // Limit already breached: spends nothing but the fee.
        let next = w
            .apply_block(&Block::single(Trade::buy_limit(P, 50.0, 90.0)))
            .unwrap();
        assert_relative_eq!(next.balance(P).usd, 99.75, max_relative = 1e-12);
        assert_eq!(next.balance(P).tok, 0.0);
    }

    #[test]
    fn assets_are_conserved_by_blocks() {
        let mut w = WorldState::new(PoolState::new(1000.0, 10.0, 0.003), 0.1);
        w.credit(P, 500.0, 2.0);
        w.credit(Q, 300.0, 1.0);
        let next = w
            .apply_block(&Block::new(vec![
                Trade::buy(P, 200.0),
                Trade::sell(Q, 1.0),
                Trade::buy_limit(P, 100.0, 150.0),
            ]))
            .unwrap();
        assert_relative_eq!(next.total_usd(), w.total_usd(), max_relative = 1e-12);
        assert_relative_eq!(next.total_tok(), w.total_tok(), max_relative = 1e-12);
    }

    #[test]
    fn fee_exempt_trade_hits_target_exactly() {
        let mut w = WorldState::new(PoolState::new(1000.0, 10.0, 0.003), 0.1);
        w.credit(Q, 1e9, 1e9);
        let x = w.pool.buy_input_to_price(121.0, 0.0);
        let next = w.apply_trade_fee_exempt(&Trade::buy(Q, x)).unwrap();
        assert_relative_eq!(next.pool.spot_price(), 121.0, max_relative = 1e-9);
        assert_eq!(next.fees_collected, 0.0);
    }
}
