//! The blockchain/AMM abstraction: players, balances, trades, blocks,
//! constant-product swap math with fees, price-limited execution, and the
//! closed-form trade-invalidation cost.

mod pool;
mod trade;
mod world;

pub use pool::{invalidation_cost, LimitFill, PoolState, DEFAULT_TICK};
pub use trade::{AssetId, Block, PlayerId, Trade, TradeAction, TradeDirection};
pub use world::{Balance, TradeFill, WorldState};

/// Errors from market operations.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MarketError {
    #[error("domain error: {what}")]
    NonPositiveDomain { what: &'static str },

    #[error(
        "trade {index} rejected: {player} needs {required} {asset} but holds {available}"
    )]
    InsufficientBalance {
        index: usize,
        player: PlayerId,
        asset: AssetId,
        required: f64,
        available: f64,
    },
}
