//! Trades, trade actions, and blocks.

use std::fmt;

/// One of the two market assets. USD is the numeraire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AssetId {
    Tok,
    Usd,
}

impl fmt::Display for AssetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssetId::Tok => write!(f, "TOK"),
            AssetId::Usd => write!(f, "USD"),
        }
    }
}

/// Identifies a player holding balances and submitting trades.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlayerId(pub u32);

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

/// Swap direction. The input asset follows from the direction: buys are
/// funded in USD, sells in TOK.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TradeDirection {
    BuyTok,
    SellTok,
}

impl TradeDirection {
    pub fn input_asset(&self) -> AssetId {
        match self {
            TradeDirection::BuyTok => AssetId::Usd,
            TradeDirection::SellTok => AssetId::Tok,
        }
    }

    pub fn output_asset(&self) -> AssetId {
        match self {
            TradeDirection::BuyTok => AssetId::Tok,
            TradeDirection::SellTok => AssetId::Usd,
        }
    }

    pub fn opposite(&self) -> TradeDirection {
        match self {
            TradeDirection::BuyTok => TradeDirection::SellTok,
            TradeDirection::SellTok => TradeDirection::BuyTok,
        }
    }
}

impl fmt::Display for TradeDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TradeDirection::BuyTok => write!(f, "buy"),
            TradeDirection::SellTok => write!(f, "sell"),
        }
    }
}

/// A swap of `amount` input-asset units, optionally guarded by a price
/// limit. A limit buy executes only while spot is at or below the limit;
/// a limit sell only while spot is at or above it.
#[derive(Clone, Debug, PartialEq)]
pub struct Trade {
    pub player: PlayerId,
    pub direction: TradeDirection,
    pub amount: f64,
    pub price_limit: Option<f64>,
}

impl Trade {
    pub fn buy(player: PlayerId, usd_in: f64) -> Self {
        Trade {
            player,
            direction: TradeDirection::BuyTok,
            amount: usd_in,
            price_limit: None,
        }
    }

    pub fn sell(player: PlayerId, tok_in: f64) -> Self {
        Trade {
            player,
            direction: TradeDirection::SellTok,
            amount: tok_in,
            price_limit: None,
        }
    }

    pub fn buy_limit(player: PlayerId, usd_in: f64, p_lim: f64) -> Self {
        Trade {
            player,
            direction: TradeDirection::BuyTok,
            amount: usd_in,
            price_limit: Some(p_lim),
        }
    }

    pub fn sell_limit(player: PlayerId, tok_in: f64, p_lim: f64) -> Self {
        Trade {
            player,
            direction: TradeDirection::SellTok,
            amount: tok_in,
            price_limit: Some(p_lim),
        }
    }

    pub fn input_asset(&self) -> AssetId {
        self.direction.input_asset()
    }
}

/// A trade decision: either a concrete trade or holding (no trade).
#[derive(Clone, Debug, PartialEq)]
pub enum TradeAction {
    Hold,
    Trade(Trade),
}

impl TradeAction {
    pub fn is_hold(&self) -> bool {
        matches!(self, TradeAction::Hold)
    }

    pub fn as_trade(&self) -> Option<&Trade> {
        match self {
            TradeAction::Hold => None,
            TradeAction::Trade(t) => Some(t),
        }
    }

    pub fn direction(&self) -> Option<TradeDirection> {
        self.as_trade().map(|t| t.direction)
    }
}

/// An ordered sequence of trades executed atomically. A single invalid
/// trade voids the whole block.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Block {
    pub trades: Vec<Trade>,
}

impl Block {
    pub fn new(trades: Vec<Trade>) -> Self {
        Block { trades }
    }

    pub fn single(trade: Trade) -> Self {
        Block {
            trades: vec![trade],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.trades.is_empty()
    }
}
