//! Adversarial strategies against a disclosed trading algorithm:
//! strategy theft, sandwich sizing, long-range timing, signal-driven
//! blind sandwiches, and grim-trigger trade invalidation.

mod extraction;
mod sandwich;

pub use extraction::{plan_extraction, Belief, ExtractionPlan, ExtractionPolicy};
pub use sandwich::{
    abstain_check, abstain_threshold, optimal_frontrun_size, plan_sandwich, sandwich_profit,
    sandwich_profit_directed, SandwichPlan, SIZE_SEARCH_ITERS, SIZE_SEARCH_TOL,
};

use crate::coinalg::{CovertSignal, PublicView};
use crate::market::{Balance, Block, PlayerId, Trade, TradeDirection, WorldState};

/// Blocks a signal-driven sandwich holds its position before unwinding
/// when the anticipated victim trade never lands.
pub const COVERT_BACKRUN_TIMEOUT: u64 = 20;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum AdversaryError {
    #[error("invalidation needs {required} USD but only {available} is held")]
    InsufficientCapital { required: f64, available: f64 },

    #[error("price limit {p_lim} is below spot {spot}")]
    LimitBelowSpot { p_lim: f64, spot: f64 },
}

/// Copy a fully disclosed trade, scaled to the thief's capital, for
/// execution ahead of the victim. Anything short of full transparency
/// yields nothing to copy.
pub fn theft_trade(view: &PublicView, capital: Balance, adversary: PlayerId) -> Option<Trade> {
    let dist = match view {
        PublicView::Full(dist) => dist,
        _ => return None,
    };
    // The victim's most likely action; for the deterministic strategies
    // this is the single trade that will execute.
    let (action, _) = dist
        .support()
        .iter()
        .zip(dist.probs())
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite probabilities"))?;
    let trade = action.as_trade()?;
    let cap = match trade.direction {
        TradeDirection::BuyTok => capital.usd,
        TradeDirection::SellTok => capital.tok,
    };
    let amount = trade.amount.min(cap);
    if amount <= 0.0 {
        return None;
    }
    Some(Trade {
        player: adversary,
        direction: trade.direction,
        amount,
        price_limit: trade.price_limit,
    })
}

/// Expected block of the victim's next trade under a Poisson schedule
/// with the given mean gap: the adversary frontruns there and backruns
/// once the victim actually trades.
pub fn long_range_target(last_victim_trade_block: u64, mean_gap_blocks: f64) -> u64 {
    last_victim_trade_block + (mean_gap_blocks.round().max(1.0) as u64)
}

/// Blind sandwich from a one-bit direction signal: the frontrun is sized
/// so its own price impact equals `assumed_impact` in the signaled
/// direction, expecting the victim to move the price by the same
/// fraction. The backrun unwinds after the victim trades or after
/// [`COVERT_BACKRUN_TIMEOUT`] blocks.
pub fn covert_sandwich(
    world: &WorldState,
    signal: &CovertSignal,
    assumed_impact: f64,
    capital: Balance,
    adversary: PlayerId,
) -> SandwichPlan {
    if assumed_impact <= 0.0 {
        return SandwichPlan::empty(adversary);
    }
    let pool = &world.pool;
    let spot = pool.spot_price();
    let fee = pool.fee_rate;
    let (front_input, cap) = match signal.bit {
        TradeDirection::BuyTok => (
            pool.buy_input_to_price(spot * (1.0 + assumed_impact), fee),
            capital.usd,
        ),
        TradeDirection::SellTok => (
            pool.sell_input_to_price(spot * (1.0 - assumed_impact), fee),
            capital.tok,
        ),
    };
    let front_input = front_input.min(cap);
    if front_input <= 0.0 {
        return SandwichPlan::empty(adversary);
    }
    let frontrun = Trade {
        player: adversary,
        direction: signal.bit,
        amount: front_input,
        price_limit: None,
    };

    // Expected profit against the assumed victim: a trade in the signaled
    // direction moving the post-frontrun price by the assumed impact.
    let phantom = PlayerId(u32::MAX);
    let mut scratch = world.clone();
    scratch.credit(phantom, f64::MAX / 4.0, f64::MAX / 4.0);
    let (_, after_front) = pool.swap_exact_in(signal.bit, front_input);
    let assumed_spot = after_front.spot_price();
    let victim_input = match signal.bit {
        TradeDirection::BuyTok => {
            after_front.buy_input_to_price(assumed_spot * (1.0 + assumed_impact), fee)
        }
        TradeDirection::SellTok => {
            after_front.sell_input_to_price(assumed_spot * (1.0 - assumed_impact), fee)
        }
    };
    let assumed_victim = Trade {
        player: phantom,
        direction: signal.bit,
        amount: victim_input,
        price_limit: None,
    };
    let expected_profit = sandwich_profit_directed(
        &scratch,
        Some(&assumed_victim),
        signal.bit,
        front_input,
        adversary,
    );

    let (acquired, _) = pool.swap_exact_in(signal.bit, front_input);
    let backrun = match signal.bit {
        TradeDirection::BuyTok => Trade::sell(adversary, acquired),
        TradeDirection::SellTok => Trade::buy(adversary, 0.0), // sized at execution
    };
    SandwichPlan {
        frontrun,
        backrun,
        target: None,
        expected_profit,
    }
}

/// The minimal buy that lifts spot strictly above `p_lim` (one tick
/// beyond it), invalidating any limit order at `p_lim`. Fails when the
/// adversary cannot fund the push.
pub fn grim_invalidate(
    world: &WorldState,
    p_lim: f64,
    adversary: PlayerId,
) -> Result<Trade, AdversaryError> {
    let pool = &world.pool;
    let spot = pool.spot_price();
    if p_lim < spot {
        return Err(AdversaryError::LimitBelowSpot { p_lim, spot });
    }
    let target = p_lim + pool.tick;
    let cost = pool.buy_input_to_price(target, pool.fee_rate);
    let available = world.balance(adversary).usd;
    let required = cost + world.tx_fee;
    if available < required {
        return Err(AdversaryError::InsufficientCapital {
            required,
            available,
        });
    }
    Ok(Trade::buy(adversary, cost))
}

/// Check that applying `trade` leaves any limit order at `p_lim` with a
/// zero fill (used in tests and the equilibrium scan).
pub fn invalidates(world: &WorldState, trade: &Trade, p_lim: f64) -> bool {
    match world.apply_block(&Block::single(trade.clone())) {
        Ok(next) => next.pool.spot_price() > p_lim,
        Err(_) => false,
    }
}
