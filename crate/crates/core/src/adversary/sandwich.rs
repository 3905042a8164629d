//! Sandwich planning: profit simulation, golden-section sizing, and the
//! fee-abstention rule.

use crate::market::{Block, PlayerId, Trade, TradeDirection, WorldState};
use crate::search::{golden_section_max, SearchResult};

/// Relative interval tolerance for the frontrun size search.
pub const SIZE_SEARCH_TOL: f64 = 1e-6;
/// Iteration cap for the frontrun size search.
pub const SIZE_SEARCH_ITERS: usize = 200;
/// Profit assigned to plans whose simulation is infeasible (e.g. the
/// adversary cannot fund a leg), steering the search away from them.
const INFEASIBLE: f64 = -1e30;

/// A paired frontrun/backrun around a victim trade. Frontrun and backrun
/// are equal-sized in TOK terms: a buy frontrun's backrun sells exactly
/// the TOK acquired, and a sell frontrun's backrun buys it back.
#[derive(Clone, Debug, PartialEq)]
pub struct SandwichPlan {
    pub frontrun: Trade,
    pub backrun: Trade,
    /// The victim trade the plan was sized against, when known.
    pub target: Option<Trade>,
    /// Simulated profit in USD, net of pool fees and transaction fees.
    /// This is the value the abstention decision uses.
    pub expected_profit: f64,
}

impl SandwichPlan {
    /// An empty plan: no trades, no profit.
    pub fn empty(player: PlayerId) -> Self {
        SandwichPlan {
            frontrun: Trade::buy(player, 0.0),
            backrun: Trade::sell(player, 0.0),
            target: None,
            expected_profit: 0.0,
        }
    }

    /// Abstain on zero-size or unprofitable plans.
    pub fn should_abstain(&self) -> bool {
        self.frontrun.amount <= 0.0 || self.expected_profit <= 0.0
    }
}

/// The round-trip fee floor for a sandwich of the given input: twice the
/// pool fee on the input plus two transaction fees. Extraction below this
/// threshold cannot pay for itself.
pub fn abstain_threshold(input: f64, fee_rate: f64, tx_fee: f64) -> f64 {
    2.0 * fee_rate * input + 2.0 * tx_fee
}

/// True when the attack should be skipped: the extractable value does not
/// clear the round-trip fee floor.
pub fn abstain_check(extractable_value: f64, input: f64, fee_rate: f64, tx_fee: f64) -> bool {
    input <= 0.0 || extractable_value <= abstain_threshold(input, fee_rate, tx_fee)
}

/// Simulate a sandwich on a scratch copy of the world and return the
/// adversary's USD delta, net of pool fees and transaction fees.
///
/// The frontrun trades `x` input units in `front_direction`, the victim
/// action (if any) executes under its own price limit (a zero fill is
/// possible), and the backrun unwinds the frontrun's TOK leg. A victim
/// whose balance cannot cover its trade simply does not trade.
pub fn sandwich_profit_directed(
    world: &WorldState,
    victim: Option<&Trade>,
    front_direction: TradeDirection,
    x: f64,
    adversary: PlayerId,
) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let usd_before = world.balance(adversary).usd;
    let front = Trade {
        player: adversary,
        direction: front_direction,
        amount: x,
        price_limit: None,
    };
    let tok_before_front = world.balance(adversary).tok;
    let mut state = match world.apply_block(&Block::single(front)) {
        Ok(s) => s,
        Err(_) => return INFEASIBLE,
    };
    let acquired = match front_direction {
        TradeDirection::BuyTok => state.balance(adversary).tok - tok_before_front,
        TradeDirection::SellTok => x,
    };

    if let Some(v) = victim {
        if let Ok(next) = state.apply_block(&Block::single(v.clone())) {
            state = next;
        }
    }

    let backrun = match front_direction {
        TradeDirection::BuyTok => Trade::sell(adversary, acquired),
        TradeDirection::SellTok => {
            let usd_in =
                state
                    .pool
                    .input_for_exact_output(TradeDirection::BuyTok, acquired, state.pool.fee_rate);
            Trade::buy(adversary, usd_in)
        }
    };
    match state.apply_block(&Block::single(backrun)) {
        Ok(finished) => finished.balance(adversary).usd - usd_before,
        Err(_) => INFEASIBLE,
    }
}

/// Sandwich profit against a known victim trade, frontrunning in the
/// victim's own direction with input `x`.
pub fn sandwich_profit(world: &WorldState, victim: &Trade, x: f64, adversary: PlayerId) -> f64 {
    sandwich_profit_directed(world, Some(victim), victim.direction, x, adversary)
}

/// Golden-section search for the profit-maximizing frontrun input on
/// `[0, capital]`. The profit of a sandwich is unimodal in the input:
/// larger trades extract more until fees and the victim's price limit
/// turn the curve down.
pub fn optimal_frontrun_size(
    world: &WorldState,
    victim: &Trade,
    capital: f64,
    adversary: PlayerId,
) -> SearchResult {
    golden_section_max(
        |x| sandwich_profit(world, victim, x, adversary),
        0.0,
        capital.max(0.0),
        SIZE_SEARCH_TOL,
        SIZE_SEARCH_ITERS,
    )
}

/// Size and simulate the best sandwich against a known victim trade.
pub fn plan_sandwich(
    world: &WorldState,
    victim: &Trade,
    capital: f64,
    adversary: PlayerId,
) -> SandwichPlan {
    let best = optimal_frontrun_size(world, victim, capital, adversary);
    if best.argmax <= 0.0 || best.value <= 0.0 {
        return SandwichPlan {
            target: Some(victim.clone()),
            ..SandwichPlan::empty(adversary)
        };
    }
    let x = best.argmax;
    let front = Trade {
        player: adversary,
        direction: victim.direction,
        amount: x,
        price_limit: None,
    };
    // Recover the backrun size from the frontrun fill.
    let (acquired, _) = world.pool.swap_exact_in(victim.direction, x);
    let backrun = match victim.direction {
        TradeDirection::BuyTok => Trade::sell(adversary, acquired),
        TradeDirection::SellTok => Trade::buy(adversary, 0.0), // sized at execution
    };
    SandwichPlan {
        frontrun: front,
        backrun,
        target: Some(victim.clone()),
        expected_profit: best.value,
    }
}
