//! Value-extraction policies parameterized by information.
//!
//! The same sandwich-with-size-search policy serves both the privileged
//! extractor (who knows the victim's exact trade) and a public observer
//! (who only holds a belief induced by the victim's disclosure level).
//! The two differ only in the belief they plan against.

use crate::coinalg::TradeDistribution;
use crate::market::{Balance, PlayerId, Trade, TradeAction, TradeDirection, WorldState};
use crate::search::golden_section_max;

use super::sandwich::{
    sandwich_profit_directed, SIZE_SEARCH_ITERS, SIZE_SEARCH_TOL,
};

/// What the extractor believes about the victim's next trade.
#[derive(Clone, Debug, PartialEq)]
pub enum Belief {
    /// The exact action (a perfect prediction).
    Exact(TradeAction),
    /// A distribution over actions (induced by a public view).
    Induced(TradeDistribution),
}

/// The extraction policy family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtractionPolicy {
    /// Never trades.
    Null,
    /// Sandwich with golden-section size search, abstaining when the best
    /// expected profit is not positive.
    SandwichSearch,
}

/// A planned frontrun; the backrun is sized at execution from the
/// realized fill.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractionPlan {
    pub frontrun: Trade,
    pub expected_profit: f64,
}

/// Plan extraction for one epoch. Returns `None` when the policy
/// abstains.
pub fn plan_extraction(
    policy: ExtractionPolicy,
    world: &WorldState,
    adversary: PlayerId,
    capital: Balance,
    belief: &Belief,
) -> Option<ExtractionPlan> {
    match policy {
        ExtractionPolicy::Null => None,
        ExtractionPolicy::SandwichSearch => match belief {
            Belief::Exact(TradeAction::Hold) => None,
            Belief::Exact(TradeAction::Trade(victim)) => {
                let cap = direction_capital(capital, victim.direction);
                let best = golden_section_max(
                    |x| sandwich_profit_directed(world, Some(victim), victim.direction, x, adversary),
                    0.0,
                    cap,
                    SIZE_SEARCH_TOL,
                    SIZE_SEARCH_ITERS,
                );
                build_plan(adversary, victim.direction, best.argmax, best.value)
            }
            Belief::Induced(dist) => {
                let mut best: Option<(TradeDirection, f64, f64)> = None;
                for direction in [TradeDirection::BuyTok, TradeDirection::SellTok] {
                    let cap = direction_capital(capital, direction);
                    if cap <= 0.0 {
                        continue;
                    }
                    let r = golden_section_max(
                        |x| expected_profit(world, dist, direction, x, adversary),
                        0.0,
                        cap,
                        SIZE_SEARCH_TOL,
                        SIZE_SEARCH_ITERS,
                    );
                    if best.as_ref().map_or(true, |b| r.value > b.2) {
                        best = Some((direction, r.argmax, r.value));
                    }
                }
                let (direction, x, value) = best?;
                build_plan(adversary, direction, x, value)
            }
        },
    }
}

/// Expected sandwich profit of input `x` in `direction` when the victim
/// trade is drawn from `dist`. Victims trading the other way (and
/// hold epochs) count against the plan.
fn expected_profit(
    world: &WorldState,
    dist: &TradeDistribution,
    direction: TradeDirection,
    x: f64,
    adversary: PlayerId,
) -> f64 {
    dist.support()
        .iter()
        .zip(dist.probs())
        .filter(|(_, &p)| p > 0.0)
        .map(|(action, &p)| {
            p * sandwich_profit_directed(world, action.as_trade(), direction, x, adversary)
        })
        .sum()
}

fn direction_capital(capital: Balance, direction: TradeDirection) -> f64 {
    match direction {
        TradeDirection::BuyTok => capital.usd.max(0.0),
        TradeDirection::SellTok => capital.tok.max(0.0),
    }
}

fn build_plan(
    adversary: PlayerId,
    direction: TradeDirection,
    x: f64,
    value: f64,
) -> Option<ExtractionPlan> {
    if x <= 0.0 || value <= 0.0 {
        return None;
    }
    Some(ExtractionPlan {
        frontrun: Trade {
            player: adversary,
            direction,
            amount: x,
            price_limit: None,
        },
        expected_profit: value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coinalg::{induced_distribution, PublicView, TradeGrid};
    use crate::market::PoolState;

    const VICTIM: PlayerId = PlayerId(0);
    const ADV: PlayerId = PlayerId(1);

    fn world() -> WorldState {
        let mut w = WorldState::new(PoolState::new(1_000_000.0, 10_000.0, 0.0005), 0.1);
        w.credit(VICTIM, 50_000.0, 500.0);
        w.credit(ADV, 200_000.0, 2_000.0);
        w
    }

    #[test]
    fn null_policy_never_plans() {
        let w = world();
        let belief = Belief::Exact(TradeAction::Trade(Trade::buy_limit(VICTIM, 20_000.0, 110.0)));
        assert!(plan_extraction(
            ExtractionPolicy::Null,
            &w,
            ADV,
            Balance::new(1e6, 1e4),
            &belief
        )
        .is_none());
    }

    #[test]
    fn exact_belief_plans_a_profitable_sandwich() {
        let w = world();
        let belief = Belief::Exact(TradeAction::Trade(Trade::buy_limit(VICTIM, 20_000.0, 110.0)));
        let plan = plan_extraction(
            ExtractionPolicy::SandwichSearch,
            &w,
            ADV,
            Balance::new(200_000.0, 2_000.0),
            &belief,
        )
        .expect("profitable plan");
        assert_eq!(plan.frontrun.direction, TradeDirection::BuyTok);
        assert!(plan.expected_profit > 0.0);
    }

    #[test]
    fn exact_hold_belief_abstains() {
        let w = world();
        assert!(plan_extraction(
            ExtractionPolicy::SandwichSearch,
            &w,
            ADV,
            Balance::new(1e6, 1e4),
            &Belief::Exact(TradeAction::Hold)
        )
        .is_none());
    }

    #[test]
    fn uniform_belief_abstains_when_noise_dominates() {
        // A symmetric belief over buys and sells of all sizes gives no
        // directional edge; with fees every plan has negative expectation.
        let mut w = WorldState::new(PoolState::new(1_000_000.0, 10_000.0, 0.003), 0.1);
        w.credit(VICTIM, 50_000.0, 500.0);
        w.credit(ADV, 200_000.0, 2_000.0);
        let grid = TradeGrid::default_grid(VICTIM, 50_000.0, 0.003, 0.1, 100.0);
        let belief = induced_distribution(&PublicView::Bot, &grid).unwrap();
        let plan = plan_extraction(
            ExtractionPolicy::SandwichSearch,
            &w,
            ADV,
            Balance::new(200_000.0, 2_000.0),
            &Belief::Induced(belief),
        );
        assert!(plan.is_none(), "uniform belief should abstain: {plan:?}");
    }
}
