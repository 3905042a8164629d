//! Price-prediction trading strategies and the stateful agent driving
//! them on a schedule.
//!
//! The default strategy re-predicts at every trading epoch and holds its
//! position rather than round-tripping: when the predicted price exceeds
//! spot by enough to clear fees, it buys up to the predicted price with a
//! limit at that price, using as much capital as it can. The two-step
//! variant enters at one epoch and unwinds at the next, and accepts an
//! explicit price limit so callers can analyze defensive limit choices.

use std::fmt;
use std::str::FromStr;

use crate::coinalg::{
    PublicViewKind, RandomizingWrapper, Schedule, TradeDistribution,
};
use crate::market::{PlayerId, Trade, TradeAction, TradeDirection, WorldState};
use crate::oracle::{Prediction, PricePath};

/// Blocks between the covert signal and the trade it anticipates.
pub const COVERT_LEAD_BLOCKS: u64 = 10;

/// Which decision rule the agent runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    /// Re-predict each epoch, buy toward the prediction, hold otherwise.
    Ideal,
    /// Buy toward the prediction, sell the position at the next epoch.
    TwoStep,
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ideal" => Ok(StrategyKind::Ideal),
            "two_step" => Ok(StrategyKind::TwoStep),
            other => Err(format!(
                "unknown strategy kind '{other}' (expected ideal or two_step)"
            )),
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyKind::Ideal => write!(f, "ideal"),
            StrategyKind::TwoStep => write!(f, "two_step"),
        }
    }
}

/// Covert-channel configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CovertChannel {
    Off,
    /// One bit per epoch: the anticipated direction of the next trade.
    DirectionBit,
}

impl FromStr for CovertChannel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "off" => Ok(CovertChannel::Off),
            "direction_bit" => Ok(CovertChannel::DirectionBit),
            other => Err(format!(
                "unknown covert channel '{other}' (expected off or direction_bit)"
            )),
        }
    }
}

/// The one-bit covert emission: the anticipated direction of the trade
/// scheduled [`COVERT_LEAD_BLOCKS`] after `emit_block`. Size and limit
/// are never carried.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CovertSignal {
    pub emit_block: u64,
    pub bit: TradeDirection,
}

impl CovertSignal {
    /// The block the anticipated trade is scheduled for.
    pub fn trade_block(&self) -> u64 {
        self.emit_block + COVERT_LEAD_BLOCKS
    }
}

/// The default strategy's action: a limit buy that pushes spot up to the
/// predicted price, capped by capital, or holding when no profitable
/// trade exists (marked to the prediction, net of pool and transaction
/// fees).
pub fn ideal_action(world: &WorldState, player: PlayerId, prediction: &Prediction) -> TradeAction {
    let pool = &world.pool;
    let spot = pool.spot_price();
    let p_hat = prediction.predicted_price;
    if p_hat <= spot {
        return TradeAction::Hold;
    }
    let to_target = pool.buy_input_to_price(p_hat, pool.fee_rate);
    let usd = world.balance(player).usd;
    let budget = to_target.min(usd - world.tx_fee);
    if budget <= 0.0 {
        return TradeAction::Hold;
    }
    let fill = pool.limit_buy(budget, p_hat);
    let profit_at_prediction = fill.received * p_hat - fill.spent - world.tx_fee;
    if profit_at_prediction <= 0.0 {
        return TradeAction::Hold;
    }
    TradeAction::Trade(Trade::buy_limit(player, budget, p_hat))
}

/// Entry trade of the two-step strategy: buy toward the predicted price
/// under an explicit limit. The caller chooses the limit (the predicted
/// price, or a defensive one tick above spot).
pub fn two_step_entry(
    world: &WorldState,
    player: PlayerId,
    prediction: &Prediction,
    p_lim: f64,
) -> TradeAction {
    let pool = &world.pool;
    let spot = pool.spot_price();
    let p_hat = prediction.predicted_price;
    if p_hat <= spot {
        return TradeAction::Hold;
    }
    let to_target = pool.buy_input_to_price(p_hat, pool.fee_rate);
    let budget = to_target.min(world.balance(player).usd - world.tx_fee);
    if budget <= 0.0 {
        return TradeAction::Hold;
    }
    TradeAction::Trade(Trade::buy_limit(player, budget, p_lim))
}

/// The distribution over trades the strategy induces at a state. Both
/// built-in strategies are deterministic, so the distribution is
/// degenerate: a point mass on the chosen trade, or on holding when no
/// profitable trade exists.
pub fn trade_distribution(
    kind: StrategyKind,
    world: &WorldState,
    player: PlayerId,
    prediction: &Prediction,
) -> TradeDistribution {
    let action = match kind {
        StrategyKind::Ideal => ideal_action(world, player, prediction),
        StrategyKind::TwoStep => {
            two_step_entry(world, player, prediction, prediction.predicted_price)
        }
    };
    TradeDistribution::degenerate(action)
}

/// The scheduled trading agent.
#[derive(Clone, Debug)]
pub struct CoinAlg {
    pub player: PlayerId,
    pub kind: StrategyKind,
    pub view: PublicViewKind,
    pub covert: CovertChannel,
    schedule: Schedule,
    next_trade_block: u64,
    last_planned_direction: TradeDirection,
    pub wrapper: Option<RandomizingWrapper>,
    /// Wrapper-jittered trades waiting for their execution block.
    pending: Option<(u64, Vec<Trade>)>,
    epochs_decided: usize,
}

impl CoinAlg {
    pub fn new(
        player: PlayerId,
        kind: StrategyKind,
        view: PublicViewKind,
        covert: CovertChannel,
        mut schedule: Schedule,
        wrapper: Option<RandomizingWrapper>,
        start_block: u64,
    ) -> Self {
        let next_trade_block = schedule.next_trade_block(start_block);
        CoinAlg {
            player,
            kind,
            view,
            covert,
            schedule,
            next_trade_block,
            last_planned_direction: TradeDirection::BuyTok,
            wrapper,
            pending: None,
            epochs_decided: 0,
        }
    }

    pub fn next_trade_block(&self) -> u64 {
        self.next_trade_block
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    pub fn epochs_decided(&self) -> usize {
        self.epochs_decided
    }

    /// Whether the agent's trade times are publicly predictable. Fixed
    /// intervals are; private Poisson draws are not.
    pub fn times_public(&self) -> bool {
        self.schedule.is_fixed()
    }

    /// What the agent would decide at `now`, computed without mutating
    /// any state. This is exactly the computation a transparent observer
    /// can replicate by running the algorithm in parallel.
    pub fn planned_action(&self, now: u64, world: &WorldState, path: &PricePath) -> TradeAction {
        if now != self.next_trade_block {
            return TradeAction::Hold;
        }
        let gap = self.schedule.peek_gap(now);
        match path.predict(now, gap) {
            Ok(prediction) => match self.kind {
                StrategyKind::Ideal => ideal_action(world, self.player, &prediction),
                StrategyKind::TwoStep => {
                    two_step_entry(world, self.player, &prediction, prediction.predicted_price)
                }
            },
            Err(_) => TradeAction::Hold,
        }
    }

    /// Emit the covert direction bit exactly [`COVERT_LEAD_BLOCKS`]
    /// before the next trade. The bit carries the anticipated direction;
    /// when the anticipated action is to hold, it repeats the last
    /// planned direction.
    pub fn poll_covert(
        &mut self,
        now: u64,
        world: &WorldState,
        path: &PricePath,
    ) -> Option<CovertSignal> {
        if self.covert != CovertChannel::DirectionBit {
            return None;
        }
        if now + COVERT_LEAD_BLOCKS != self.next_trade_block {
            return None;
        }
        let horizon = self.schedule.expected_gap().round().max(1.0) as u64;
        let base = path
            .price_at(self.next_trade_block)
            .unwrap_or_else(|_| world.pool.spot_price());
        let bit = match path.predict(self.next_trade_block, horizon) {
            Ok(p) if p.predicted_price > base => TradeDirection::BuyTok,
            Ok(_) if self.kind == StrategyKind::TwoStep => TradeDirection::SellTok,
            _ => self.last_planned_direction,
        };
        self.last_planned_direction = bit;
        Some(CovertSignal {
            emit_block: now,
            bit,
        })
    }

    /// Advance the agent at `now`: returns the trades it submits this
    /// block (a due jittered trade, and/or this epoch's decision).
    pub fn step(&mut self, now: u64, world: &WorldState, path: &PricePath) -> Vec<Trade> {
        let mut submissions = Vec::new();
        if let Some((due, trades)) = &self.pending {
            if *due <= now {
                submissions.extend(trades.clone());
                self.pending = None;
            }
        }
        if now != self.next_trade_block {
            return submissions;
        }

        self.epochs_decided += 1;
        let next = self.schedule.next_trade_block(now);
        let gap = next - now;
        self.next_trade_block = next;

        let prediction = match path.predict(now, gap) {
            Ok(p) => p,
            Err(_) => return submissions,
        };
        let dist = trade_distribution(self.kind, world, self.player, &prediction);
        let (action, delay) = match &mut self.wrapper {
            Some(wrapper) => {
                let planned = wrapper.sample(&dist, now);
                (planned.action, planned.delay_blocks)
            }
            None => (dist.sample(0.0).clone(), 0),
        };
        if let Some(direction) = action.direction() {
            self.last_planned_direction = direction;
        }
        let trades = self.trades_for(&action, world);
        if trades.is_empty() {
            return submissions;
        }
        if delay == 0 {
            submissions.extend(trades);
        } else {
            self.pending = Some((now + delay, trades));
        }
        submissions
    }

    fn trades_for(&self, action: &TradeAction, world: &WorldState) -> Vec<Trade> {
        let mut trades = Vec::new();
        if self.kind == StrategyKind::TwoStep {
            // Unwind the previous epoch's position before re-entering.
            let tok = world.balance(self.player).tok;
            if tok > 0.0 {
                trades.push(Trade::sell(self.player, tok));
            }
        }
        if let TradeAction::Trade(t) = action {
            trades.push(t.clone());
        }
        trades
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::PoolState;
    use approx::assert_relative_eq;

    const P: PlayerId = PlayerId(0);

    fn world(usd: f64) -> WorldState {
        let mut w = WorldState::new(PoolState::new(1000.0, 10.0, 0.0), 0.0);
        w.credit(P, usd, 0.0);
        w
    }

    fn prediction(price: f64) -> Prediction {
        Prediction {
            target_block: 100,
            predicted_price: price,
        }
    }

    #[test]
    fn ideal_buys_up_to_the_prediction() {
        let action = ideal_action(&world(1e6), P, &prediction(121.0));
        match action {
            TradeAction::Trade(t) => {
                assert_eq!(t.direction, TradeDirection::BuyTok);
                assert_relative_eq!(t.amount, 100.0, max_relative = 1e-9);
                assert_eq!(t.price_limit, Some(121.0));
            }
            TradeAction::Hold => panic!("expected a trade"),
        }
    }

    #[test]
    fn ideal_is_capped_by_capital() {
        let action = ideal_action(&world(40.0), P, &prediction(121.0));
        match action {
            TradeAction::Trade(t) => assert_relative_eq!(t.amount, 40.0, max_relative = 1e-12),
            TradeAction::Hold => panic!("expected a trade"),
        }
    }

    #[test]
    fn ideal_holds_when_prediction_is_not_above_spot() {
        assert!(ideal_action(&world(1e6), P, &prediction(100.0)).is_hold());
        assert!(ideal_action(&world(1e6), P, &prediction(90.0)).is_hold());
    }

    #[test]
    fn ideal_holds_when_fees_eat_the_edge() {
        // Fee headroom: a tiny predicted rise cannot cover the fixed fee.
        let mut w = WorldState::new(PoolState::new(1000.0, 10.0, 0.0), 5.0);
        w.credit(P, 1000.0, 0.0);
        assert!(ideal_action(&w, P, &prediction(100.001)).is_hold());
    }

    #[test]
    fn marked_profit_is_non_negative_net_of_fees() {
        // Emitted trades always clear fees when valued at the prediction.
        let mut w = WorldState::new(PoolState::new(1000.0, 10.0, 0.003), 0.5);
        w.credit(P, 500.0, 0.0);
        for p_hat in [100.5, 101.0, 103.0, 110.0, 150.0] {
            if let TradeAction::Trade(t) = ideal_action(&w, P, &prediction(p_hat)) {
                let fill = w.pool.limit_buy(t.amount, p_hat);
                let profit = fill.received * p_hat - fill.spent - w.tx_fee;
                assert!(profit > 0.0, "p_hat {p_hat} emitted an unprofitable trade");
            }
        }
    }

    #[test]
    fn distribution_is_degenerate_on_the_action() {
        let d = trade_distribution(StrategyKind::Ideal, &world(1e6), P, &prediction(121.0));
        assert!(d.is_degenerate());
        assert_eq!(d.len(), 1);
        let d = trade_distribution(StrategyKind::Ideal, &world(1e6), P, &prediction(50.0));
        assert_eq!(d.support()[0], TradeAction::Hold);
    }

    #[test]
    fn agent_trades_on_its_schedule_only() {
        let path = PricePath::generate_gbm(0, 100, 100.0, 0.01, 0.0);
        let w = world(1e6);
        let mut agent = CoinAlg::new(
            P,
            StrategyKind::Ideal,
            PublicViewKind::Transp,
            CovertChannel::Off,
            Schedule::fixed(10),
            None,
            0,
        );
        assert_eq!(agent.next_trade_block(), 10);
        assert!(agent.step(5, &w, &path).is_empty());
        let trades = agent.step(10, &w, &path);
        assert_eq!(trades.len(), 1);
        assert_eq!(agent.next_trade_block(), 20);
    }

    #[test]
    fn planned_action_matches_step_for_fixed_schedules() {
        let path = PricePath::generate_gbm(3, 200, 100.0, 0.005, 0.002);
        let w = world(1e6);
        let mut agent = CoinAlg::new(
            P,
            StrategyKind::Ideal,
            PublicViewKind::Transp,
            CovertChannel::Off,
            Schedule::fixed(25),
            None,
            0,
        );
        let planned = agent.planned_action(25, &w, &path);
        let stepped = agent.step(25, &w, &path);
        match planned {
            TradeAction::Trade(t) => assert_eq!(vec![t], stepped),
            TradeAction::Hold => assert!(stepped.is_empty()),
        }
    }

    #[test]
    fn covert_signal_fires_ten_blocks_ahead_with_the_direction() {
        let path = PricePath::generate_gbm(0, 100, 100.0, 0.01, 0.0);
        let w = world(1e6);
        let mut agent = CoinAlg::new(
            P,
            StrategyKind::Ideal,
            PublicViewKind::Priv,
            CovertChannel::DirectionBit,
            Schedule::fixed(30),
            None,
            0,
        );
        assert!(agent.poll_covert(19, &w, &path).is_none());
        let signal = agent.poll_covert(20, &w, &path).expect("signal at t-10");
        assert_eq!(signal.emit_block, 20);
        assert_eq!(signal.trade_block(), 30);
        assert_eq!(signal.bit, TradeDirection::BuyTok);
        assert!(agent.poll_covert(21, &w, &path).is_none());
    }

    #[test]
    fn covert_repeats_last_direction_when_holding() {
        // Falling path: the strategy holds, the bit repeats the default.
        let path = PricePath::generate_gbm(0, 100, 100.0, -0.01, 0.0);
        let w = world(1e6);
        let mut agent = CoinAlg::new(
            P,
            StrategyKind::Ideal,
            PublicViewKind::Priv,
            CovertChannel::DirectionBit,
            Schedule::fixed(30),
            None,
            0,
        );
        let signal = agent.poll_covert(20, &w, &path).unwrap();
        assert_eq!(signal.bit, TradeDirection::BuyTok);
    }

    #[test]
    fn wrapper_jitter_defers_execution() {
        let path = PricePath::generate_gbm(0, 100, 100.0, 0.01, 0.0);
        let w = world(1e6);
        // Seed chosen so the first jitter draw is a one-block delay.
        let mut delayed_seen = false;
        for seed in 0..16 {
            let mut agent = CoinAlg::new(
                P,
                StrategyKind::Ideal,
                PublicViewKind::Priv,
                CovertChannel::Off,
                Schedule::fixed(10),
                Some(RandomizingWrapper::new(seed, 1)),
                0,
            );
            let at_decision = agent.step(10, &w, &path);
            if at_decision.is_empty() {
                let next = agent.step(11, &w, &path);
                assert_eq!(next.len(), 1);
                delayed_seen = true;
            }
        }
        assert!(delayed_seen, "no seed produced a delayed execution");
    }
}
