//! Deterministic scenario execution.
//!
//! Each block runs a fixed pipeline: covert polling, the adversary's
//! pre-slot, the agent's trade, the adversary's post-slot, profit
//! measurement marked to the path price, then a fee-exempt ghost repeg
//! back to the path. A twin run with the adversary disabled (identical
//! seeds and path) provides the per-block baseline series.

use std::fmt;

use coinalg_core::adversary::{covert_sandwich, plan_sandwich, theft_trade};
use coinalg_core::coinalg::{
    ideal_action, CoinAlg, CovertChannel, CovertSignal, EpochRecord, RandomizingWrapper, Schedule,
    StrategyKind,
};
use coinalg_core::market::{
    Balance, Block, PlayerId, Trade, TradeAction, TradeDirection, WorldState,
};
use coinalg_core::oracle::{repeg_ghost_trade, OracleError, PricePath};

use crate::config::{AdversaryKind, ExperimentConfig, PathSpec, ScheduleSpec};

pub const COINALG: PlayerId = PlayerId(0);
pub const ADVERSARY: PlayerId = PlayerId(1);
pub const GHOST: PlayerId = PlayerId(250);

/// Ghost funding; large enough that corrective trades never overdraw.
const GHOST_FUNDS: f64 = 1.0e15;

/// Blocks a long-range or signal-driven position is held before a forced
/// unwind when the anticipated victim trade never lands.
pub const BACKRUN_TIMEOUT: u64 = 20;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Oracle(#[from] OracleError),

    #[error("block {block}: {message}")]
    Execution { block: u64, message: String },
}

/// What the adversary did in a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdversaryAction {
    None,
    Frontrun,
    Backrun,
    FrontrunBackrun,
    Theft,
    Abstain,
}

impl fmt::Display for AdversaryAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AdversaryAction::None => "none",
            AdversaryAction::Frontrun => "frontrun",
            AdversaryAction::Backrun => "backrun",
            AdversaryAction::FrontrunBackrun => "frontrun+backrun",
            AdversaryAction::Theft => "theft",
            AdversaryAction::Abstain => "abstain",
        };
        write!(f, "{s}")
    }
}

/// One block of the run, marked to the path price.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockRow {
    pub block: u64,
    /// Pool spot after the block's trades, before the ghost repeg.
    pub spot: f64,
    pub coinalg_profit: f64,
    pub adversary_profit: f64,
    pub baseline_profit: f64,
    pub coinalg_traded: bool,
    pub adversary_action: AdversaryAction,
}

/// Run summary: final marks and counts.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub final_coinalg_profit: f64,
    pub final_adversary_profit: f64,
    pub final_baseline_profit: f64,
    /// Baseline minus exposed final profit.
    pub profit_reduction: f64,
    pub coinalg_trades: u64,
    pub adversary_trades: u64,
    pub abstentions: u64,
}

/// Full result of a scenario: per-block series (including the twin
/// baseline), the summary, and the wrapper audit when enabled.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub rows: Vec<BlockRow>,
    pub summary: RunSummary,
    pub wrapper_audit: Option<Vec<EpochRecord>>,
}

/// Profit mark: portfolio value at the path price, in excess of holding
/// the starting portfolio. Pure price drift on initial holdings does not
/// count as profit; trading gains and losses do.
fn mark_profit(balance: Balance, start: Balance, price: f64) -> f64 {
    balance.value_at(price) - start.value_at(price)
}

struct PendingUnwind {
    direction: TradeDirection,
    tok_amount: f64,
    deadline: u64,
}

struct AdversaryState {
    kind: AdversaryKind,
    assumed_impact: f64,
    signal: Option<CovertSignal>,
    pending: Option<PendingUnwind>,
    long_range_target: Option<u64>,
    last_victim_trade: Option<u64>,
    abstained_this_block: bool,
    trades: u64,
    abstentions: u64,
}

impl AdversaryState {
    fn new(kind: AdversaryKind, assumed_impact: f64) -> Self {
        AdversaryState {
            kind,
            assumed_impact,
            signal: None,
            pending: None,
            long_range_target: None,
            last_victim_trade: None,
            abstained_this_block: false,
            trades: 0,
            abstentions: 0,
        }
    }

    fn capital(&self, world: &WorldState) -> Balance {
        let bal = world.balance(ADVERSARY);
        Balance::new((bal.usd - 2.0 * world.tx_fee).max(0.0), bal.tok)
    }

    /// Long-range plans key off the victim's actual (not anticipated)
    /// last trade block.
    fn observe_victim_trade(&mut self, block: u64) {
        self.last_victim_trade = Some(block);
        if self.pending.is_none() {
            self.long_range_target = None;
        }
    }
}

struct SinglePass {
    rows: Vec<(u64, f64, f64, f64, bool, AdversaryAction)>,
    coinalg_trades: u64,
    adversary_trades: u64,
    abstentions: u64,
    wrapper_audit: Option<Vec<EpochRecord>>,
}

/// Run a scenario: the exposed world with the configured adversary plus
/// its twin with the adversary disabled, on the identical path and
/// seeds.
pub fn run_scenario(config: &ExperimentConfig) -> Result<RunResult, ScenarioError> {
    let path = build_path(config)?;
    let exposed = run_single(config, &path, true)?;
    let baseline = run_single(config, &path, false)?;
    debug_assert_eq!(exposed.rows.len(), baseline.rows.len());

    let rows: Vec<BlockRow> = exposed
        .rows
        .iter()
        .zip(&baseline.rows)
        .map(
            |(&(block, spot, coinalg, adversary, traded, action), &(b2, _, base, _, _, _))| {
                debug_assert_eq!(block, b2);
                BlockRow {
                    block,
                    spot,
                    coinalg_profit: coinalg,
                    adversary_profit: adversary,
                    baseline_profit: base,
                    coinalg_traded: traded,
                    adversary_action: action,
                }
            },
        )
        .collect();

    let last = rows.last();
    let summary = RunSummary {
        final_coinalg_profit: last.map_or(0.0, |r| r.coinalg_profit),
        final_adversary_profit: last.map_or(0.0, |r| r.adversary_profit),
        final_baseline_profit: last.map_or(0.0, |r| r.baseline_profit),
        profit_reduction: last.map_or(0.0, |r| r.baseline_profit - r.coinalg_profit),
        coinalg_trades: exposed.coinalg_trades,
        adversary_trades: exposed.adversary_trades,
        abstentions: exposed.abstentions,
    };
    Ok(RunResult {
        rows,
        summary,
        wrapper_audit: exposed.wrapper_audit,
    })
}

pub fn build_path(config: &ExperimentConfig) -> Result<PricePath, ScenarioError> {
    Ok(match &config.path {
        PathSpec::Gbm {
            seed,
            blocks,
            p0,
            drift,
            volatility,
        } => PricePath::generate_gbm(*seed, *blocks, *p0, *drift, *volatility),
        PathSpec::Csv { file } => PricePath::load_csv(file)?,
    })
}

/// Seed derivations: the run seed drives the schedule and wrapper coin
/// streams; the path has its own seed so twin runs share it.
fn schedule_seed(seed: u64) -> u64 {
    seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1)
}

fn wrapper_seed(seed: u64) -> u64 {
    seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(2)
}

fn build_agent(config: &ExperimentConfig, start: u64) -> CoinAlg {
    let schedule = match &config.schedule {
        ScheduleSpec::Fixed { interval } => Schedule::fixed(*interval),
        ScheduleSpec::Poisson { lambda } => {
            Schedule::poisson(*lambda, schedule_seed(config.seed))
        }
    };
    let wrapper = config
        .wrapper_enabled
        .then(|| RandomizingWrapper::new(wrapper_seed(config.seed), config.wrapper_jitter));
    CoinAlg::new(
        COINALG,
        config.strategy_kind,
        config.view,
        config.covert_channel,
        schedule,
        wrapper,
        start,
    )
}

fn run_single(
    config: &ExperimentConfig,
    path: &PricePath,
    with_adversary: bool,
) -> Result<SinglePass, ScenarioError> {
    let start = config.start_offset;
    let end = start + config.window;

    let mut world = WorldState::new(config.pool, config.tx_fee);
    world.credit(COINALG, config.coinalg_usd, config.coinalg_tok);
    world.credit(ADVERSARY, config.adversary_usd, config.adversary_tok);
    world.credit(GHOST, GHOST_FUNDS, GHOST_FUNDS);

    let coinalg_start = world.balance(COINALG);
    let adversary_start = world.balance(ADVERSARY);

    let mut agent = build_agent(config, start);
    let kind = if with_adversary {
        config.adversary
    } else {
        AdversaryKind::None
    };
    let mut adv = AdversaryState::new(kind, config.assumed_impact);

    let mut rows = Vec::with_capacity(config.window as usize);
    let mut coinalg_trades = 0u64;

    for block in start..end {
        let path_price = path.price_at(block)?;
        let mut action_mark = AdversaryAction::None;

        // 1. Covert polling: the signal is emitted by the agent whether
        //    or not anyone listens; only the covert adversary uses it.
        if let Some(signal) = agent.poll_covert(block, &world, path) {
            if adv.kind == AdversaryKind::Covert {
                adv.signal = Some(signal);
            }
        }

        // 2. Adversary pre-slot.
        let pre = adversary_pre_trades(&mut adv, block, &world, path, &agent);
        if !pre.is_empty() {
            action_mark = match adv.kind {
                AdversaryKind::Theft => AdversaryAction::Theft,
                _ => AdversaryAction::Frontrun,
            };
            adv.trades += pre.len() as u64;
        } else if adv.abstained_this_block {
            action_mark = AdversaryAction::Abstain;
        }
        for trade in pre {
            world = apply_or_skip(world, trade);
        }

        // 3. Agent slot.
        let trades = agent.step(block, &world, path);
        let mut traded = false;
        for trade in trades {
            if trade.amount > 0.0 {
                traded = true;
            }
            world = apply_or_skip(world, trade);
        }
        if traded {
            coinalg_trades += 1;
            adv.observe_victim_trade(block);
        }

        // 4. Adversary post-slot.
        let post = adversary_post_trades(&mut adv, block, &world, traded);
        if !post.is_empty() {
            action_mark = match action_mark {
                AdversaryAction::Frontrun => AdversaryAction::FrontrunBackrun,
                _ => AdversaryAction::Backrun,
            };
            adv.trades += post.len() as u64;
        }
        for trade in post {
            world = apply_or_skip(world, trade);
        }

        // 5. Measurement, marked to the path price.
        let coinalg_profit = mark_profit(world.balance(COINALG), coinalg_start, path_price);
        let adversary_profit = mark_profit(world.balance(ADVERSARY), adversary_start, path_price);
        rows.push((
            block,
            world.pool.spot_price(),
            coinalg_profit,
            adversary_profit,
            traded,
            action_mark,
        ));

        // 6. Ghost repeg to the path.
        if let TradeAction::Trade(t) = repeg_ghost_trade(&world.pool, path_price, GHOST) {
            world = world
                .apply_trade_fee_exempt(&t)
                .map_err(|e| ScenarioError::Execution {
                    block,
                    message: e.to_string(),
                })?;
        }
    }

    Ok(SinglePass {
        rows,
        coinalg_trades,
        adversary_trades: adv.trades,
        abstentions: adv.abstentions,
        wrapper_audit: agent.wrapper.as_ref().map(|w| w.audit().to_vec()),
    })
}

/// Apply a trade as a single-trade block, skipping it if invalid (agents
/// cap their trades by balance, so rejections mean a zero-capacity
/// situation rather than a bug).
fn apply_or_skip(world: WorldState, trade: Trade) -> WorldState {
    match world.apply_block(&Block::single(trade)) {
        Ok(next) => next,
        Err(_) => world,
    }
}

fn adversary_pre_trades(
    adv: &mut AdversaryState,
    block: u64,
    world: &WorldState,
    path: &PricePath,
    agent: &CoinAlg,
) -> Vec<Trade> {
    adv.abstained_this_block = false;
    match adv.kind {
        AdversaryKind::None => Vec::new(),
        AdversaryKind::Theft => theft_pre(adv, block, world, path, agent),
        AdversaryKind::Sandwich => {
            if agent.times_public() {
                sandwich_pre(adv, block, world, path, agent)
            } else {
                long_range_pre(adv, block, world, path, agent)
            }
        }
        AdversaryKind::LongRange => long_range_pre(adv, block, world, path, agent),
        AdversaryKind::Covert => covert_pre(adv, block, world),
    }
}

fn theft_pre(
    adv: &mut AdversaryState,
    block: u64,
    world: &WorldState,
    path: &PricePath,
    agent: &CoinAlg,
) -> Vec<Trade> {
    use coinalg_core::coinalg::{public_view, PublicViewKind, TradeDistribution};
    if !agent.times_public() || agent.view != PublicViewKind::Transp {
        return Vec::new();
    }
    if block != agent.next_trade_block() {
        return Vec::new();
    }
    let planned = agent.planned_action(block, world, path);
    if planned.is_hold() {
        return Vec::new();
    }
    let view = public_view(PublicViewKind::Transp, &TradeDistribution::degenerate(planned));
    match theft_trade(&view, adv.capital(world), ADVERSARY) {
        Some(t) if t.amount > 0.0 => vec![t],
        _ => Vec::new(),
    }
}

fn sandwich_pre(
    adv: &mut AdversaryState,
    block: u64,
    world: &WorldState,
    path: &PricePath,
    agent: &CoinAlg,
) -> Vec<Trade> {
    use coinalg_core::coinalg::PublicViewKind;
    if agent.view != PublicViewKind::Transp || block != agent.next_trade_block() {
        return Vec::new();
    }
    let planned = agent.planned_action(block, world, path);
    let victim = match planned.as_trade() {
        Some(t) => t.clone(),
        None => return Vec::new(),
    };
    let capital = adv.capital(world);
    let cap = match victim.direction {
        TradeDirection::BuyTok => capital.usd,
        TradeDirection::SellTok => capital.tok,
    };
    let plan = plan_sandwich(world, &victim, cap, ADVERSARY);
    if plan.should_abstain() {
        adv.abstentions += 1;
        adv.abstained_this_block = true;
        return Vec::new();
    }
    adv.pending = Some(PendingUnwind {
        direction: plan.frontrun.direction,
        tok_amount: frontrun_tok_size(world, &plan.frontrun),
        deadline: block, // same-block backrun
    });
    vec![plan.frontrun]
}

fn long_range_pre(
    adv: &mut AdversaryState,
    block: u64,
    world: &WorldState,
    path: &PricePath,
    agent: &CoinAlg,
) -> Vec<Trade> {
    use coinalg_core::adversary::long_range_target;
    use coinalg_core::coinalg::PublicViewKind;
    if agent.view != PublicViewKind::Transp || adv.pending.is_some() {
        return Vec::new();
    }
    let target = match adv.long_range_target {
        Some(t) => t,
        None => {
            let base = adv.last_victim_trade.unwrap_or(block);
            let t = long_range_target(base, agent.schedule().expected_gap());
            adv.long_range_target = Some(t);
            t
        }
    };
    if block != target {
        return Vec::new();
    }
    adv.long_range_target = None;
    // Simulate the victim's algorithm for this block: the strategy is
    // public, its Poisson timing is not.
    let horizon = agent.schedule().expected_gap().round().max(1.0) as u64;
    let prediction = match path.predict(block, horizon) {
        Ok(p) => p,
        Err(_) => return Vec::new(),
    };
    let hypothetical = ideal_action(world, COINALG, &prediction);
    let victim = match hypothetical.as_trade() {
        Some(t) => t.clone(),
        None => return Vec::new(),
    };
    let capital = adv.capital(world);
    let cap = match victim.direction {
        TradeDirection::BuyTok => capital.usd,
        TradeDirection::SellTok => capital.tok,
    };
    let plan = plan_sandwich(world, &victim, cap, ADVERSARY);
    if plan.should_abstain() {
        adv.abstentions += 1;
        adv.abstained_this_block = true;
        return Vec::new();
    }
    adv.pending = Some(PendingUnwind {
        direction: plan.frontrun.direction,
        tok_amount: frontrun_tok_size(world, &plan.frontrun),
        deadline: block + BACKRUN_TIMEOUT,
    });
    vec![plan.frontrun]
}

fn covert_pre(adv: &mut AdversaryState, block: u64, world: &WorldState) -> Vec<Trade> {
    let signal = match adv.signal {
        Some(s) if s.trade_block() == block => s,
        _ => return Vec::new(),
    };
    adv.signal = None;
    let plan = covert_sandwich(world, &signal, adv.assumed_impact, adv.capital(world), ADVERSARY);
    if plan.should_abstain() {
        adv.abstentions += 1;
        adv.abstained_this_block = true;
        return Vec::new();
    }
    adv.pending = Some(PendingUnwind {
        direction: plan.frontrun.direction,
        tok_amount: frontrun_tok_size(world, &plan.frontrun),
        deadline: block + BACKRUN_TIMEOUT,
    });
    vec![plan.frontrun]
}

/// TOK size of a frontrun: what a buy acquires, or what a sell parts
/// with (to be bought back).
fn frontrun_tok_size(world: &WorldState, frontrun: &Trade) -> f64 {
    match frontrun.direction {
        TradeDirection::BuyTok => world.pool.swap_exact_in(frontrun.direction, frontrun.amount).0,
        TradeDirection::SellTok => frontrun.amount,
    }
}

fn adversary_post_trades(
    adv: &mut AdversaryState,
    block: u64,
    world: &WorldState,
    victim_traded: bool,
) -> Vec<Trade> {
    let due = match &adv.pending {
        Some(p) => victim_traded || block >= p.deadline,
        None => false,
    };
    if !due {
        return Vec::new();
    }
    let pending = adv.pending.take().expect("checked above");
    let trade = match pending.direction {
        TradeDirection::BuyTok => {
            let tok = pending.tok_amount.min(world.balance(ADVERSARY).tok);
            Trade::sell(ADVERSARY, tok)
        }
        TradeDirection::SellTok => {
            let usd = world.pool.input_for_exact_output(
                TradeDirection::BuyTok,
                pending.tok_amount,
                world.pool.fee_rate,
            );
            Trade::buy(ADVERSARY, usd.min(world.balance(ADVERSARY).usd))
        }
    };
    if trade.amount > 0.0 {
        vec![trade]
    } else {
        Vec::new()
    }
}
