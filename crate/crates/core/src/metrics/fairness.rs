//! The two-fork value-extraction game and the statistics built on it.
//!
//! Per trial, two transcripts run from the same starting state over the
//! same price path. In each epoch the algorithm's trade is interleaved
//! between an extractor's frontrun and backrun; the extractor on one
//! fork is information-privileged (a prediction oracle), the player on
//! the other holds only the public view. The advantage statistic is the
//! empirical probability that the privileged fork extracts more than
//! `alpha` beyond the public fork. A fee-exempt ghost repegs the pool to
//! the path at epoch boundaries so the prediction oracle stays exact,
//! mirroring the restore-then-compensate simulation method.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adversary::{plan_extraction, Belief, ExtractionPlan, ExtractionPolicy};
use crate::coinalg::{
    induced_distribution, public_view, trade_distribution, PublicView, PublicViewKind,
    StrategyKind, TradeDistribution, TradeGrid,
};
use crate::market::{
    Balance, Block, PlayerId, PoolState, Trade, TradeAction, TradeDirection, WorldState,
};
use crate::metrics::{binomial_half_width, MetricsError};
use crate::oracle::{repeg_ghost_trade, PricePath};

/// The algorithm's player id inside metric scenarios.
pub const COINALG_PLAYER: PlayerId = PlayerId(0);
/// The extractor (privileged or public) player id.
pub const EXTRACTOR_PLAYER: PlayerId = PlayerId(1);
/// The fee-exempt corrective player.
pub const GHOST_PLAYER: PlayerId = PlayerId(250);

/// What the extractor knows before choosing its block pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Information {
    /// Exact advance knowledge of the sampled trade.
    PerfectOracle,
    /// Only the public view at the given disclosure level.
    View(PublicViewKind),
}

/// A reproducible extraction scenario: starting market, player funding,
/// epoch spacing, strategy, and the per-trial synthetic path.
#[derive(Clone, Debug)]
pub struct FairScenario {
    pub pool: PoolState,
    pub tx_fee: f64,
    pub coinalg_usd: f64,
    pub coinalg_tok: f64,
    pub extractor_usd: f64,
    pub extractor_tok: f64,
    pub epoch_gap: u64,
    pub strategy: StrategyKind,
    pub drift: f64,
    pub volatility: f64,
    pub grid: TradeGrid,
}

impl FairScenario {
    /// The reference scenario: a liquid pool with a modest fee, a
    /// well-funded extractor, and a steadily rising path that makes the
    /// prediction-following strategy reliably profitable.
    pub fn reference() -> Self {
        let pool = PoolState::new(1_000_000.0, 10_000.0, 0.0005);
        let coinalg_usd = 50_000.0;
        let tx_fee = 0.1;
        let grid = TradeGrid::default_grid(
            COINALG_PLAYER,
            coinalg_usd,
            pool.fee_rate,
            tx_fee,
            pool.spot_price(),
        );
        FairScenario {
            pool,
            tx_fee,
            coinalg_usd,
            coinalg_tok: 0.0,
            extractor_usd: 200_000.0,
            extractor_tok: 2_000.0,
            epoch_gap: 600,
            strategy: StrategyKind::Ideal,
            drift: 3.0e-5,
            volatility: 1.0e-4,
            grid,
        }
    }

    /// A deep-liquidity variant: the same trader is a drop in the ocean,
    /// so per-trade extractable value sinks below the fee floor.
    pub fn deep_liquidity() -> Self {
        let mut s = Self::reference();
        s.pool = PoolState::new(4.0e9, 4.0e7, 0.003);
        s.grid = TradeGrid::default_grid(
            COINALG_PLAYER,
            s.coinalg_usd,
            s.pool.fee_rate,
            s.tx_fee,
            s.pool.spot_price(),
        );
        s
    }

    fn initial_world(&self) -> WorldState {
        let mut world = WorldState::new(self.pool, self.tx_fee);
        world.credit(COINALG_PLAYER, self.coinalg_usd, self.coinalg_tok);
        world.credit(EXTRACTOR_PLAYER, self.extractor_usd, self.extractor_tok);
        world.credit(GHOST_PLAYER, 1.0e15, 1.0e13);
        world
    }

    fn path_for_trial(&self, seed: u64, duration: usize) -> PricePath {
        let blocks = self.epoch_gap * (duration as u64 + 2) + 1;
        PricePath::generate_gbm(
            seed,
            blocks,
            self.pool.spot_price(),
            self.drift,
            self.volatility,
        )
    }
}

/// Experiment parameters: epochs per trial, the extraction threshold,
/// the trial count, and the seed that derives each trial's path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FairGameParams {
    pub duration: usize,
    pub alpha: f64,
    pub trials: usize,
    pub base_seed: u64,
}

/// Advantage statistic with its binomial confidence half-width.
#[derive(Clone, Debug, PartialEq)]
pub struct AdvantageReport {
    /// Empirical probability that `|v_A - v_P| > alpha`.
    pub advantage: f64,
    pub mean_v_adversary: f64,
    pub mean_v_baseline: f64,
    pub trials: usize,
    /// 95% binomial half-width of the advantage estimate.
    pub half_width: f64,
}

/// Value deltas of one fork pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrialOutcome {
    pub v_adversary: f64,
    pub v_baseline: f64,
}

/// How per-epoch beliefs are produced inside a fork.
enum BeliefChannel {
    /// The exact sampled action.
    Oracle,
    /// Belief induced by the public view (exact distribution under full
    /// transparency).
    View(PublicViewKind),
    /// A point prediction sampled from the true distribution.
    SampleTrue,
    /// A point prediction sampled from the view-induced distribution.
    SampleInduced(PublicViewKind),
}

impl BeliefChannel {
    fn belief(
        &self,
        dist: &TradeDistribution,
        action: &TradeAction,
        grid: &TradeGrid,
        rng: &mut ChaCha8Rng,
    ) -> Result<Belief, MetricsError> {
        use rand::Rng;
        Ok(match self {
            BeliefChannel::Oracle => Belief::Exact(action.clone()),
            BeliefChannel::View(kind) => match public_view(*kind, dist) {
                PublicView::Full(full) => Belief::Induced(full),
                view => Belief::Induced(induced_distribution(&view, grid)?),
            },
            BeliefChannel::SampleTrue => {
                Belief::Exact(dist.sample(rng.gen::<f64>()).clone())
            }
            BeliefChannel::SampleInduced(kind) => {
                let view = public_view(*kind, dist);
                let induced = match view {
                    PublicView::Full(full) => full,
                    other => induced_distribution(&other, grid)?,
                };
                Belief::Exact(induced.sample(rng.gen::<f64>()).clone())
            }
        })
    }
}

impl From<Information> for BeliefChannel {
    fn from(info: Information) -> Self {
        match info {
            Information::PerfectOracle => BeliefChannel::Oracle,
            Information::View(kind) => BeliefChannel::View(kind),
        }
    }
}

/// Run one fork for `duration` epochs and return the extractor's USD
/// delta.
fn run_fork(
    scenario: &FairScenario,
    path: &PricePath,
    duration: usize,
    policy: ExtractionPolicy,
    channel: &BeliefChannel,
    rng: &mut ChaCha8Rng,
) -> Result<f64, MetricsError> {
    let mut world = scenario.initial_world();
    let start_usd = world.balance(EXTRACTOR_PLAYER).usd;
    let mut now = 0u64;
    for _ in 0..duration {
        let prediction = path.predict(now, scenario.epoch_gap)?;
        let dist = trade_distribution(scenario.strategy, &world, COINALG_PLAYER, &prediction);
        let action = dist.sample(0.0).clone();
        let belief = channel.belief(&dist, &action, &scenario.grid, rng)?;

        let bal = world.balance(EXTRACTOR_PLAYER);
        let capital = Balance::new(
            (bal.usd - 2.0 * world.tx_fee).max(0.0),
            bal.tok,
        );
        let plan = plan_extraction(policy, &world, EXTRACTOR_PLAYER, capital, &belief);
        world = execute_epoch(&world, plan.as_ref(), action.as_trade())?;

        now += scenario.epoch_gap;
        let target = path.price_at(now)?;
        if let TradeAction::Trade(t) = repeg_ghost_trade(&world.pool, target, GHOST_PLAYER) {
            world = world.apply_trade_fee_exempt(&t)?;
        }
    }
    Ok(world.balance(EXTRACTOR_PLAYER).usd - start_usd)
}

/// Execute one epoch's interleaving: frontrun, the algorithm's trade,
/// then the unwinding backrun.
fn execute_epoch(
    world: &WorldState,
    plan: Option<&ExtractionPlan>,
    victim: Option<&Trade>,
) -> Result<WorldState, MetricsError> {
    let mut state = world.clone();
    let mut unwind: Option<Trade> = None;
    if let Some(p) = plan {
        let tok_before = state.balance(EXTRACTOR_PLAYER).tok;
        if let Ok(next) = state.apply_block(&Block::single(p.frontrun.clone())) {
            state = next;
            unwind = Some(match p.frontrun.direction {
                TradeDirection::BuyTok => Trade::sell(
                    EXTRACTOR_PLAYER,
                    state.balance(EXTRACTOR_PLAYER).tok - tok_before,
                ),
                TradeDirection::SellTok => {
                    // Buy back the TOK sold; sized at execution.
                    Trade::buy(EXTRACTOR_PLAYER, 0.0)
                }
            });
        }
    }
    if let Some(v) = victim {
        if let Ok(next) = state.apply_block(&Block::single(v.clone())) {
            state = next;
        }
    }
    if let Some(mut back) = unwind {
        if back.direction == TradeDirection::BuyTok {
            let plan_front_amount = plan.map(|p| p.frontrun.amount).unwrap_or(0.0);
            back.amount = state.pool.input_for_exact_output(
                TradeDirection::BuyTok,
                plan_front_amount,
                state.pool.fee_rate,
            );
        }
        if back.amount > 0.0 {
            if let Ok(next) = state.apply_block(&Block::single(back)) {
                state = next;
            }
        }
    }
    Ok(state)
}

/// Run the two-fork game: the adversary fork with `adversary_info`, the
/// baseline fork with `baseline_info`, both running their configured
/// policies; report the empirical advantage at `params.alpha`.
pub fn fair_game_run(
    scenario: &FairScenario,
    params: &FairGameParams,
    adversary_policy: ExtractionPolicy,
    adversary_info: Information,
    baseline_policy: ExtractionPolicy,
    baseline_info: Information,
) -> Result<AdvantageReport, MetricsError> {
    let mut successes = 0usize;
    let mut sum_a = 0.0;
    let mut sum_p = 0.0;
    for trial in 0..params.trials {
        let outcome = run_trial_pair(
            scenario,
            params,
            trial,
            adversary_policy,
            &BeliefChannel::from(adversary_info),
            baseline_policy,
            &BeliefChannel::from(baseline_info),
        )?;
        sum_a += outcome.v_adversary;
        sum_p += outcome.v_baseline;
        if (outcome.v_adversary - outcome.v_baseline).abs() > params.alpha {
            successes += 1;
        }
    }
    let advantage = successes as f64 / params.trials.max(1) as f64;
    Ok(AdvantageReport {
        advantage,
        mean_v_adversary: sum_a / params.trials.max(1) as f64,
        mean_v_baseline: sum_p / params.trials.max(1) as f64,
        trials: params.trials,
        half_width: binomial_half_width(advantage, params.trials),
    })
}

fn run_trial_pair(
    scenario: &FairScenario,
    params: &FairGameParams,
    trial: usize,
    adversary_policy: ExtractionPolicy,
    adversary_channel: &BeliefChannel,
    baseline_policy: ExtractionPolicy,
    baseline_channel: &BeliefChannel,
) -> Result<TrialOutcome, MetricsError> {
    let seed = params.base_seed.wrapping_add(trial as u64);
    let path = scenario.path_for_trial(seed, params.duration);
    let mut rng_a = ChaCha8Rng::seed_from_u64(seed ^ 0xA);
    let mut rng_p = ChaCha8Rng::seed_from_u64(seed ^ 0x50);
    let v_adversary = run_fork(
        scenario,
        &path,
        params.duration,
        adversary_policy,
        adversary_channel,
        &mut rng_a,
    )?;
    let v_baseline = run_fork(
        scenario,
        &path,
        params.duration,
        baseline_policy,
        baseline_channel,
        &mut rng_p,
    )?;
    Ok(TrialOutcome {
        v_adversary,
        v_baseline,
    })
}

/// Mean extraction of a perfect-oracle sandwicher over the trials: the
/// full-knowledge extractable value of the scenario.
pub fn full_knowledge_extractable_value(
    scenario: &FairScenario,
    params: &FairGameParams,
) -> Result<f64, MetricsError> {
    mean_extraction(scenario, params, ExtractionPolicy::SandwichSearch, BeliefChannel::Oracle)
}

fn mean_extraction(
    scenario: &FairScenario,
    params: &FairGameParams,
    policy: ExtractionPolicy,
    channel: BeliefChannel,
) -> Result<f64, MetricsError> {
    let mut sum = 0.0;
    for trial in 0..params.trials {
        let seed = params.base_seed.wrapping_add(trial as u64);
        let path = scenario.path_for_trial(seed, params.duration);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA);
        sum += run_fork(scenario, &path, params.duration, policy, &channel, &mut rng)?;
    }
    Ok(sum / params.trials.max(1) as f64)
}

/// Fraction of the full-knowledge extractable value achievable with only
/// the public view, clamped to [0, 1]. Errors when the full-knowledge
/// value is not positive.
pub fn financial_utility(
    scenario: &FairScenario,
    params: &FairGameParams,
    view: PublicViewKind,
) -> Result<f64, MetricsError> {
    let total = full_knowledge_extractable_value(scenario, params)?;
    if total <= 0.0 {
        return Err(MetricsError::UndefinedUtility);
    }
    let with_view = mean_extraction(
        scenario,
        params,
        ExtractionPolicy::SandwichSearch,
        BeliefChannel::View(view),
    )?;
    Ok((with_view / total).clamp(0.0, 1.0))
}

/// Outcome of the executable reduction: the rate of above-threshold
/// extraction when predictions are drawn from the true distribution
/// versus the view-induced one, and their separation.
#[derive(Clone, Debug, PartialEq)]
pub struct DistinguisherReport {
    pub p_true: f64,
    pub p_induced: f64,
    /// `|p_true - p_induced|`: the empirical distinguishing advantage.
    pub advantage: f64,
    pub trials: usize,
}

/// The unfairness-to-privacy reduction, run as an experiment: answer the
/// extractor's prediction queries from an unknown distribution (the true
/// one or the view-induced one), run the extraction game, and output 1
/// when more than `alpha` is extracted. A large gap between the two
/// output rates distinguishes the distributions.
pub fn privacy_distinguisher(
    scenario: &FairScenario,
    params: &FairGameParams,
    view: PublicViewKind,
) -> Result<DistinguisherReport, MetricsError> {
    let p_true = extraction_rate(scenario, params, BeliefChannel::SampleTrue)?;
    let p_induced = extraction_rate(scenario, params, BeliefChannel::SampleInduced(view))?;
    Ok(DistinguisherReport {
        p_true,
        p_induced,
        advantage: (p_true - p_induced).abs(),
        trials: params.trials,
    })
}

fn extraction_rate(
    scenario: &FairScenario,
    params: &FairGameParams,
    channel: BeliefChannel,
) -> Result<f64, MetricsError> {
    let mut hits = 0usize;
    for trial in 0..params.trials {
        let seed = params.base_seed.wrapping_add(trial as u64);
        let path = scenario.path_for_trial(seed, params.duration);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xD);
        let v = run_fork(
            scenario,
            &path,
            params.duration,
            ExtractionPolicy::SandwichSearch,
            &channel,
            &mut rng,
        )?;
        if v > params.alpha {
            hits += 1;
        }
    }
    Ok(hits as f64 / params.trials.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_params() -> FairGameParams {
        FairGameParams {
            duration: 3,
            alpha: 1.0,
            trials: 20,
            base_seed: 7,
        }
    }

    #[test]
    fn null_versus_null_has_zero_advantage() {
        let scenario = FairScenario::reference();
        let report = fair_game_run(
            &scenario,
            &quick_params(),
            ExtractionPolicy::Null,
            Information::PerfectOracle,
            ExtractionPolicy::Null,
            Information::View(PublicViewKind::Priv),
        )
        .unwrap();
        assert_eq!(report.advantage, 0.0);
        assert_eq!(report.mean_v_adversary, 0.0);
        assert_eq!(report.mean_v_baseline, 0.0);
    }

    #[test]
    fn transparent_symmetry_zeroes_the_advantage() {
        // Both sides get the full view and run the same policy: the forks
        // evolve identically, so the gap is exactly zero.
        let scenario = FairScenario::reference();
        let report = fair_game_run(
            &scenario,
            &quick_params(),
            ExtractionPolicy::SandwichSearch,
            Information::View(PublicViewKind::Transp),
            ExtractionPolicy::SandwichSearch,
            Information::View(PublicViewKind::Transp),
        )
        .unwrap();
        assert_eq!(report.advantage, 0.0);
        assert_eq!(report.mean_v_adversary, report.mean_v_baseline);
    }

    #[test]
    fn oracle_sandwicher_extracts_value() {
        let scenario = FairScenario::reference();
        let params = quick_params();
        let t = full_knowledge_extractable_value(&scenario, &params).unwrap();
        assert!(t > 0.0, "extractable value {t}");
    }

    #[test]
    fn oracle_beats_null_baseline() {
        let scenario = FairScenario::reference();
        let params = FairGameParams {
            duration: 3,
            alpha: 0.5,
            trials: 20,
            base_seed: 11,
        };
        let report = fair_game_run(
            &scenario,
            &params,
            ExtractionPolicy::SandwichSearch,
            Information::PerfectOracle,
            ExtractionPolicy::Null,
            Information::View(PublicViewKind::Priv),
        )
        .unwrap();
        assert!(report.advantage > 0.8, "advantage {}", report.advantage);
        assert!(report.mean_v_adversary > 0.0);
    }

    #[test]
    fn transparent_utility_is_total() {
        let scenario = FairScenario::reference();
        let params = FairGameParams {
            duration: 2,
            alpha: 0.0,
            trials: 5,
            base_seed: 3,
        };
        let u = financial_utility(&scenario, &params, PublicViewKind::Transp).unwrap();
        assert_eq!(u, 1.0);
    }

    #[test]
    fn private_utility_vanishes() {
        let scenario = FairScenario::reference();
        let params = FairGameParams {
            duration: 2,
            alpha: 0.0,
            trials: 5,
            base_seed: 3,
        };
        let u = financial_utility(&scenario, &params, PublicViewKind::Priv).unwrap();
        assert_eq!(u, 0.0);
    }

    #[test]
    fn distinguisher_separates_private_views() {
        let scenario = FairScenario::reference();
        let params = FairGameParams {
            duration: 3,
            alpha: 5.0,
            trials: 30,
            base_seed: 5,
        };
        let r = privacy_distinguisher(&scenario, &params, PublicViewKind::Priv).unwrap();
        assert!(r.p_true > r.p_induced, "true {} induced {}", r.p_true, r.p_induced);
        assert!(r.advantage > 0.5, "advantage {}", r.advantage);
    }

    #[test]
    fn distinguisher_cannot_separate_transparency() {
        let scenario = FairScenario::reference();
        let params = FairGameParams {
            duration: 2,
            alpha: 5.0,
            trials: 20,
            base_seed: 5,
        };
        let r = privacy_distinguisher(&scenario, &params, PublicViewKind::Transp).unwrap();
        assert!(r.advantage <= 0.05, "advantage {}", r.advantage);
    }
}
