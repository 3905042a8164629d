//! Equilibrium analysis of the sandwich interaction: the one-shot
//! leader/follower game with a defensive one-tick limit, the stylized
//! ultimatum game with costly rejection, and the repeated variant where
//! committed trade invalidation sustains surplus sharing.

use crate::market::{PoolState, TradeDirection};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GameError {
    #[error("parameter out of domain: {0}")]
    Domain(&'static str),
}

/// Parameters of the ultimatum game: a surplus `s` split at a cutoff
/// `e`, payoff constants `c1 > c2 > 0`, rejection-cost constant `z > 0`,
/// per-round fees, and per-player discount factors in (0, 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UltimatumParams {
    pub surplus: f64,
    pub c1: f64,
    pub c2: f64,
    pub z: f64,
    pub fees: f64,
    pub delta_c: f64,
    pub delta_a: f64,
}

impl UltimatumParams {
    pub fn validate(&self) -> Result<(), GameError> {
        if !(self.surplus > 0.0) {
            return Err(GameError::Domain("surplus must be positive"));
        }
        if !(self.c1 > self.c2 && self.c2 > 0.0) {
            return Err(GameError::Domain("constants must satisfy c1 > c2 > 0"));
        }
        if !(self.z > 0.0) {
            return Err(GameError::Domain("z must be positive"));
        }
        if self.fees < 0.0 {
            return Err(GameError::Domain("fees must be non-negative"));
        }
        if !(self.delta_c > 0.0 && self.delta_c < 1.0 && self.delta_a > 0.0 && self.delta_a < 1.0)
        {
            return Err(GameError::Domain("discount factors must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Per-player payoffs, proposer (the trading algorithm) first.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PayoffPair {
    pub coinalg: f64,
    pub adversary: f64,
}

/// One-round ultimatum payoffs: the proposer offers `e` of the surplus;
/// the responder accepts (`b = 1`) or burns the round at cost
/// `z * sqrt(e)`.
pub fn ultimatum_payoffs(
    params: &UltimatumParams,
    e: f64,
    accept: bool,
) -> Result<PayoffPair, GameError> {
    params.validate()?;
    if e < 0.0 || e > params.surplus {
        return Err(GameError::Domain("offer must lie in [0, surplus]"));
    }
    let b = if accept { 1.0 } else { 0.0 };
    Ok(PayoffPair {
        coinalg: b * params.c1 * (params.surplus - e) - params.fees,
        adversary: b * params.c2 * e - (1.0 - b) * params.z * e.sqrt() - params.fees,
    })
}

/// The rejection-cost constant: `z = p * r0 * 2 * sqrt(2)`. The stylized
/// invalidation cost is bounded by `z * sqrt(e)`.
pub fn invalidation_bound_z(p: f64, r0: f64) -> f64 {
    p * r0 * 2.0 * std::f64::consts::SQRT_2
}

/// Invalidation cost in the stylized game, where the limit sits at
/// `p + e` above a price that itself moved by `p`:
/// `C(e) = p * r0 * (sqrt((2p + e) / p) - 1)`.
pub fn stylized_invalidation_cost(p: f64, r0: f64, e: f64) -> f64 {
    p * r0 * (((2.0 * p + e) / p).sqrt() - 1.0)
}

/// Discounted payoffs on the cooperative path of the repeated game with
/// a standing offer `e_star`: geometric sums of the per-round payoffs.
pub fn repeated_payoffs(params: &UltimatumParams, e_star: f64) -> Result<PayoffPair, GameError> {
    params.validate()?;
    if !(e_star > 0.0 && e_star <= params.surplus) {
        return Err(GameError::Domain("e_star must lie in (0, surplus]"));
    }
    Ok(PayoffPair {
        coinalg: params.c1 * (params.surplus - e_star) / (1.0 - params.delta_c),
        adversary: params.c2 * e_star / (1.0 - params.delta_a),
    })
}

/// Cooperative discounted value minus the most optimistic one-shot
/// deviation (grabbing the whole surplus once, then nothing forever).
/// Positive iff the grim trigger sustains `e_star` at these discounts.
pub fn deviation_gap(params: &UltimatumParams, e_star: f64) -> Result<f64, GameError> {
    let coop = repeated_payoffs(params, e_star)?;
    Ok(coop.coinalg - params.c1 * params.surplus)
}

/// One simulated round of the repeated game.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundOutcome {
    pub round: usize,
    pub offer: f64,
    pub accepted: bool,
    pub payoffs: PayoffPair,
}

/// Transcript of a grim-trigger run with discounted totals.
#[derive(Clone, Debug, PartialEq)]
pub struct GrimTranscript {
    pub rounds: Vec<RoundOutcome>,
    pub discounted: PayoffPair,
    /// First round (if any) whose offer fell below the demanded cutoff.
    pub triggered_at: Option<usize>,
}

/// Simulate the repeated game under the responder's committed grim
/// trigger: accept while every offer has met `e_star`; after a single
/// shortfall, reject forever. Offers come from the proposer policy,
/// one per round.
pub fn grim_trigger_simulate(
    params: &UltimatumParams,
    e_star: f64,
    mut offers: impl FnMut(usize) -> f64,
    rounds: usize,
) -> Result<GrimTranscript, GameError> {
    params.validate()?;
    if rounds == 0 {
        return Err(GameError::Domain("need at least one round"));
    }
    if !(e_star > 0.0 && e_star <= params.surplus) {
        return Err(GameError::Domain("e_star must lie in (0, surplus]"));
    }
    let mut transcript = Vec::with_capacity(rounds);
    let mut triggered_at = None;
    let mut total = PayoffPair {
        coinalg: 0.0,
        adversary: 0.0,
    };
    let mut disc_c = 1.0;
    let mut disc_a = 1.0;
    for round in 0..rounds {
        let offer = offers(round).clamp(0.0, params.surplus);
        if triggered_at.is_none() && offer < e_star {
            triggered_at = Some(round);
        }
        let accepted = triggered_at.is_none();
        let payoffs = ultimatum_payoffs(params, offer, accepted)?;
        total.coinalg += disc_c * payoffs.coinalg;
        total.adversary += disc_a * payoffs.adversary;
        disc_c *= params.delta_c;
        disc_a *= params.delta_a;
        transcript.push(RoundOutcome {
            round,
            offer,
            accepted,
            payoffs,
        });
    }
    Ok(GrimTranscript {
        rounds: transcript,
        discounted: total,
        triggered_at,
    })
}

/// Outcome of the one-shot game under the defensive one-tick limit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleShotOutcome {
    /// The defensive limit: spot plus one tick.
    pub limit: f64,
    /// Payoffs with the follower playing its best response.
    pub payoffs: PayoffPair,
    /// The leader's payoff absent any follower (the private benchmark).
    pub private_payoff: f64,
    /// The follower's best-response frontrun input (0 = abstain).
    pub best_response_input: f64,
    /// Private benchmark minus realized leader payoff.
    pub cost_of_transparency: f64,
}

/// Number of scan points for the follower's best-response search.
const BEST_RESPONSE_SCAN: usize = 2_000;

/// The one-shot game: the leader buys toward the predicted price
/// `p_hat`, guarding with a limit one tick above spot, and the trade
/// executes all-or-nothing if the post-frontrun price is within the
/// limit. The follower chooses a frontrun size by exhaustive scan;
/// equilibrium has it abstain, leaving the leader within one tick of its
/// private payoff.
pub fn single_shot_equilibrium(
    pool: &PoolState,
    p_hat: f64,
    coinalg_usd: f64,
    adversary_usd: f64,
    tx_fee: f64,
) -> SingleShotOutcome {
    let p0 = pool.spot_price();
    let limit = p0 + pool.tick;
    let budget = pool
        .buy_input_to_price(p_hat, pool.fee_rate)
        .min((coinalg_usd - tx_fee).max(0.0));

    let leader_payoff = |x: f64| -> (f64, f64) {
        // Returns (leader, follower) payoffs for follower input x.
        let (front_tok, after_front) = pool.swap_exact_in(TradeDirection::BuyTok, x);
        let mut state = after_front;
        let mut leader = 0.0;
        if budget > 0.0 {
            if state.spot_price() <= limit {
                let (tok, next) = state.swap_exact_in(TradeDirection::BuyTok, budget);
                state = next;
                leader = tok * p_hat - budget - tx_fee;
            } else {
                // Invalidated: the submitted transaction still pays its fee.
                leader = -tx_fee;
            }
        }
        let follower = if x > 0.0 {
            let (usd_back, _) = state.swap_exact_in(TradeDirection::SellTok, front_tok);
            usd_back - x - 2.0 * tx_fee
        } else {
            0.0
        };
        (leader, follower)
    };

    // Exhaustive best-response scan over frontrun inputs: zero plus a
    // log-spaced sweep reaching down to sub-tick sizes.
    let mut best_x = 0.0;
    let mut best_follower = leader_payoff(0.0).1;
    if adversary_usd > 0.0 {
        let lo = (adversary_usd * 1e-12).max(1e-12).ln();
        let hi = adversary_usd.ln();
        for i in 0..=BEST_RESPONSE_SCAN {
            let x = (lo + (hi - lo) * i as f64 / BEST_RESPONSE_SCAN as f64).exp();
            let (_, follower) = leader_payoff(x);
            if follower > best_follower {
                best_follower = follower;
                best_x = x;
            }
        }
    }

    let (leader, follower) = leader_payoff(best_x);
    let private_payoff = leader_payoff(0.0).0;
    SingleShotOutcome {
        limit,
        payoffs: PayoffPair {
            coinalg: leader,
            adversary: follower,
        },
        private_payoff,
        best_response_input: best_x,
        cost_of_transparency: private_payoff - leader,
    }
}
