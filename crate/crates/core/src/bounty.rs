//! Prediction-based leakage bounty: a prover registers a declarative
//! predicate over trades, streams per-epoch predictions strictly before
//! each trade executes, and is paid only if every prediction is correct
//! and the predicted quantities were genuinely unpredictable — the
//! per-epoch min-entropies of the predicate under the wrapper's sampled
//! distributions must sum to the soundness threshold.
//!
//! Per-epoch distributions come from the wrapper's audit interface; the
//! verifier never trusts prover-supplied entropy.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::coinalg::{EpochRecord, TradeDistribution, TradeGrid};
use crate::market::{AssetId, TradeAction, TradeDirection};

/// Declarative predicates over trade fields. Each is total on the grid
/// (holding is a distinguished outcome) with a finite codomain, so
/// min-entropy is exactly computable from a trade distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Predicate {
    /// Buy, sell, or hold.
    Direction,
    /// The size bucket index on the grid (or hold).
    SizeBucket,
    /// The unordered asset pair traded (or hold).
    AssetPair,
}

impl FromStr for Predicate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direction" => Ok(Predicate::Direction),
            "size_bucket" => Ok(Predicate::SizeBucket),
            "asset_pair" => Ok(Predicate::AssetPair),
            other => Err(format!(
                "unknown predicate '{other}' (expected direction, size_bucket, or asset_pair)"
            )),
        }
    }
}

/// A predicate's value on one trade action.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PredicateValue {
    Hold,
    Direction(TradeDirection),
    Bucket(usize),
    Pair(AssetId, AssetId),
}

impl fmt::Display for PredicateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateValue::Hold => write!(f, "hold"),
            PredicateValue::Direction(d) => write!(f, "{d}"),
            PredicateValue::Bucket(i) => write!(f, "bucket:{i}"),
            PredicateValue::Pair(a, b) => write!(f, "pair:{a}-{b}"),
        }
    }
}

impl FromStr for PredicateValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hold" => Ok(PredicateValue::Hold),
            "buy" => Ok(PredicateValue::Direction(TradeDirection::BuyTok)),
            "sell" => Ok(PredicateValue::Direction(TradeDirection::SellTok)),
            other => {
                if let Some(rest) = other.strip_prefix("bucket:") {
                    let i = rest
                        .parse()
                        .map_err(|e| format!("bad bucket index '{rest}': {e}"))?;
                    Ok(PredicateValue::Bucket(i))
                } else if other == "pair:TOK-USD" || other == "pair:USD-TOK" {
                    Ok(PredicateValue::Pair(AssetId::Tok, AssetId::Usd))
                } else {
                    Err(format!("unparseable prediction '{other}'"))
                }
            }
        }
    }
}

impl Predicate {
    /// Evaluate the predicate on a trade action.
    pub fn eval(&self, action: &TradeAction, grid: &TradeGrid) -> PredicateValue {
        match action {
            TradeAction::Hold => PredicateValue::Hold,
            TradeAction::Trade(t) => match self {
                Predicate::Direction => PredicateValue::Direction(t.direction),
                Predicate::SizeBucket => PredicateValue::Bucket(grid.bucket_of(t)),
                Predicate::AssetPair => PredicateValue::Pair(AssetId::Tok, AssetId::Usd),
            },
        }
    }
}

/// Min-entropy in bits of the predicate's value under a trade
/// distribution: `-log2` of the most likely predicate outcome.
pub fn min_entropy(predicate: Predicate, dist: &TradeDistribution, grid: &TradeGrid) -> f64 {
    let mut by_value: BTreeMap<PredicateValue, f64> = BTreeMap::new();
    for (action, &p) in dist.support().iter().zip(dist.probs()) {
        if p > 0.0 {
            *by_value.entry(predicate.eval(action, grid)).or_insert(0.0) += p;
        }
    }
    let max = by_value.values().cloned().fold(0.0, f64::max);
    if max <= 0.0 {
        return 0.0;
    }
    -(max.log2())
}

/// Why a claim was rejected.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RejectReason {
    #[error("prediction for epoch {epoch} was wrong")]
    WrongPrediction { epoch: usize },

    #[error("entropy total {total:.6} bits is below the threshold {theta}")]
    EntropyShortfall { total: f64, theta: f64 },

    #[error("no prediction submitted for epoch {epoch}")]
    MissingEpoch { epoch: usize },

    #[error("prediction for epoch {epoch} arrived at block {submitted}, not before execution at block {executed}")]
    LatePrediction {
        epoch: usize,
        submitted: u64,
        executed: u64,
    },

    #[error("claim was voided: {0}")]
    Voided(String),
}

/// Verification outcome.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BountyError {
    #[error("threshold must be positive")]
    ZeroThreshold,

    #[error("no claim with id {0}")]
    UnknownClaim(u64),

    #[error("epoch {epoch} already has a prediction")]
    DuplicatePrediction { epoch: usize },

    #[error("claim {0} was voided by a timing violation")]
    ClaimVoided(u64),

    #[error("claim is incomplete: executed {executed} epochs, predicted {predicted}")]
    IncompleteClaim { executed: usize, predicted: usize },
}

/// One registered claim: the predicate, the soundness threshold, and the
/// append-only prediction log.
#[derive(Clone, Debug, PartialEq)]
pub struct BountyClaim {
    pub id: u64,
    pub predicate: Predicate,
    pub theta: f64,
    /// epoch -> (submission block, predicted value)
    predictions: BTreeMap<usize, (u64, PredicateValue)>,
    voided: Option<String>,
}

impl BountyClaim {
    pub fn predictions(&self) -> impl Iterator<Item = (usize, u64, &PredicateValue)> {
        self.predictions
            .iter()
            .map(|(&epoch, (block, value))| (epoch, *block, value))
    }

    pub fn is_voided(&self) -> bool {
        self.voided.is_some()
    }
}

/// Claim registry: opens claims, takes timestamped predictions, and
/// verifies them against the wrapper's audit log.
#[derive(Clone, Debug, Default)]
pub struct BountyRegistry {
    next_id: u64,
    claims: BTreeMap<u64, BountyClaim>,
}

impl BountyRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Open a claim for a predicate at a soundness threshold in bits.
    /// Duplicate registrations open independent claims.
    pub fn register_claim(&mut self, predicate: Predicate, theta: f64) -> Result<u64, BountyError> {
        if theta <= 0.0 {
            return Err(BountyError::ZeroThreshold);
        }
        let id = self.next_id;
        self.next_id += 1;
        self.claims.insert(
            id,
            BountyClaim {
                id,
                predicate,
                theta,
                predictions: BTreeMap::new(),
                voided: None,
            },
        );
        Ok(id)
    }

    pub fn claim(&self, id: u64) -> Option<&BountyClaim> {
        self.claims.get(&id)
    }

    /// Append a prediction for an epoch at the current block. One
    /// prediction per epoch; timing is re-checked against execution
    /// heights at verification.
    pub fn submit_prediction(
        &mut self,
        id: u64,
        epoch: usize,
        now_block: u64,
        value: PredicateValue,
    ) -> Result<(), BountyError> {
        let claim = self
            .claims
            .get_mut(&id)
            .ok_or(BountyError::UnknownClaim(id))?;
        if claim.voided.is_some() {
            return Err(BountyError::ClaimVoided(id));
        }
        if claim.predictions.contains_key(&epoch) {
            return Err(BountyError::DuplicatePrediction { epoch });
        }
        claim.predictions.insert(epoch, (now_block, value));
        Ok(())
    }

    /// Void a claim (e.g. on an observed protocol violation).
    pub fn void_claim(&mut self, id: u64, reason: impl Into<String>) -> Result<(), BountyError> {
        let claim = self
            .claims
            .get_mut(&id)
            .ok_or(BountyError::UnknownClaim(id))?;
        claim.voided = Some(reason.into());
        Ok(())
    }

    /// Verify a claim against the wrapper's audit: accept iff every
    /// executed epoch has an on-time, correct prediction and the summed
    /// per-epoch min-entropies reach the threshold.
    pub fn verify_claim(
        &self,
        id: u64,
        audit: &[EpochRecord],
        grid: &TradeGrid,
    ) -> Result<Verdict, BountyError> {
        let claim = self.claims.get(&id).ok_or(BountyError::UnknownClaim(id))?;
        if let Some(reason) = &claim.voided {
            return Ok(Verdict::Reject(RejectReason::Voided(reason.clone())));
        }
        if claim.predictions.len() < audit.len() {
            return Err(BountyError::IncompleteClaim {
                executed: audit.len(),
                predicted: claim.predictions.len(),
            });
        }
        for record in audit {
            let (submitted, predicted) = match claim.predictions.get(&record.epoch) {
                Some(entry) => entry,
                None => {
                    return Ok(Verdict::Reject(RejectReason::MissingEpoch {
                        epoch: record.epoch,
                    }))
                }
            };
            if *submitted >= record.execute_block {
                return Ok(Verdict::Reject(RejectReason::LatePrediction {
                    epoch: record.epoch,
                    submitted: *submitted,
                    executed: record.execute_block,
                }));
            }
            let actual = claim.predicate.eval(&record.action, grid);
            if actual != *predicted {
                return Ok(Verdict::Reject(RejectReason::WrongPrediction {
                    epoch: record.epoch,
                }));
            }
        }
        let total: f64 = audit
            .iter()
            .map(|r| min_entropy(claim.predicate, &r.dist, grid))
            .sum();
        if total < claim.theta {
            return Ok(Verdict::Reject(RejectReason::EntropyShortfall {
                total,
                theta: claim.theta,
            }));
        }
        Ok(Verdict::Accept)
    }
}
