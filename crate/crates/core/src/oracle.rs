//! Exogenous price paths, the perfect-foresight prediction oracle, and
//! the ghost repeg that keeps the pool aligned with the path.
//!
//! Paths are step functions over block heights: the price at a block is
//! the most recent recorded point at or before it. Synthetic paths use
//! geometric Brownian motion with per-block Gaussian log-increments;
//! real series are ingested from CSV.

use std::io::BufRead;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::market::{PlayerId, PoolState, Trade, TradeAction, TradeDirection};

/// Where a path came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathSource {
    SyntheticGbm,
    CsvIngest,
}

/// An ordered series of (block height, price) points with strictly
/// increasing heights and strictly positive prices.
#[derive(Clone, Debug, PartialEq)]
pub struct PricePath {
    points: Vec<(u64, f64)>,
    pub source: PathSource,
}

/// A price prediction for a future block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prediction {
    pub target_block: u64,
    pub predicted_price: f64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("path is empty")]
    EmptyPath,

    #[error("line {line}: {reason}")]
    Validation { line: usize, reason: String },

    #[error("block {block} is outside the path (first {first}, last {last})")]
    OutOfRange { block: u64, first: u64, last: u64 },

    #[error("prediction horizon must be at least one block")]
    ZeroHorizon,

    #[error("io error reading {path}: {message}")]
    Io { path: String, message: String },
}

impl PricePath {
    /// Build a path from points, validating monotone heights and positive
    /// prices.
    pub fn from_points(
        points: Vec<(u64, f64)>,
        source: PathSource,
    ) -> Result<Self, OracleError> {
        if points.is_empty() {
            return Err(OracleError::EmptyPath);
        }
        for (i, &(height, price)) in points.iter().enumerate() {
            if price <= 0.0 || !price.is_finite() {
                return Err(OracleError::Validation {
                    line: i + 2,
                    reason: format!("price must be positive and finite, got {price}"),
                });
            }
            if i > 0 && points[i - 1].0 >= height {
                return Err(OracleError::Validation {
                    line: i + 2,
                    reason: format!(
                        "block heights must be strictly increasing ({} then {height})",
                        points[i - 1].0
                    ),
                });
            }
        }
        Ok(PricePath { points, source })
    }

    /// Deterministic geometric Brownian motion: `n_blocks` points at
    /// heights `0..n_blocks`, starting at `p0`, with per-block Gaussian
    /// log-increments of mean `drift` and standard deviation
    /// `volatility`.
    pub fn generate_gbm(
        seed: u64,
        n_blocks: u64,
        p0: f64,
        drift: f64,
        volatility: f64,
    ) -> Self {
        assert!(p0 > 0.0, "initial price must be positive");
        assert!(volatility >= 0.0, "volatility must be non-negative");
        assert!(n_blocks >= 1, "a path needs at least one block");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(n_blocks as usize);
        let mut price = p0;
        points.push((0, p0));
        for height in 1..n_blocks {
            let z: f64 = rng.sample(StandardNormal);
            price *= (drift + volatility * z).exp();
            points.push((height, price));
        }
        PricePath {
            points,
            source: PathSource::SyntheticGbm,
        }
    }

    /// Load a path from a CSV file with header `block,price`.
    pub fn load_csv(path: &Path) -> Result<Self, OracleError> {
        let file = std::fs::File::open(path).map_err(|e| OracleError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    /// Parse the `block,price` CSV schema from any reader. Errors carry
    /// 1-based line numbers.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self, OracleError> {
        let mut points = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line_no = idx + 1;
            let line = line.map_err(|e| OracleError::Parse {
                line: line_no,
                reason: e.to_string(),
            })?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line_no == 1 {
                if line.trim() != "block,price" {
                    return Err(OracleError::Parse {
                        line: 1,
                        reason: format!("expected header 'block,price', got '{line}'"),
                    });
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let (block_s, price_s) = match (fields.next(), fields.next(), fields.next()) {
                (Some(b), Some(p), None) => (b, p),
                _ => {
                    return Err(OracleError::Parse {
                        line: line_no,
                        reason: format!("expected two comma-separated fields, got '{line}'"),
                    })
                }
            };
            let block: u64 = block_s.trim().parse().map_err(|e| OracleError::Parse {
                line: line_no,
                reason: format!("bad block '{block_s}': {e}"),
            })?;
            let price: f64 = price_s.trim().parse().map_err(|e| OracleError::Parse {
                line: line_no,
                reason: format!("bad price '{price_s}': {e}"),
            })?;
            if price <= 0.0 || !price.is_finite() {
                return Err(OracleError::Validation {
                    line: line_no,
                    reason: format!("price must be positive, got {price}"),
                });
            }
            if let Some(&(prev, _)) = points.last() {
                if prev >= block {
                    return Err(OracleError::Validation {
                        line: line_no,
                        reason: format!(
                            "block heights must be strictly increasing ({prev} then {block})"
                        ),
                    });
                }
            }
            points.push((block, price));
        }
        if points.is_empty() {
            return Err(OracleError::EmptyPath);
        }
        Ok(PricePath {
            points,
            source: PathSource::CsvIngest,
        })
    }

    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    pub fn first_block(&self) -> u64 {
        self.points[0].0
    }

    pub fn last_block(&self) -> u64 {
        self.points[self.points.len() - 1].0
    }

    /// Price at a block: the most recent point at or before it.
    pub fn price_at(&self, block: u64) -> Result<f64, OracleError> {
        if block < self.first_block() || block > self.last_block() {
            return Err(OracleError::OutOfRange {
                block,
                first: self.first_block(),
                last: self.last_block(),
            });
        }
        let idx = self.points.partition_point(|&(h, _)| h <= block);
        Ok(self.points[idx - 1].1)
    }

    /// The ideal prediction oracle: reads the path's exact future price.
    pub fn predict(&self, now_block: u64, horizon: u64) -> Result<Prediction, OracleError> {
        if horizon == 0 {
            return Err(OracleError::ZeroHorizon);
        }
        let target_block = now_block + horizon;
        let predicted_price = self.price_at(target_block)?;
        Ok(Prediction {
            target_block,
            predicted_price,
        })
    }
}

/// The unique fee-free trade that moves the pool's spot price to
/// `target_price`: a buy when spot is below the target, a sell when
/// above, and no trade when they already agree.
pub fn repeg_ghost_trade(pool: &PoolState, target_price: f64, ghost: PlayerId) -> TradeAction {
    debug_assert!(target_price > 0.0, "target price must be positive");
    let spot = pool.spot_price();
    if target_price > spot {
        let usd_in = pool.buy_input_to_price(target_price, 0.0);
        if usd_in == 0.0 {
            return TradeAction::Hold;
        }
        TradeAction::Trade(Trade {
            player: ghost,
            direction: TradeDirection::BuyTok,
            amount: usd_in,
            price_limit: None,
        })
    } else if target_price < spot {
        let tok_in = pool.sell_input_to_price(target_price, 0.0);
        if tok_in == 0.0 {
            return TradeAction::Hold;
        }
        TradeAction::Trade(Trade {
            player: ghost,
            direction: TradeDirection::SellTok,
            amount: tok_in,
            price_limit: None,
        })
    } else {
        TradeAction::Hold
    }
}
