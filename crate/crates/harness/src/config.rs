//! Experiment configuration: a versioned, flat key-value TOML schema,
//! parsed with every validation failure reported at once.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use coinalg_core::coinalg::{CovertChannel, PublicViewKind, StrategyKind};
use coinalg_core::market::PoolState;
use serde::Deserialize;

/// Current schema version.
pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Invalid(Vec<String>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub version: u32,
    pub path: PathSection,
    pub pool: PoolSection,
    #[serde(default)]
    pub market: MarketSection,
    pub run: RunSection,
    pub strategy: StrategySection,
    #[serde(default)]
    pub adversary: AdversarySection,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSection {
    pub kind: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub blocks: u64,
    #[serde(default = "default_p0")]
    pub p0: f64,
    #[serde(default)]
    pub drift: f64,
    #[serde(default)]
    pub volatility: f64,
    #[serde(default)]
    pub file: Option<PathBuf>,
}

fn default_p0() -> f64 {
    100.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoolSection {
    pub reserve_usd: f64,
    pub reserve_tok: f64,
    #[serde(default)]
    pub fee_rate: f64,
    #[serde(default = "default_tick")]
    pub tick: f64,
}

fn default_tick() -> f64 {
    1.0e-6
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSection {
    #[serde(default)]
    pub tx_fee: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default)]
    pub start_offset: u64,
    pub window: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySection {
    #[serde(default = "default_strategy_kind")]
    pub kind: String,
    #[serde(default = "default_schedule")]
    pub schedule: String,
    #[serde(default = "default_interval")]
    pub interval_blocks: u64,
    #[serde(default = "default_lambda")]
    pub lambda_blocks: f64,
    #[serde(default = "default_view")]
    pub view: String,
    #[serde(default = "default_covert")]
    pub covert_channel: String,
    pub capital_usd: f64,
    #[serde(default)]
    pub capital_tok: f64,
    #[serde(default)]
    pub wrapper: WrapperSection,
}

fn default_strategy_kind() -> String {
    "ideal".into()
}
fn default_schedule() -> String {
    "fixed".into()
}
fn default_interval() -> u64 {
    1000
}
fn default_lambda() -> f64 {
    3600.0
}
fn default_view() -> String {
    "transp".into()
}
fn default_covert() -> String {
    "off".into()
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WrapperSection {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default)]
    pub jitter_blocks: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdversarySection {
    #[serde(default = "default_adversary_kind")]
    pub kind: String,
    #[serde(default = "default_impact")]
    pub assumed_impact: f64,
    #[serde(default)]
    pub capital_usd: f64,
    #[serde(default)]
    pub capital_tok: f64,
}

fn default_adversary_kind() -> String {
    "none".into()
}
fn default_impact() -> f64 {
    0.01
}

impl Default for AdversarySection {
    fn default() -> Self {
        AdversarySection {
            kind: default_adversary_kind(),
            assumed_impact: default_impact(),
            capital_usd: 0.0,
            capital_tok: 0.0,
        }
    }
}

/// How the price path is produced.
#[derive(Clone, Debug, PartialEq)]
pub enum PathSpec {
    Gbm {
        seed: u64,
        blocks: u64,
        p0: f64,
        drift: f64,
        volatility: f64,
    },
    Csv {
        file: PathBuf,
    },
}

/// Adversary selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdversaryKind {
    None,
    Theft,
    Sandwich,
    LongRange,
    Covert,
}

impl FromStr for AdversaryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(AdversaryKind::None),
            "theft" => Ok(AdversaryKind::Theft),
            "sandwich" => Ok(AdversaryKind::Sandwich),
            "long_range" => Ok(AdversaryKind::LongRange),
            "covert" => Ok(AdversaryKind::Covert),
            other => Err(format!(
                "unknown adversary '{other}' (expected none, theft, sandwich, long_range, or covert)"
            )),
        }
    }
}

impl std::fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AdversaryKind::None => "none",
            AdversaryKind::Theft => "theft",
            AdversaryKind::Sandwich => "sandwich",
            AdversaryKind::LongRange => "long_range",
            AdversaryKind::Covert => "covert",
        };
        write!(f, "{s}")
    }
}

/// Trade scheduling selection.
#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleSpec {
    Fixed { interval: u64 },
    Poisson { lambda: f64 },
}

/// A fully validated experiment configuration.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub path: PathSpec,
    pub pool: PoolState,
    pub tx_fee: f64,
    pub start_offset: u64,
    pub window: u64,
    pub seed: u64,
    pub strategy_kind: StrategyKind,
    pub schedule: ScheduleSpec,
    pub view: PublicViewKind,
    pub covert_channel: CovertChannel,
    pub coinalg_usd: f64,
    pub coinalg_tok: f64,
    pub wrapper_enabled: bool,
    pub wrapper_jitter: u64,
    pub adversary: AdversaryKind,
    pub assumed_impact: f64,
    pub adversary_usd: f64,
    pub adversary_tok: f64,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        Self::from_raw(&raw)
    }

    /// Validate and resolve, reporting every failure.
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let mut errors = Vec::new();

        if raw.version != CONFIG_VERSION {
            errors.push(format!(
                "version: expected {CONFIG_VERSION}, got {}",
                raw.version
            ));
        }

        let path = match raw.path.kind.as_str() {
            "gbm" => {
                if raw.path.p0 <= 0.0 {
                    errors.push("path.p0: must be positive".into());
                }
                if raw.path.volatility < 0.0 {
                    errors.push("path.volatility: must be non-negative".into());
                }
                if raw.path.blocks == 0 {
                    errors.push("path.blocks: must be at least 1".into());
                }
                Some(PathSpec::Gbm {
                    seed: raw.path.seed,
                    blocks: raw.path.blocks,
                    p0: raw.path.p0,
                    drift: raw.path.drift,
                    volatility: raw.path.volatility,
                })
            }
            "csv" => match &raw.path.file {
                Some(file) => Some(PathSpec::Csv { file: file.clone() }),
                None => {
                    errors.push("path.file: required when path.kind = \"csv\"".into());
                    None
                }
            },
            other => {
                errors.push(format!("path.kind: unknown kind '{other}' (gbm or csv)"));
                None
            }
        };

        if raw.pool.reserve_usd < 0.0 || raw.pool.reserve_tok <= 0.0 {
            errors.push("pool: reserves must be positive".into());
        }
        if !(0.0..=0.1).contains(&raw.pool.fee_rate) {
            errors.push("pool.fee_rate: must lie in [0, 0.1]".into());
        }
        if raw.pool.tick <= 0.0 {
            errors.push("pool.tick: must be positive".into());
        }
        if raw.market.tx_fee < 0.0 {
            errors.push("market.tx_fee: must be non-negative".into());
        }
        if raw.run.window == 0 {
            errors.push("run.window: must be at least 1".into());
        }

        let strategy_kind = StrategyKind::from_str(&raw.strategy.kind)
            .map_err(|e| errors.push(format!("strategy.kind: {e}")))
            .ok();
        let schedule = match raw.strategy.schedule.as_str() {
            "fixed" => {
                if raw.strategy.interval_blocks == 0 {
                    errors.push("strategy.interval_blocks: must be at least 1".into());
                }
                Some(ScheduleSpec::Fixed {
                    interval: raw.strategy.interval_blocks.max(1),
                })
            }
            "poisson" => {
                if raw.strategy.lambda_blocks <= 0.0 {
                    errors.push("strategy.lambda_blocks: must be positive".into());
                }
                Some(ScheduleSpec::Poisson {
                    lambda: raw.strategy.lambda_blocks,
                })
            }
            other => {
                errors.push(format!(
                    "strategy.schedule: unknown schedule '{other}' (fixed or poisson)"
                ));
                None
            }
        };
        let view = PublicViewKind::from_str(&raw.strategy.view)
            .map_err(|e| errors.push(format!("strategy.view: {e}")))
            .ok();
        let covert = CovertChannel::from_str(&raw.strategy.covert_channel)
            .map_err(|e| errors.push(format!("strategy.covert_channel: {e}")))
            .ok();
        if raw.strategy.capital_usd < 0.0 || raw.strategy.capital_tok < 0.0 {
            errors.push("strategy: capital must be non-negative".into());
        }

        let adversary = AdversaryKind::from_str(&raw.adversary.kind)
            .map_err(|e| errors.push(format!("adversary.kind: {e}")))
            .ok();
        if raw.adversary.assumed_impact < 0.0 {
            errors.push("adversary.assumed_impact: must be non-negative".into());
        }
        if raw.adversary.capital_usd < 0.0 || raw.adversary.capital_tok < 0.0 {
            errors.push("adversary: capital must be non-negative".into());
        }

        // Path coverage: the run window plus prediction horizon must stay
        // inside a generated path.
        if let Some(PathSpec::Gbm { blocks, .. }) = &path {
            let horizon = match &schedule {
                Some(ScheduleSpec::Fixed { interval }) => *interval as f64,
                Some(ScheduleSpec::Poisson { lambda }) => *lambda,
                None => 0.0,
            };
            let needed = raw.run.start_offset as f64 + raw.run.window as f64 + 8.0 * horizon;
            if (*blocks as f64) < needed {
                errors.push(format!(
                    "path.blocks: {blocks} blocks cannot cover start_offset + window + prediction horizons (need at least {})",
                    needed as u64 + 1
                ));
            }
        }

        if !errors.is_empty() {
            return Err(ConfigError::Invalid(errors));
        }

        Ok(ExperimentConfig {
            path: path.expect("validated"),
            pool: PoolState::new(
                raw.pool.reserve_usd,
                raw.pool.reserve_tok,
                raw.pool.fee_rate,
            )
            .with_tick(raw.pool.tick),
            tx_fee: raw.market.tx_fee,
            start_offset: raw.run.start_offset,
            window: raw.run.window,
            seed: raw.run.seed,
            strategy_kind: strategy_kind.expect("validated"),
            schedule: schedule.expect("validated"),
            view: view.expect("validated"),
            covert_channel: covert.expect("validated"),
            coinalg_usd: raw.strategy.capital_usd,
            coinalg_tok: raw.strategy.capital_tok,
            wrapper_enabled: raw.strategy.wrapper.enabled,
            wrapper_jitter: raw.strategy.wrapper.jitter_blocks,
            adversary: adversary.expect("validated"),
            assumed_impact: raw.adversary.assumed_impact,
            adversary_usd: raw.adversary.capital_usd,
            adversary_tok: raw.adversary.capital_tok,
        })
    }

    /// A canonical text form of the resolved configuration, used for
    /// hashing and resume bookkeeping.
    pub fn canonical_string(&self) -> String {
        format!("{self:?}")
    }
}
