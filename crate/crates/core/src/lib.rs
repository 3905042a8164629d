//! Deterministic two-asset market simulator and analysis toolkit.
//!
//! The crate models a constant-product AMM shared by a collective
//! investment algorithm, adversarial frontrunners, and a corrective ghost
//! player, and layers on top of it:
//!
//! - exogenous price paths and a perfect-foresight prediction oracle
//!   ([`oracle`]),
//! - the trading agent with its disclosure levels, schedules, covert
//!   channel, and randomizing wrapper ([`coinalg`]),
//! - frontrunning strategies: theft, sandwiching with golden-section
//!   sizing, long-range and signal-driven variants ([`adversary`]),
//! - closed-form and simulated equilibrium analysis of the sandwich
//!   interaction ([`games`]),
//! - statistical privacy and value-extraction fairness estimators
//!   ([`metrics`]),
//! - a prediction-based leakage bounty verifier ([`bounty`]).
//!
//! Everything is seed-deterministic: identical inputs produce identical
//! results, bit for bit.

pub mod adversary;
pub mod bounty;
pub mod coinalg;
pub mod games;
pub mod market;
pub mod metrics;
pub mod oracle;
pub mod search;
