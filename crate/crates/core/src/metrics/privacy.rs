//! The statistical-privacy estimator: average total variation distance
//! between view-induced beliefs and true trade distributions over a
//! sample of states.

use crate::coinalg::{induced_distribution, public_view, PublicViewKind, TradeDistribution, TradeGrid};
use crate::metrics::{tv_distance, MetricsError};

/// Result of the privacy estimation over a state sample. The estimate is
/// a certified lower bound: the definition quantifies over all finite
/// state subsets, so a sample can only witness at-least-this-much
/// privacy.
#[derive(Clone, Debug, PartialEq)]
pub struct PrivacyReport {
    /// Mean per-state distance.
    pub epsilon: f64,
    /// Distance at each sampled state, each in [0, 1].
    pub per_state: Vec<f64>,
}

/// Estimate privacy for an algorithm under a disclosure level: for each
/// sampled state, compare the true distribution (projected on the grid)
/// against the belief the public view induces, and average the total
/// variation distances.
pub fn epsilon_privacy<S>(
    states: &[S],
    mut alg_dist: impl FnMut(&S) -> TradeDistribution,
    view_kind: PublicViewKind,
    grid: &TradeGrid,
) -> Result<PrivacyReport, MetricsError> {
    if states.is_empty() {
        return Err(MetricsError::EmptySample);
    }
    let mut per_state = Vec::with_capacity(states.len());
    for state in states {
        let dist = alg_dist(state);
        let truth = dist.quantize_to_grid(grid);
        let view = public_view(view_kind, &dist);
        let induced = induced_distribution(&view, grid)?;
        per_state.push(tv_distance(&truth, &induced)?);
    }
    let epsilon = per_state.iter().sum::<f64>() / per_state.len() as f64;
    Ok(PrivacyReport { epsilon, per_state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{PlayerId, TradeAction};
    use approx::assert_relative_eq;

    const P: PlayerId = PlayerId(0);

    fn grid32() -> TradeGrid {
        TradeGrid::default_grid(P, 10_000.0, 0.003, 0.1, 100.0)
    }

    /// A deterministic algorithm that always emits one fixed grid trade.
    fn fixed_alg(grid: &TradeGrid) -> impl Fn(&u32) -> TradeDistribution + '_ {
        move |_| TradeDistribution::degenerate(TradeAction::Trade(grid.trades()[3].clone()))
    }

    #[test]
    fn transparent_algorithms_have_zero_epsilon() {
        let grid = grid32();
        let alg = fixed_alg(&grid);
        let report =
            epsilon_privacy(&[1u32, 2, 3], alg, PublicViewKind::Transp, &grid).unwrap();
        assert_eq!(report.epsilon, 0.0);
    }

    #[test]
    fn private_deterministic_on_32_grid() {
        let grid = grid32();
        assert_eq!(grid.len(), 32);
        let alg = fixed_alg(&grid);
        let report = epsilon_privacy(&[0u32], alg, PublicViewKind::Priv, &grid).unwrap();
        assert_relative_eq!(report.epsilon, 1.0 - 1.0 / 32.0, epsilon = 1e-12);
    }

    #[test]
    fn epsilon_is_ordered_across_views() {
        let grid = grid32();
        let alg = fixed_alg(&grid);
        let eps = |kind| {
            epsilon_privacy(&[0u32], &alg, kind, &grid)
                .unwrap()
                .epsilon
        };
        let e_priv = eps(PublicViewKind::Priv);
        let e_asset = eps(PublicViewKind::Asset);
        let e_dir = eps(PublicViewKind::Dir);
        let e_transp = eps(PublicViewKind::Transp);
        assert!(e_priv >= e_asset);
        assert!(e_asset >= e_dir);
        assert!(e_dir >= e_transp);
        assert_eq!(e_transp, 0.0);
    }

    #[test]
    fn empty_sample_is_an_error() {
        let grid = grid32();
        let alg = fixed_alg(&grid);
        assert!(matches!(
            epsilon_privacy(&[] as &[u32], alg, PublicViewKind::Priv, &grid),
            Err(MetricsError::EmptySample)
        ));
    }
}
