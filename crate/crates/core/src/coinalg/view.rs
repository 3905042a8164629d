//! Public functions: what an algorithm reveals about its next trade, and
//! the belief distribution that a revelation induces over the trade grid.

use std::fmt;
use std::str::FromStr;

use crate::coinalg::{CoinAlgError, TradeDistribution, TradeGrid};
use crate::market::{AssetId, TradeDirection};

/// Disclosure level of a trading algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PublicViewKind {
    /// Nothing is revealed.
    Priv,
    /// Only the unordered asset pair involved.
    Asset,
    /// The ordered (bought, sold) pair, i.e. the trade direction.
    Dir,
    /// The entire trade distribution.
    Transp,
}

impl FromStr for PublicViewKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "priv" => Ok(PublicViewKind::Priv),
            "asset" => Ok(PublicViewKind::Asset),
            "dir" => Ok(PublicViewKind::Dir),
            "transp" => Ok(PublicViewKind::Transp),
            other => Err(format!(
                "unknown view '{other}' (expected priv, asset, dir, or transp)"
            )),
        }
    }
}

impl fmt::Display for PublicViewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PublicViewKind::Priv => "priv",
            PublicViewKind::Asset => "asset",
            PublicViewKind::Dir => "dir",
            PublicViewKind::Transp => "transp",
        };
        write!(f, "{s}")
    }
}

/// What a public function reveals for one state.
#[derive(Clone, Debug, PartialEq)]
pub enum PublicView {
    /// Nothing.
    Bot,
    /// The unordered asset pair with positive trading mass, if any.
    Assets(Option<(AssetId, AssetId)>),
    /// The direction marginal over trading mass. For a sampled trade this
    /// degenerates to the ordered (bought, sold) pair.
    Direction(Vec<(TradeDirection, f64)>),
    /// The full distribution.
    Full(TradeDistribution),
}

impl PublicView {
    /// The ordered (bought, sold) asset pair for a degenerate direction
    /// view.
    pub fn ordered_pair(&self) -> Option<(AssetId, AssetId)> {
        match self {
            PublicView::Direction(m) if m.len() == 1 => {
                let d = m[0].0;
                Some((d.output_asset(), d.input_asset()))
            }
            _ => None,
        }
    }
}

/// Apply a public function to a trade distribution.
pub fn public_view(kind: PublicViewKind, dist: &TradeDistribution) -> PublicView {
    match kind {
        PublicViewKind::Priv => PublicView::Bot,
        PublicViewKind::Asset => {
            let trading_mass: f64 = dist
                .support()
                .iter()
                .zip(dist.probs())
                .filter(|(a, _)| !a.is_hold())
                .map(|(_, &p)| p)
                .sum();
            if trading_mass > 0.0 {
                PublicView::Assets(Some((AssetId::Tok, AssetId::Usd)))
            } else {
                PublicView::Assets(None)
            }
        }
        PublicViewKind::Dir => PublicView::Direction(dist.direction_marginal()),
        PublicViewKind::Transp => PublicView::Full(dist.clone()),
    }
}

/// The belief a view induces over the grid: uniform over all grid trades
/// consistent with the revelation, and the exact distribution under full
/// transparency. The returned distribution always has the grid's
/// canonical support (grid trades plus hold).
pub fn induced_distribution(
    view: &PublicView,
    grid: &TradeGrid,
) -> Result<TradeDistribution, CoinAlgError> {
    if grid.is_empty() {
        return Err(CoinAlgError::EmptySupport);
    }
    let support = grid.support_with_hold();
    let n = grid.len();
    let mut probs = vec![0.0; support.len()];
    match view {
        PublicView::Bot => {
            for p in probs.iter_mut().take(n) {
                *p = 1.0 / n as f64;
            }
        }
        PublicView::Assets(None) => return Err(CoinAlgError::EmptyConsistentSet),
        PublicView::Assets(Some(_)) => {
            // Both market assets are involved in every grid trade.
            for p in probs.iter_mut().take(n) {
                *p = 1.0 / n as f64;
            }
        }
        PublicView::Direction(marginal) => {
            if marginal.is_empty() {
                return Err(CoinAlgError::EmptyConsistentSet);
            }
            for &(direction, mass) in marginal {
                let indices: Vec<usize> = grid
                    .trades()
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.direction == direction)
                    .map(|(i, _)| i)
                    .collect();
                if indices.is_empty() {
                    return Err(CoinAlgError::EmptyConsistentSet);
                }
                let share = mass / indices.len() as f64;
                for i in indices {
                    probs[i] += share;
                }
            }
        }
        PublicView::Full(dist) => return Ok(dist.quantize_to_grid(grid)),
    }
    TradeDistribution::new(support, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{PlayerId, Trade, TradeAction};

    const P: PlayerId = PlayerId(0);

    fn grid() -> TradeGrid {
        TradeGrid::log_spaced(P, 1.0, 1000.0, 5, 100.0)
    }

    fn degenerate_buy(grid: &TradeGrid) -> TradeDistribution {
        TradeDistribution::degenerate(TradeAction::Trade(grid.trades()[2].clone()))
    }

    #[test]
    fn priv_reveals_nothing() {
        let d = degenerate_buy(&grid());
        assert_eq!(public_view(PublicViewKind::Priv, &d), PublicView::Bot);
    }

    #[test]
    fn dir_on_degenerate_buy_orders_the_pair() {
        let d = degenerate_buy(&grid());
        let v = public_view(PublicViewKind::Dir, &d);
        assert_eq!(v.ordered_pair(), Some((AssetId::Tok, AssetId::Usd)));
    }

    #[test]
    fn transp_reveals_the_distribution_itself() {
        let d = degenerate_buy(&grid());
        match public_view(PublicViewKind::Transp, &d) {
            PublicView::Full(full) => assert_eq!(full, d),
            other => panic!("unexpected view {other:?}"),
        }
    }

    #[test]
    fn priv_induces_uniform_over_the_grid() {
        let g = grid();
        let induced = induced_distribution(&PublicView::Bot, &g).unwrap();
        assert_eq!(induced.len(), g.len() + 1);
        for &p in &induced.probs()[..g.len()] {
            assert!((p - 0.1).abs() < 1e-12); // 10 grid trades
        }
        assert_eq!(induced.probs()[g.hold_index()], 0.0);
    }

    #[test]
    fn dir_induces_uniform_over_matching_direction() {
        let g = grid();
        let view = PublicView::Direction(vec![(TradeDirection::BuyTok, 1.0)]);
        let induced = induced_distribution(&view, &g).unwrap();
        for (i, t) in g.trades().iter().enumerate() {
            let expected = if t.direction == TradeDirection::BuyTok {
                0.2 // 5 buys
            } else {
                0.0
            };
            assert!((induced.probs()[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn transp_induces_an_exact_copy_on_the_grid() {
        let g = grid();
        let d = degenerate_buy(&g).quantize_to_grid(&g);
        let induced = induced_distribution(&PublicView::Full(d.clone()), &g).unwrap();
        assert_eq!(induced, d);
    }

    #[test]
    fn empty_consistent_set_is_an_error() {
        let g = grid();
        assert!(matches!(
            induced_distribution(&PublicView::Assets(None), &g),
            Err(CoinAlgError::EmptyConsistentSet)
        ));
        assert!(matches!(
            induced_distribution(&PublicView::Direction(vec![]), &g),
            Err(CoinAlgError::EmptyConsistentSet)
        ));
    }

    #[test]
    fn support_nesting_across_views() {
        // For a degenerate distribution the induced supports nest:
        // transp within dir within asset within priv.
        let g = grid();
        let d = degenerate_buy(&g);
        let supports: Vec<Vec<usize>> = [
            PublicViewKind::Transp,
            PublicViewKind::Dir,
            PublicViewKind::Asset,
            PublicViewKind::Priv,
        ]
        .iter()
        .map(|&kind| {
            let induced = induced_distribution(&public_view(kind, &d), &g).unwrap();
            induced
                .probs()
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
        for w in supports.windows(2) {
            assert!(w[0].iter().all(|i| w[1].contains(i)));
        }
    }

    #[test]
    fn mixed_direction_reveals_the_marginal() {
        let g = grid();
        let d = TradeDistribution::new(
            vec![
                TradeAction::Trade(Trade::buy(P, 10.0)),
                TradeAction::Trade(Trade::sell(P, 0.1)),
            ],
            vec![0.75, 0.25],
        )
        .unwrap();
        match public_view(PublicViewKind::Dir, &d) {
            PublicView::Direction(m) => {
                assert_eq!(m.len(), 2);
                assert!((m[0].1 - 0.75).abs() < 1e-12);
            }
            other => panic!("unexpected view {other:?}"),
        }
        let induced = induced_distribution(&public_view(PublicViewKind::Dir, &d), &g).unwrap();
        let buy_mass: f64 = induced.probs()[..5].iter().sum();
        assert!((buy_mass - 0.75).abs() < 1e-12);
    }
}
