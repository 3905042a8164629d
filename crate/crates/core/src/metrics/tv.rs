//! Total variation distance between distributions on a common support.

use crate::coinalg::TradeDistribution;
use crate::metrics::MetricsError;

/// Half the L1 distance between the probability vectors. Both
/// distributions must be defined over the identical support list.
pub fn tv_distance(d1: &TradeDistribution, d2: &TradeDistribution) -> Result<f64, MetricsError> {
    if d1.support() != d2.support() {
        return Err(MetricsError::MismatchedSupports);
    }
    let sum: f64 = d1
        .probs()
        .iter()
        .zip(d2.probs())
        .map(|(p, q)| (p - q).abs())
        .sum();
    Ok(0.5 * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{PlayerId, Trade, TradeAction};

    const P: PlayerId = PlayerId(0);

    fn support() -> Vec<TradeAction> {
        vec![
            TradeAction::Trade(Trade::buy(P, 1.0)),
            TradeAction::Trade(Trade::sell(P, 1.0)),
        ]
    }

    #[test]
    fn identical_distributions_are_at_distance_zero() {
        let d = TradeDistribution::uniform(support()).unwrap();
        assert_eq!(tv_distance(&d, &d).unwrap(), 0.0);
    }

    #[test]
    fn uniform_vs_point_mass_is_half() {
        let u = TradeDistribution::uniform(support()).unwrap();
        let point = TradeDistribution::new(support(), vec![1.0, 0.0]).unwrap();
        assert_eq!(tv_distance(&u, &point).unwrap(), 0.5);
        assert_eq!(tv_distance(&point, &u).unwrap(), 0.5);
    }

    #[test]
    fn disjoint_masses_are_at_distance_one() {
        let a = TradeDistribution::new(support(), vec![1.0, 0.0]).unwrap();
        let b = TradeDistribution::new(support(), vec![0.0, 1.0]).unwrap();
        assert_eq!(tv_distance(&a, &b).unwrap(), 1.0);
    }

    #[test]
    fn mismatched_supports_error() {
        let a = TradeDistribution::uniform(support()).unwrap();
        let b = TradeDistribution::degenerate(TradeAction::Hold);
        assert!(matches!(
            tv_distance(&a, &b),
            Err(MetricsError::MismatchedSupports)
        ));
    }

    #[test]
    fn metric_axioms_on_random_triples() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let support: Vec<TradeAction> = (0..8)
            .map(|i| TradeAction::Trade(Trade::buy(P, (i + 1) as f64)))
            .collect();
        let random_dist = |rng: &mut rand_chacha::ChaCha8Rng| {
            let raw: Vec<f64> = (0..8).map(|_| rng.gen::<f64>()).collect();
            let sum: f64 = raw.iter().sum();
            TradeDistribution::new(support.clone(), raw.iter().map(|x| x / sum).collect())
                .unwrap()
        };
        for _ in 0..200 {
            let a = random_dist(&mut rng);
            let b = random_dist(&mut rng);
            let c = random_dist(&mut rng);
            let ab = tv_distance(&a, &b).unwrap();
            let ba = tv_distance(&b, &a).unwrap();
            let ac = tv_distance(&a, &c).unwrap();
            let cb = tv_distance(&c, &b).unwrap();
            assert!(tv_distance(&a, &a).unwrap() <= 1e-12);
            assert_eq!(ab, ba);
            assert!((0.0..=1.0).contains(&ab));
            assert!(ab <= ac + cb + 1e-12);
        }
    }
}
