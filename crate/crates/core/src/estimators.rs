//! Plug-in estimators of null fractions.

use crate::error::{Error, Result};
use crate::selection::{restrict_by_lambda, SelectionOutcome};

/// Slightly inflated plug-in estimate for a single family:
/// `(#{p > lambda} + 1) / (m (1 - lambda))`. May exceed one.
pub fn plugin_pi0_single(pvalues: &[f64], lambda: f64) -> Result<f64> {
    if pvalues.is_empty() {
        return Err(Error::EmptyPValues);
    }
    let exceed = pvalues.iter().filter(|&&p| p > lambda).count();
    Ok((exceed as f64 + 1.0) / (pvalues.len() as f64 * (1.0 - lambda)))
}

/// `S * pi0_hat` for a family of size `S` with `exceedances` p-values above
/// lambda. Defined even for an empty family.
#[inline]
pub(crate) fn inflated_weight(exceedances: usize, lambda: f64) -> f64 {
    (exceedances as f64 + 1.0) / (1.0 - lambda)
}

/// Cross-study plug-in estimates `(pi0_1, pi0_2)`.
///
/// `pi0_1` estimates the null fraction of study one among the features
/// selected by study two, scanning study-one working p-values over
/// `S_{2,lambda}`; `pi0_2` is symmetric. The selection is restricted by
/// `lambda` first, whatever restriction it already carried.
pub fn plugin_pi0_cross(sel: &SelectionOutcome, lambda: f64) -> Result<(f64, f64)> {
    let restricted = restrict_by_lambda(sel, lambda);
    let s1 = restricted.s1_lambda();
    let s2 = restricted.s2_lambda();
    if s1.is_empty() {
        return Err(Error::EmptyLambdaSelection { study: 1 });
    }
    if s2.is_empty() {
        return Err(Error::EmptyLambdaSelection { study: 2 });
    }
    let exceed_1 = s2.iter().filter(|&&j| restricted.working_p1()[j] > lambda).count();
    let exceed_2 = s1.iter().filter(|&&j| restricted.working_p2()[j] > lambda).count();
    Ok((
        inflated_weight(exceed_1, lambda) / s2.len() as f64,
        inflated_weight(exceed_2, lambda) / s1.len() as f64,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::mice;
    use crate::model::TwoStudyPValues;
    use crate::selection::select_by_threshold;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_study_examples() {
        assert_eq!(plugin_pi0_single(&[0.9, 0.8, 0.01, 0.02], 0.5).unwrap(), 1.5);
        assert_eq!(plugin_pi0_single(&[0.01, 0.02], 0.5).unwrap(), 1.0 / (2.0 * 0.5));
        assert_eq!(plugin_pi0_single(&[0.6], 0.5).unwrap(), 4.0);
        assert_eq!(plugin_pi0_single(&[], 0.5), Err(Error::EmptyPValues));
    }

    #[test]
    fn mice_cross_estimates() {
        let sel = select_by_threshold(&mice(), 0.025, 0.025).unwrap();
        let (pi0_1, pi0_2) = plugin_pi0_cross(&sel, 0.05).unwrap();
        assert!((pi0_1 - 8.0 / (19.0 * 0.95)).abs() < 1e-12);
        assert!((pi0_2 - 9.0 / (20.0 * 0.95)).abs() < 1e-12);
        assert!((pi0_1 - 0.44).abs() < 0.01);
        assert!((pi0_2 - 0.47).abs() < 0.01);
    }

    #[test]
    fn cross_without_exceedances() {
        let pvals = TwoStudyPValues::one_sided(vec![0.01, 0.02, 0.5], vec![0.01, 0.03, 0.9]).unwrap();
        let sel = select_by_threshold(&pvals, 0.04, 0.04).unwrap();
        let (pi0_1, pi0_2) = plugin_pi0_cross(&sel, 0.05).unwrap();
        assert_eq!(pi0_1, 1.0 / (2.0 * 0.95));
        assert_eq!(pi0_2, 1.0 / (2.0 * 0.95));
    }

    #[test]
    fn cross_singleton_with_exceedance() {
        let pvals = TwoStudyPValues::one_sided(vec![0.01, 0.6], vec![0.6, 0.01]).unwrap();
        let sel = select_by_threshold(&pvals, 0.04, 0.04).unwrap();
        let (pi0_1, _) = plugin_pi0_cross(&sel, 0.05).unwrap();
        assert_eq!(pi0_1, 2.0 / 0.95);
    }

    #[test]
    fn cross_empty_selection_is_an_error() {
        let pvals = TwoStudyPValues::one_sided(vec![0.01], vec![0.6]).unwrap();
        let sel = select_by_threshold(&pvals, 0.04, 0.04).unwrap();
        assert_eq!(
            plugin_pi0_cross(&sel, 0.05),
            Err(Error::EmptyLambdaSelection { study: 2 })
        );
    }

    #[test]
    fn upward_bias_under_uniform_nulls() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let draws: Vec<f64> = (0..1000)
            .map(|_| {
                let p: Vec<f64> = (0..50).map(|_| rng.random::<f64>()).collect();
                plugin_pi0_single(&p, 0.5).unwrap()
            })
            .collect();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean >= 1.0 - 3.0 * (var / n).sqrt(), "mean {mean}");
    }

    proptest! {
        #[test]
        fn permutation_invariant(mut p in prop::collection::vec(0.0f64..=1.0, 1..40), lambda in 0.01f64..0.99, seed: u64) {
            let before = plugin_pi0_single(&p, lambda).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..p.len()).rev() {
                p.swap(i, rng.random_range(0..=i));
            }
            prop_assert_eq!(before, plugin_pi0_single(&p, lambda).unwrap());
        }

        #[test]
        fn smaller_lambda_never_lowers_count(p in prop::collection::vec(0.0f64..=1.0, 1..40), a in 0.01f64..0.99, b in 0.01f64..0.99) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let count = |l: f64| p.iter().filter(|&&v| v > l).count();
            prop_assert!(count(lo) >= count(hi));
        }
    }
}
