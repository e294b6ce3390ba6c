//! Comparators that know the true hypothesis states.

use crate::model::{HypothesisStates, ProcedureConfig, TwoStudyPValues};
use crate::rvalues::{adjusted_pvalues_single, max_pvalues, AdjustKind};
use crate::selection::ResolvedPValues;
use crate::thresholds::solve_oracle_thresholds;

/// Error rate targeted by an oracle Max comparator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxOracleKind {
    Fwer,
    Fdr,
}

/// Bonferroni-type procedure whose data-dependent thresholds use the true
/// numbers of nulls among the selected:
/// `t1 = alpha1 / #{j in S2(t2) : H_1j = 0}`, `t2` symmetric. Rejects the
/// selected intersection at the solution, or nothing if none is found.
pub fn oracle_bonferroni(pvals: &TwoStudyPValues, states: &HypothesisStates, config: &ProcedureConfig) -> Vec<usize> {
    let solution = solve_oracle_thresholds(pvals, states, config);
    if !solution.converged {
        return Vec::new();
    }
    let resolved = ResolvedPValues::new(pvals);
    (0..pvals.m())
        .filter(|&j| {
            resolved.selection_p1()[j] <= solution.t1
                && resolved.selection_p2()[j] <= solution.t2
                && resolved.is_concordant(j)
        })
        .collect()
}

/// BH level `x` solving `f00 x^2 + (1 - f00 - f11) x = alpha`, capped at one.
pub fn oracle_max_level(f00: f64, f11: f64, alpha: f64) -> f64 {
    let b = 1.0 - f00 - f11;
    let x = if f00 > 0.0 {
        (-b + (b * b + 4.0 * f00 * alpha).sqrt()) / (2.0 * f00)
    } else if b > 0.0 {
        alpha / b
    } else {
        1.0
    };
    x.min(1.0)
}

/// Oracle Max comparators on `max(p1, p2)`.
///
/// The FWER kind rejects maxima at most `alpha / |H0_NR|`, with `H0_NR` the
/// non-replicated features (threshold one if there are none). The FDR kind
/// runs BH on the maxima at [`oracle_max_level`] with the state fractions
/// read from `states`.
pub fn max_oracles(
    pvals: &TwoStudyPValues,
    states: &HypothesisStates,
    alpha: f64,
    kind: MaxOracleKind,
) -> Vec<usize> {
    let maxima = max_pvalues(pvals);
    match kind {
        MaxOracleKind::Fwer => {
            let nulls = states.count_nonreplicated();
            let threshold = if nulls == 0 { 1.0 } else { alpha / nulls as f64 };
            (0..maxima.len()).filter(|&j| maxima[j] <= threshold).collect()
        }
        MaxOracleKind::Fdr => {
            let m = states.m() as f64;
            let f00 = (0..states.m()).filter(|&j| !states.h1()[j] && !states.h2()[j]).count() as f64 / m;
            let f11 = states.count_replicated() as f64 / m;
            let level = oracle_max_level(f00, f11, alpha);
            let adjusted = adjusted_pvalues_single(&maxima, AdjustKind::Bh);
            (0..maxima.len()).filter(|&j| adjusted[j] <= level).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_levels() {
        let x = oracle_max_level(0.8, 0.1, 0.05);
        assert!((x - (-0.1 + (0.01f64 + 0.16).sqrt()) / 1.6).abs() < 1e-15);
        assert!((x - 0.19520).abs() < 1e-5);
        assert!((oracle_max_level(1.0, 0.0, 0.05) - 0.05f64.sqrt()).abs() < 1e-15);
        assert!((oracle_max_level(0.0, 0.5, 0.05) - 0.1).abs() < 1e-15);
        assert_eq!(oracle_max_level(0.0, 1.0, 0.05), 1.0);
        for (f00, f11) in [(0.85, 0.05), (0.4, 0.4), (0.3, 0.0)] {
            let x = oracle_max_level(f00, f11, 0.05);
            assert!((f00 * x * x + (1.0 - f00 - f11) * x - 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn oracle_max_without_replications_is_plain_max() {
        let pvals = TwoStudyPValues::one_sided(vec![0.001, 0.02, 0.5, 0.01], vec![0.002, 0.001, 0.4, 0.0125]).unwrap();
        let states = HypothesisStates::new(vec![true, false, true, false], vec![false, true, false, false]).unwrap();
        // threshold 0.05 / 4
        assert_eq!(max_oracles(&pvals, &states, 0.05, MaxOracleKind::Fwer), [0, 3]);
    }

    #[test]
    fn oracle_max_all_replicated_rejects_everything() {
        let pvals = TwoStudyPValues::one_sided(vec![0.9, 0.2], vec![0.3, 0.99]).unwrap();
        let states = HypothesisStates::new(vec![true, true], vec![true, true]).unwrap();
        assert_eq!(max_oracles(&pvals, &states, 0.05, MaxOracleKind::Fwer), [0, 1]);
    }

    /// 20 features: 4 replicated, the rest null in at least one study.
    fn constructed() -> (TwoStudyPValues, HypothesisStates) {
        let p1 = vec![
            0.0001, 0.0004, 0.0008, 0.002, // (1,1)
            0.0003, 0.001, 0.003, // (1,0)
            0.004, 0.2, 0.5, // (0,1)
            0.6, 0.02, 0.7, 0.8, 0.9, 0.03, 0.45, 0.35, 0.15, 0.25,
        ];
        let p2 = vec![
            0.0002, 0.0006, 0.004, 0.0009, //
            0.3, 0.01, 0.6, //
            0.0001, 0.0005, 0.002, //
            0.4, 0.5, 0.006, 0.7, 0.8, 0.04, 0.9, 0.1, 0.2, 0.3,
        ];
        let mut h1 = vec![true; 7];
        h1.extend([false; 13]);
        let mut h2 = vec![true; 4];
        h2.extend([false; 3]);
        h2.extend([true; 3]);
        h2.extend([false; 10]);
        (
            TwoStudyPValues::one_sided(p1, p2).unwrap(),
            HypothesisStates::new(h1, h2).unwrap(),
        )
    }

    #[test]
    fn constructed_oracle_by_hand() {
        let (pvals, states) = constructed();
        let config = ProcedureConfig::new(0.05);
        // From (1, 1): 13 study-two nulls in S1, t2 = 0.025/13, S2 = {0, 1,
        // 3, 7, 8} holds 2 study-one nulls, t1 = 0.0125. Then S1 = {0..=7}
        // holds 3 study-two nulls, t2 = 0.025/3, and S2 = {0, 1, 2, 3, 7, 8,
        // 9, 12} holds 4 study-one nulls, t1 = 0.00625, which is fixed.
        assert_eq!(oracle_bonferroni(&pvals, &states, &config), [0, 1, 2, 3, 7]);
        let sol = solve_oracle_thresholds(&pvals, &states, &config);
        assert_eq!((sol.t1, sol.t2), (0.025 / 4.0, 0.025 / 3.0));
    }

    #[test]
    fn oracle_with_all_nulls_matches_fwer_solution() {
        let (pvals, _) = constructed();
        let states = HypothesisStates::new(vec![false; 20], vec![false; 20]).unwrap();
        let config = ProcedureConfig::new(0.05);
        let plain = crate::thresholds::solve_fwer_thresholds(&pvals, &config);
        let oracle = solve_oracle_thresholds(&pvals, &states, &config);
        assert!(plain.converged && oracle.converged);
        assert_eq!((plain.t1, plain.t2), (oracle.t1, oracle.t2));
    }
}
