//! Procedures compared in the simulation, by name.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::model::{Dependence, ErrorRate, HypothesisStates, ProcedureConfig, TwoStudyPValues};
use crate::procedures::{
    adaptive_bonferroni_procedure, adaptive_fdr_procedure, analyze, fdr_procedure, fwer_procedure, SelectionRule,
};
use crate::rvalues::{adjusted_pvalues_single, max_comparator_rvalues, AdjustKind};
use crate::selection::select_by_threshold;

use super::oracles::{max_oracles, oracle_bonferroni, MaxOracleKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Bonf,
    AdaptBonf,
    Fdr,
    AdaptFdr,
    FdrArbdep,
    BonfAuto,
    AdaptBonfAuto,
    FdrAuto,
    AdaptFdrAuto,
    OracleBonf,
    OracleMaxBonf,
    OracleMaxBh,
    MaxBonf,
    MaxBh,
    NaiveBhIntersect,
}

impl Method {
    pub const ALL: [Method; 15] = [
        Method::Bonf,
        Method::AdaptBonf,
        Method::Fdr,
        Method::AdaptFdr,
        Method::FdrArbdep,
        Method::BonfAuto,
        Method::AdaptBonfAuto,
        Method::FdrAuto,
        Method::AdaptFdrAuto,
        Method::OracleBonf,
        Method::OracleMaxBonf,
        Method::OracleMaxBh,
        Method::MaxBonf,
        Method::MaxBh,
        Method::NaiveBhIntersect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Bonf => "bonf",
            Method::AdaptBonf => "adapt-bonf",
            Method::Fdr => "fdr",
            Method::AdaptFdr => "adapt-fdr",
            Method::FdrArbdep => "fdr-arbdep",
            Method::BonfAuto => "bonf-auto",
            Method::AdaptBonfAuto => "adapt-bonf-auto",
            Method::FdrAuto => "fdr-auto",
            Method::AdaptFdrAuto => "adapt-fdr-auto",
            Method::OracleBonf => "oracle-bonf",
            Method::OracleMaxBonf => "oracle-max-bonf",
            Method::OracleMaxBh => "oracle-max-bh",
            Method::MaxBonf => "max-bonf",
            Method::MaxBh => "max-bh",
            Method::NaiveBhIntersect => "naive-bh-intersect",
        }
    }

    /// One of the replicability procedures proper, as opposed to a
    /// comparator.
    pub fn is_novel(self) -> bool {
        matches!(
            self,
            Method::Bonf
                | Method::AdaptBonf
                | Method::Fdr
                | Method::AdaptFdr
                | Method::FdrArbdep
                | Method::BonfAuto
                | Method::AdaptBonfAuto
                | Method::FdrAuto
                | Method::AdaptFdrAuto
        )
    }

    pub fn is_adaptive(self) -> bool {
        matches!(
            self,
            Method::AdaptBonf | Method::AdaptFdr | Method::AdaptBonfAuto | Method::AdaptFdrAuto
        )
    }

    pub fn uses_ground_truth(self) -> bool {
        matches!(self, Method::OracleBonf | Method::OracleMaxBonf | Method::OracleMaxBh)
    }

    /// The error rate the method is designed to control. The intersected BH
    /// sets target FDR but do not control it for replicability claims.
    pub fn error_rate(self) -> ErrorRate {
        match self {
            Method::Bonf
            | Method::AdaptBonf
            | Method::BonfAuto
            | Method::AdaptBonfAuto
            | Method::OracleBonf
            | Method::OracleMaxBonf
            | Method::MaxBonf => ErrorRate::Fwer,
            _ => ErrorRate::Fdr,
        }
    }

    /// Discovered feature indices on one dataset.
    pub fn discoveries(
        self,
        pvals: &TwoStudyPValues,
        states: &HypothesisStates,
        config: &ProcedureConfig,
        fixed: (f64, f64),
    ) -> Vec<usize> {
        let config = config
            .with_error_rate(self.error_rate())
            .with_adaptive(self.is_adaptive());
        let fixed_selection = || select_by_threshold(pvals, fixed.0, fixed.1).expect("validated thresholds");
        match self {
            Method::Bonf => fwer_procedure(&fixed_selection(), &config).indices,
            Method::AdaptBonf => adaptive_bonferroni_procedure(&fixed_selection(), &config).indices,
            Method::Fdr => fdr_procedure(&fixed_selection(), &config).indices,
            Method::AdaptFdr => adaptive_fdr_procedure(&fixed_selection(), &config).indices,
            Method::FdrArbdep => {
                fdr_procedure(&fixed_selection(), &config.with_dependence(Dependence::Arbitrary)).indices
            }
            Method::BonfAuto | Method::AdaptBonfAuto | Method::FdrAuto | Method::AdaptFdrAuto => {
                analyze(pvals, &config, SelectionRule::Auto)
                    .expect("validated configuration")
                    .discoveries
                    .indices
            }
            Method::OracleBonf => oracle_bonferroni(pvals, states, &config),
            Method::OracleMaxBonf => max_oracles(pvals, states, config.alpha, MaxOracleKind::Fwer),
            Method::OracleMaxBh => max_oracles(pvals, states, config.alpha, MaxOracleKind::Fdr),
            Method::MaxBonf => below(&max_comparator_rvalues(pvals, AdjustKind::Bonferroni), config.alpha),
            Method::MaxBh => below(&max_comparator_rvalues(pvals, AdjustKind::Bh), config.alpha),
            Method::NaiveBhIntersect => {
                let d1 = adjusted_pvalues_single(pvals.p1(), AdjustKind::Bh);
                let d2 = adjusted_pvalues_single(pvals.p2(), AdjustKind::Bh);
                (0..pvals.m())
                    .filter(|&j| d1[j] <= config.alpha && d2[j] <= config.alpha)
                    .collect()
            }
        }
    }
}

fn below(values: &[f64], alpha: f64) -> Vec<usize> {
    (0..values.len()).filter(|&j| values[j] <= alpha).collect()
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidScenario(format!("unknown procedure {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.name()));
        }
        assert!("bh".parse::<Method>().is_err());
    }

    #[test]
    fn naive_intersection_on_small_example() {
        let pvals = TwoStudyPValues::one_sided(vec![0.001, 0.9, 0.01], vec![0.002, 0.001, 0.9]).unwrap();
        let states = HypothesisStates::new(vec![true; 3], vec![true; 3]).unwrap();
        let config = ProcedureConfig::new(0.05);
        let d = Method::NaiveBhIntersect.discoveries(&pvals, &states, &config, (0.025, 0.025));
        assert_eq!(d, [0]);
    }
}
