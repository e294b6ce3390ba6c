//! Replicability procedures as discovery sets, and the end-to-end analysis
//! pipeline.
//!
//! Each procedure thresholds the matching r-values at `alpha`. The literal
//! step-wise forms live in the test suites, where they check that both
//! routes agree.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::plugin_pi0_cross;
use crate::model::{validate, Dependence, ErrorRate, ProcedureConfig, TwoStudyPValues};
use crate::rvalues::{
    adaptive_bonferroni_rvalues, arbitrary_dependence_rvalues, bonferroni_rvalues, RValueTable,
    RValueVariant,
};
use crate::selection::{restrict_by_lambda, select_by_threshold, SelectionOutcome};
use crate::thresholds::{solve_thresholds, ThresholdSolution};

/// Machine-readable reasons for an empty result that is not an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "code", rename_all = "kebab-case")]
pub enum AnalysisWarning {
    /// The adaptive procedure was requested but a lambda-restricted
    /// selection is empty, so no discoveries are made.
    EmptyLambdaSelection { study: usize },
    /// The data-dependent threshold equations have no solution.
    NoThresholdSolution,
}

impl std::fmt::Display for AnalysisWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnalysisWarning::EmptyLambdaSelection { study } => write!(
                f,
                "lambda-restricted selection of study {study} is empty; adaptive procedure makes no discoveries"
            ),
            AnalysisWarning::NoThresholdSolution => {
                write!(f, "threshold equations have no solution; no replicability claims")
            }
        }
    }
}

/// Output of a procedure: discovered feature indices in input order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discoveries {
    pub indices: Vec<usize>,
    pub warning: Option<AnalysisWarning>,
}

impl Discoveries {
    fn new(indices: Vec<usize>) -> Self {
        Self {
            indices,
            warning: None,
        }
    }

    fn warn(warning: AnalysisWarning) -> Self {
        Self {
            indices: Vec::new(),
            warning: Some(warning),
        }
    }

    /// Number of rejections `R`.
    pub fn count(&self) -> usize {
        self.indices.len()
    }
}

fn empty_table(variant: RValueVariant, c: f64) -> RValueTable {
    RValueTable {
        entries: Vec::new(),
        variant,
        pi0: None,
        c,
    }
}

/// Bonferroni-replicability: reject `j` in the working set iff
/// `p_1j <= alpha1 / S_2` and `p_2j <= alpha2 / S_1`.
pub fn fwer_procedure(sel: &SelectionOutcome, config: &ProcedureConfig) -> Discoveries {
    Discoveries::new(bonferroni_rvalues(sel, config.c).bonferroni_discoveries(config.alpha))
}

/// FDR-replicability step-up. Under [`Dependence::Arbitrary`] the selection
/// sizes are harmonic-corrected.
pub fn fdr_procedure(sel: &SelectionOutcome, config: &ProcedureConfig) -> Discoveries {
    let table = match config.dependence {
        Dependence::Independent => bonferroni_rvalues(sel, config.c),
        Dependence::Arbitrary => arbitrary_dependence_rvalues(sel, config.c),
    };
    Discoveries::new(table.fdr_discoveries(config.alpha))
}

fn adaptive_table(sel: &SelectionOutcome, config: &ProcedureConfig) -> std::result::Result<RValueTable, AnalysisWarning> {
    let restricted = restrict_by_lambda(sel, config.lambda);
    match plugin_pi0_cross(&restricted, config.lambda) {
        Ok((pi0_1, pi0_2)) => Ok(adaptive_bonferroni_rvalues(&restricted, pi0_1, pi0_2, config.c)),
        Err(Error::EmptyLambdaSelection { study }) => Err(AnalysisWarning::EmptyLambdaSelection { study }),
        Err(e) => unreachable!("plug-in estimation failed: {e}"),
    }
}

/// Adaptive Bonferroni-replicability with plug-in estimates at
/// `config.lambda`.
pub fn adaptive_bonferroni_procedure(sel: &SelectionOutcome, config: &ProcedureConfig) -> Discoveries {
    match adaptive_table(sel, config) {
        Ok(table) => Discoveries::new(table.bonferroni_discoveries(config.alpha)),
        Err(w) => Discoveries::warn(w),
    }
}

/// Adaptive FDR-replicability with plug-in estimates at `config.lambda`.
pub fn adaptive_fdr_procedure(sel: &SelectionOutcome, config: &ProcedureConfig) -> Discoveries {
    match adaptive_table(sel, config) {
        Ok(table) => Discoveries::new(table.fdr_discoveries(config.alpha)),
        Err(w) => Discoveries::warn(w),
    }
}

/// How the per-study selection thresholds are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelectionRule {
    Fixed { t1: f64, t2: f64 },
    /// Data-dependent thresholds solving the equations that make the
    /// discovered set coincide with the selected set.
    Auto,
}

/// Result of [`analyze`].
#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub config: ProcedureConfig,
    /// `None` when data-dependent thresholds do not exist.
    pub selection: Option<SelectionOutcome>,
    pub thresholds: Option<ThresholdSolution>,
    pub table: RValueTable,
    pub discoveries: Discoveries,
}

fn check_combination(config: &ProcedureConfig) -> Result<()> {
    if config.adaptive && config.dependence == Dependence::Arbitrary {
        return Err(Error::InvalidConfig(
            "adaptive procedures are not available under arbitrary dependence".into(),
        ));
    }
    Ok(())
}

/// Runs selection, r-values and thresholding for the configured procedure.
///
/// The Bonferroni-type procedures are valid under any dependence, so
/// `Dependence::Arbitrary` only changes FDR analyses.
pub fn analyze(pvals: &TwoStudyPValues, config: &ProcedureConfig, rule: SelectionRule) -> Result<Analysis> {
    validate(pvals, config)?;
    check_combination(config)?;
    if rule == SelectionRule::Auto && config.dependence == Dependence::Arbitrary {
        return Err(Error::InvalidConfig(
            "data-dependent thresholds are not defined under arbitrary dependence".into(),
        ));
    }

    let (selection, thresholds) = match rule {
        SelectionRule::Fixed { t1, t2 } => (Some(select_by_threshold(pvals, t1, t2)?), None),
        SelectionRule::Auto => {
            let solution = solve_thresholds(pvals, config);
            let sel = if solution.converged {
                Some(select_by_threshold(pvals, solution.t1, solution.t2)?)
            } else {
                None
            };
            (sel, Some(solution))
        }
    };

    let variant = if config.adaptive {
        RValueVariant::Adaptive
    } else if config.dependence == Dependence::Arbitrary && config.error_rate == ErrorRate::Fdr {
        RValueVariant::ArbitraryDependence
    } else {
        RValueVariant::NonAdaptive
    };

    let Some(sel) = selection else {
        return Ok(Analysis {
            config: *config,
            selection: None,
            thresholds,
            table: empty_table(variant, config.c),
            discoveries: Discoveries::warn(AnalysisWarning::NoThresholdSolution),
        });
    };

    let table = match variant {
        RValueVariant::Adaptive => match adaptive_table(&sel, config) {
            Ok(table) => table,
            Err(w) => {
                return Ok(Analysis {
                    config: *config,
                    selection: Some(sel),
                    thresholds,
                    table: empty_table(variant, config.c),
                    discoveries: Discoveries::warn(w),
                })
            }
        },
        RValueVariant::ArbitraryDependence => arbitrary_dependence_rvalues(&sel, config.c),
        RValueVariant::NonAdaptive => bonferroni_rvalues(&sel, config.c),
    };
    let discoveries = Discoveries::new(match config.error_rate {
        ErrorRate::Fwer => table.bonferroni_discoveries(config.alpha),
        ErrorRate::Fdr => table.fdr_discoveries(config.alpha),
    });

    Ok(Analysis {
        config: *config,
        selection: Some(sel),
        thresholds,
        table,
        discoveries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::mice;

    fn ids(d: &Discoveries) -> Vec<usize> {
        d.indices.iter().map(|j| j + 1).collect()
    }

    #[test]
    fn mice_discovery_counts() {
        let sel = select_by_threshold(&mice(), 0.025, 0.025).unwrap();
        let config = ProcedureConfig::new(0.05).with_lambda(0.05);
        assert_eq!(ids(&fwer_procedure(&sel, &config)), [2, 23, 25, 26, 27]);
        assert_eq!(ids(&adaptive_bonferroni_procedure(&sel, &config)), [2, 23, 25, 26, 27]);
        assert_eq!(fdr_procedure(&sel, &config).count(), 9);
        let adaptive = adaptive_fdr_procedure(&sel, &config);
        assert_eq!(ids(&adaptive), [2, 9, 14, 16, 17, 20, 21, 23, 24, 25, 26, 27]);
    }

    #[test]
    fn empty_intersection() {
        let pvals = TwoStudyPValues::one_sided(vec![0.001, 0.9], vec![0.9, 0.001]).unwrap();
        let sel = select_by_threshold(&pvals, 0.025, 0.025).unwrap();
        let config = ProcedureConfig::new(0.05);
        assert_eq!(fwer_procedure(&sel, &config).count(), 0);
        assert_eq!(fdr_procedure(&sel, &config).count(), 0);
    }

    #[test]
    fn boundary_is_rejected() {
        let config = ProcedureConfig::new(0.05);
        let pvals = TwoStudyPValues::one_sided(vec![config.alpha1()], vec![config.alpha2()]).unwrap();
        let sel = select_by_threshold(&pvals, 0.5, 0.5).unwrap();
        assert_eq!(fwer_procedure(&sel, &config).indices, [0]);
    }

    #[test]
    fn nothing_below_first_step() {
        let pvals = TwoStudyPValues::one_sided(vec![0.02, 0.03], vec![0.04, 0.02]).unwrap();
        let sel = select_by_threshold(&pvals, 0.05, 0.05).unwrap();
        // thresholds for r = 1 and r = 2: (0.0125, 0.0125) and (0.025, 0.025)
        assert_eq!(fdr_procedure(&sel, &ProcedureConfig::new(0.05)).count(), 0);
    }

    #[test]
    fn singleton_at_zero_is_rejected() {
        let pvals = TwoStudyPValues::one_sided(vec![0.0], vec![0.0]).unwrap();
        let sel = select_by_threshold(&pvals, 0.025, 0.025).unwrap();
        let d = adaptive_fdr_procedure(&sel, &ProcedureConfig::new(0.05));
        assert_eq!((d.indices.clone(), d.count()), (vec![0], 1));
    }

    #[test]
    fn adaptive_with_empty_lambda_selection_warns() {
        let pvals = TwoStudyPValues::one_sided(vec![0.2, 0.3], vec![0.2, 0.3]).unwrap();
        let sel = select_by_threshold(&pvals, 0.5, 0.5).unwrap();
        let config = ProcedureConfig::new(0.05);
        let d = adaptive_bonferroni_procedure(&sel, &config);
        assert!(d.indices.is_empty());
        assert_eq!(d.warning, Some(AnalysisWarning::EmptyLambdaSelection { study: 1 }));
        let analysis = analyze(&pvals, &config.with_adaptive(true), SelectionRule::Fixed { t1: 0.5, t2: 0.5 }).unwrap();
        assert!(analysis.discoveries.warning.is_some());
        assert!(analysis.table.is_empty());
    }

    #[test]
    fn analyze_mice_all_variants() {
        let data = mice();
        let rule = SelectionRule::Fixed { t1: 0.025, t2: 0.025 };
        let base = ProcedureConfig::new(0.05).with_lambda(0.05);
        let count = |config: ProcedureConfig| analyze(&data, &config, rule).unwrap().discoveries.count();
        assert_eq!(count(base.with_error_rate(ErrorRate::Fwer)), 5);
        assert_eq!(count(base.with_error_rate(ErrorRate::Fwer).with_adaptive(true)), 5);
        assert_eq!(count(base), 9);
        assert_eq!(count(base.with_adaptive(true)), 12);
        let arb = analyze(&data, &base.with_dependence(Dependence::Arbitrary), rule).unwrap();
        assert_eq!(arb.table.variant, RValueVariant::ArbitraryDependence);
        assert!(arb.discoveries.count() <= 9);
    }

    #[test]
    fn invalid_combinations() {
        let data = mice();
        let config = ProcedureConfig::new(0.05)
            .with_adaptive(true)
            .with_dependence(Dependence::Arbitrary);
        assert!(matches!(
            analyze(&data, &config, SelectionRule::Auto),
            Err(Error::InvalidConfig(_))
        ));
        let config = ProcedureConfig::new(0.05).with_c(1.0);
        assert!(analyze(&data, &config, SelectionRule::Auto).is_err());
    }
}
