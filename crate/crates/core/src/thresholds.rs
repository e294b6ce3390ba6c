//! Data-dependent selection thresholds.
//!
//! The thresholds `(t1, t2)` are chosen so that the features discovered by
//! the procedure coincide with the features selected. For the Bonferroni
//! procedure this is the system
//!
//! ```text
//! t1 = alpha1 / G2(t2),    t2 = alpha2 / G1(t1)
//! ```
//!
//! where `G_i` is the size of study `i`'s selection (or its plug-in weighted
//! size for the adaptive procedure). The FDR systems multiply both right-hand
//! sides by the size of the selected intersection.
//!
//! Every right-hand side is a step function of counts, so the system is
//! solved by alternating fixed-point iteration: start from the largest
//! admissible `t1`, then repeat `t2 <- g2(t1, t2)`, `t1 <- g1(t1, t2)` until
//! both equations hold exactly, a state repeats, or a selection runs empty.
//! For the Bonferroni systems the map is monotone and the iteration descends
//! to the largest solution. Only the first solution reached is reported;
//! other solutions may exist.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::inflated_weight;
use crate::model::{ErrorRate, HypothesisStates, ProcedureConfig, TwoStudyPValues};
use crate::selection::ResolvedPValues;

/// Which equation system was solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdSystem {
    Bonferroni,
    AdaptiveBonferroni,
    Fdr,
    AdaptiveFdr,
    /// Bonferroni system with the true numbers of nulls among the selected.
    OracleBonferroni,
}

impl ThresholdSystem {
    pub fn for_config(config: &ProcedureConfig) -> Self {
        match (config.error_rate, config.adaptive) {
            (ErrorRate::Fwer, false) => ThresholdSystem::Bonferroni,
            (ErrorRate::Fwer, true) => ThresholdSystem::AdaptiveBonferroni,
            (ErrorRate::Fdr, false) => ThresholdSystem::Fdr,
            (ErrorRate::Fdr, true) => ThresholdSystem::AdaptiveFdr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdSolution {
    pub system: ThresholdSystem,
    pub t1: f64,
    pub t2: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Iterates `(t1, t2)`, starting point first.
    pub trajectory: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Weights<'a> {
    /// `G_i(t) = |S_i(t)|`.
    Counts,
    /// `G_i(t) = |S_{i,lambda}(t)| * pi0_hat = (1 + exceedances) / (1 - lambda)`.
    PlugIn { lambda: f64 },
    /// `G_i(t)` = number of features selected by study `i` that are null in
    /// the other study.
    TrueNulls { states: &'a HypothesisStates },
}

/// One equation system over resolved p-values.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ThresholdProblem<'a> {
    pub resolved: &'a ResolvedPValues,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Selection is `{j : p_ij <= min(cap, t_i)}`.
    pub cap: f64,
    pub weights: Weights<'a>,
    /// FDR-type system: numerators carry the intersection size.
    pub step_up: bool,
    /// A zero weight means an unbounded threshold, clamped to one, rather
    /// than an undefined right-hand side.
    pub zero_weight_is_unbounded: bool,
    pub start: (f64, f64),
    pub system: ThresholdSystem,
}

impl ThresholdProblem<'_> {
    fn selected1(&self, j: usize, t1: f64) -> bool {
        self.resolved.selection_p1[j] <= self.cap.min(t1)
    }

    fn selected2(&self, j: usize, t2: f64) -> bool {
        self.resolved.selection_p2[j] <= self.cap.min(t2)
    }

    /// Weight of study one's selection, the denominator of the `t2` equation.
    pub(crate) fn g1(&self, t1: f64) -> f64 {
        let m = self.resolved.m();
        match self.weights {
            Weights::Counts => (0..m).filter(|&j| self.selected1(j, t1)).count() as f64,
            Weights::PlugIn { lambda } => inflated_weight(
                (0..m)
                    .filter(|&j| self.selected1(j, t1) && self.resolved.working_p2[j] > lambda)
                    .count(),
                lambda,
            ),
            Weights::TrueNulls { states } => (0..m)
                .filter(|&j| self.selected1(j, t1) && !states.h2()[j])
                .count() as f64,
        }
    }

    /// Weight of study two's selection, the denominator of the `t1` equation.
    pub(crate) fn g2(&self, t2: f64) -> f64 {
        let m = self.resolved.m();
        match self.weights {
            Weights::Counts => (0..m).filter(|&j| self.selected2(j, t2)).count() as f64,
            Weights::PlugIn { lambda } => inflated_weight(
                (0..m)
                    .filter(|&j| self.selected2(j, t2) && self.resolved.working_p1[j] > lambda)
                    .count(),
                lambda,
            ),
            Weights::TrueNulls { states } => (0..m)
                .filter(|&j| self.selected2(j, t2) && !states.h1()[j])
                .count() as f64,
        }
    }

    /// Size of the selected and (in directional mode) concordant
    /// intersection.
    fn intersection(&self, t1: f64, t2: f64) -> usize {
        (0..self.resolved.m())
            .filter(|&j| self.selected1(j, t1) && self.selected2(j, t2) && self.resolved.is_concordant(j))
            .count()
    }

    /// Selection sizes `(|S_1(t1)|, |S_2(t2)|)` under the problem's cap.
    fn selection_sizes(&self, t1: f64, t2: f64) -> (usize, usize) {
        let m = self.resolved.m();
        (
            (0..m).filter(|&j| self.selected1(j, t1)).count(),
            (0..m).filter(|&j| self.selected2(j, t2)).count(),
        )
    }

    fn bound(&self, level: f64, weight: f64) -> Option<f64> {
        if weight > 0.0 {
            Some(level / weight)
        } else if self.zero_weight_is_unbounded {
            Some(1.0)
        } else {
            None
        }
    }

    fn numerator(&self, t1: f64, t2: f64) -> Option<f64> {
        if !self.step_up {
            return Some(1.0);
        }
        match self.intersection(t1, t2) {
            0 => None,
            k => Some(k as f64),
        }
    }

    /// Right-hand side of the `t1` equation.
    pub(crate) fn rhs1(&self, t1: f64, t2: f64) -> Option<f64> {
        let k = self.numerator(t1, t2)?;
        self.bound(self.alpha1, self.g2(t2)).map(|b| (k * b).min(1.0))
    }

    /// Right-hand side of the `t2` equation.
    pub(crate) fn rhs2(&self, t1: f64, t2: f64) -> Option<f64> {
        let k = self.numerator(t1, t2)?;
        self.bound(self.alpha2, self.g1(t1)).map(|b| (k * b).min(1.0))
    }

    fn is_fixed_point(&self, t1: f64, t2: f64) -> bool {
        self.rhs1(t1, t2) == Some(t1) && self.rhs2(t1, t2) == Some(t2)
    }

    pub(crate) fn solve(&self) -> ThresholdSolution {
        let (mut t1, mut t2) = self.start;
        let mut trajectory = vec![(t1, t2)];
        let mut visited = HashSet::new();
        visited.insert((t1.to_bits(), t2.to_bits()));
        let max_iterations = 10 * self.resolved.m().max(1);

        let finish = |t1, t2, converged, iterations, trajectory| ThresholdSolution {
            system: self.system,
            t1,
            t2,
            converged,
            iterations,
            trajectory,
        };

        for iteration in 1..=max_iterations {
            let Some(next2) = self.rhs2(t1, t2) else {
                return finish(t1, t2, false, iteration, trajectory);
            };
            t2 = next2;
            let Some(next1) = self.rhs1(t1, t2) else {
                return finish(t1, t2, false, iteration, trajectory);
            };
            t1 = next1;
            trajectory.push((t1, t2));

            if self.is_fixed_point(t1, t2) {
                let (n1, n2) = self.selection_sizes(t1, t2);
                // a solution needs nonempty selections in both studies
                let converged = n1 > 0 && n2 > 0;
                return finish(t1, t2, converged, iteration, trajectory);
            }
            if !visited.insert((t1.to_bits(), t2.to_bits())) {
                return finish(t1, t2, false, iteration, trajectory);
            }
        }
        finish(t1, t2, false, max_iterations, trajectory)
    }
}

fn problem<'a>(
    resolved: &'a ResolvedPValues,
    config: &ProcedureConfig,
    system: ThresholdSystem,
    states: Option<&'a HypothesisStates>,
) -> ThresholdProblem<'a> {
    let (alpha1, alpha2) = (config.alpha1(), config.alpha2());
    let (cap, weights, step_up) = match system {
        ThresholdSystem::Bonferroni => (1.0, Weights::Counts, false),
        ThresholdSystem::Fdr => (1.0, Weights::Counts, true),
        ThresholdSystem::AdaptiveBonferroni => (config.lambda, Weights::PlugIn { lambda: config.lambda }, false),
        ThresholdSystem::AdaptiveFdr => (config.lambda, Weights::PlugIn { lambda: config.lambda }, true),
        ThresholdSystem::OracleBonferroni => (
            1.0,
            Weights::TrueNulls {
                states: states.expect("oracle system needs hypothesis states"),
            },
            false,
        ),
    };
    let oracle = system == ThresholdSystem::OracleBonferroni;
    ThresholdProblem {
        resolved,
        alpha1,
        alpha2,
        cap,
        weights,
        step_up,
        zero_weight_is_unbounded: oracle,
        start: if oracle { (1.0, 1.0) } else { (alpha1, alpha2) },
        system,
    }
}

fn solve_system(pvals: &TwoStudyPValues, config: &ProcedureConfig, system: ThresholdSystem) -> ThresholdSolution {
    let resolved = ResolvedPValues::new(pvals);
    problem(&resolved, config, system, None).solve()
}

/// Solves `t1 = alpha1 / |S_2(t2)|`, `t2 = alpha2 / |S_1(t1)|`.
pub fn solve_fwer_thresholds(pvals: &TwoStudyPValues, config: &ProcedureConfig) -> ThresholdSolution {
    solve_system(pvals, config, ThresholdSystem::Bonferroni)
}

/// Adaptive Bonferroni system with `S_{i,lambda}(t) = {j : p_ij <= min(lambda, t)}`.
pub fn solve_adaptive_fwer_thresholds(pvals: &TwoStudyPValues, config: &ProcedureConfig) -> ThresholdSolution {
    solve_system(pvals, config, ThresholdSystem::AdaptiveBonferroni)
}

/// Solves `t1 = |S_1 ∩ S_2| alpha1 / |S_2(t2)|`, `t2 = |S_1 ∩ S_2| alpha2 / |S_1(t1)|`.
pub fn solve_fdr_thresholds(pvals: &TwoStudyPValues, config: &ProcedureConfig) -> ThresholdSolution {
    solve_system(pvals, config, ThresholdSystem::Fdr)
}

/// Adaptive FDR system over the lambda-restricted selections.
pub fn solve_adaptive_fdr_thresholds(pvals: &TwoStudyPValues, config: &ProcedureConfig) -> ThresholdSolution {
    solve_system(pvals, config, ThresholdSystem::AdaptiveFdr)
}

/// Solves the system matching `config.error_rate` and `config.adaptive`.
pub fn solve_thresholds(pvals: &TwoStudyPValues, config: &ProcedureConfig) -> ThresholdSolution {
    solve_system(pvals, config, ThresholdSystem::for_config(config))
}

/// Bonferroni system whose weights are the true numbers of nulls among the
/// selected. A zero count leaves the threshold at one.
pub fn solve_oracle_thresholds(
    pvals: &TwoStudyPValues,
    states: &HypothesisStates,
    config: &ProcedureConfig,
) -> ThresholdSolution {
    let resolved = ResolvedPValues::new(pvals);
    problem(&resolved, config, ThresholdSystem::OracleBonferroni, Some(states)).solve()
}

/// Checks that `candidate` does not dominate `solution`: with
/// `u(t1, t2) = (min(t1, alpha1 / G2(t2)), min(alpha2 / G1(t1), t2))`, no
/// candidate may give both coordinates at least as large with one strictly
/// larger. Defined for the Bonferroni-type systems.
pub fn check_non_domination(
    candidate: (f64, f64),
    solution: &ThresholdSolution,
    pvals: &TwoStudyPValues,
    config: &ProcedureConfig,
) -> Result<bool> {
    let system = solution.system;
    if !matches!(system, ThresholdSystem::Bonferroni | ThresholdSystem::AdaptiveBonferroni) {
        return Err(Error::NotBonferroniSystem);
    }
    if !solution.converged {
        return Err(Error::InvalidConfig("solution did not converge".into()));
    }
    let resolved = ResolvedPValues::new(pvals);
    let problem = problem(&resolved, config, system, None);
    let u = |t1: f64, t2: f64| {
        let ratio = |level: f64, weight: f64| if weight > 0.0 { level / weight } else { f64::INFINITY };
        (
            t1.min(ratio(problem.alpha1, problem.g2(t2))),
            ratio(problem.alpha2, problem.g1(t1)).min(t2),
        )
    };
    let (c1, c2) = u(candidate.0, candidate.1);
    let (s1, s2) = u(solution.t1, solution.t2);
    let dominates = c1 >= s1 && c2 >= s2 && (c1 > s1 || c2 > s2);
    Ok(!dominates)
}
