//! r-values: the smallest FWER or FDR level at which a feature is declared
//! replicated, plus the single-study and maximum-p-value comparators.

use serde::Serialize;

use crate::error::Result;
use crate::estimators::plugin_pi0_cross;
use crate::model::{right_sided, PValueMode, TwoStudyPValues};
use crate::selection::{restrict_by_lambda, SelectionOutcome};

/// Which family of r-values a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RValueVariant {
    NonAdaptive,
    Adaptive,
    ArbitraryDependence,
}

/// Comparator adjustment kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjustKind {
    Bonferroni,
    /// Benjamini-Hochberg step-up.
    Bh,
}

/// Multipliers of a Bonferroni-type r-value
/// `max(study1 * p1 / c, study2 * p2 / (1 - c))`.
///
/// Non-adaptive r-values use `(S_2, S_1)`, adaptive r-values
/// `(S_{2,lambda} pi0_1, S_{1,lambda} pi0_2)` and the arbitrary-dependence
/// variant harmonic-corrected sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepUpWeights {
    pub study1: f64,
    pub study2: f64,
}

/// Bonferroni-type r-values over a working set, the input of [`fdr_step`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepUpInput {
    pub indices: Vec<usize>,
    pub base_r: Vec<f64>,
}

impl StepUpInput {
    pub fn new(
        indices: &[usize],
        working_p1: &[f64],
        working_p2: &[f64],
        weights: StepUpWeights,
        c: f64,
    ) -> Self {
        let base_r = indices
            .iter()
            .map(|&j| {
                (weights.study1 * working_p1[j] / c).max(weights.study2 * working_p2[j] / (1.0 - c))
            })
            .collect();
        Self {
            indices: indices.to_vec(),
            base_r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RValueEntry {
    /// Position of the feature in the input table.
    pub index: usize,
    /// Bonferroni-type r-value (adaptive or harmonic-corrected according to
    /// the table variant), unclamped.
    pub bonferroni_r: f64,
    /// Step-up FDR r-value, unclamped.
    pub fdr_r: f64,
}

impl RValueEntry {
    /// Bonferroni r-value as reported to users, at most one.
    pub fn reported_bonferroni(&self) -> f64 {
        self.bonferroni_r.min(1.0)
    }

    /// FDR r-value as reported to users, at most one.
    pub fn reported_fdr(&self) -> f64 {
        self.fdr_r.min(1.0)
    }
}

/// Per-feature r-values over the working set, in input order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RValueTable {
    pub entries: Vec<RValueEntry>,
    pub variant: RValueVariant,
    /// Plug-in estimates `(pi0_1, pi0_2)`, adaptive tables only.
    pub pi0: Option<(f64, f64)>,
    pub c: f64,
}

impl RValueTable {
    fn from_input(input: StepUpInput, variant: RValueVariant, pi0: Option<(f64, f64)>, c: f64) -> Self {
        let fdr = fdr_step(&input.base_r);
        let entries = input
            .indices
            .iter()
            .zip(input.base_r.iter().zip(fdr))
            .map(|(&index, (&bonferroni_r, fdr_r))| RValueEntry {
                index,
                bonferroni_r,
                fdr_r,
            })
            .collect();
        Self {
            entries,
            variant,
            pi0,
            c,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bonferroni(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.bonferroni_r).collect()
    }

    pub fn fdr(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.fdr_r).collect()
    }

    pub fn get(&self, index: usize) -> Option<&RValueEntry> {
        self.entries.iter().find(|e| e.index == index)
    }

    /// Features with Bonferroni-type r-value at most `alpha`.
    pub fn bonferroni_discoveries(&self, alpha: f64) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| e.bonferroni_r <= alpha)
            .map(|e| e.index)
            .collect()
    }

    /// Features with FDR r-value at most `alpha`.
    pub fn fdr_discoveries(&self, alpha: f64) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| e.fdr_r <= alpha)
            .map(|e| e.index)
            .collect()
    }
}

/// Step-up transform: `out_j = min over {i : r_i >= r_j} of r_i / rank(r_i)`,
/// ranks ascending with the maximum rank for ties.
pub fn fdr_step(base: &[f64]) -> Vec<f64> {
    let n = base.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| base[a].total_cmp(&base[b]));

    let mut out = vec![0.0; n];
    let mut running = f64::INFINITY;
    let mut pos = n;
    while pos > 0 {
        // tie group occupying sorted positions [start, pos), all of rank `pos`
        let value = base[order[pos - 1]];
        let mut start = pos - 1;
        while start > 0 && base[order[start - 1]] == value {
            start -= 1;
        }
        running = running.min(value / pos as f64);
        for &j in &order[start..pos] {
            out[j] = running;
        }
        pos = start;
    }
    out
}

/// `sum_{k=1}^{n} 1/k`.
pub fn harmonic(n: usize) -> f64 {
    (1..=n).map(|k| 1.0 / k as f64).sum()
}

/// Non-adaptive Bonferroni r-values `max(S_2 p_1j / c, S_1 p_2j / (1 - c))`
/// over the working set, together with their FDR step-up.
pub fn bonferroni_rvalues(sel: &SelectionOutcome, c: f64) -> RValueTable {
    let weights = StepUpWeights {
        study1: sel.s2().len() as f64,
        study2: sel.s1().len() as f64,
    };
    let input = StepUpInput::new(sel.intersection(), sel.working_p1(), sel.working_p2(), weights, c);
    RValueTable::from_input(input, RValueVariant::NonAdaptive, None, c)
}

/// Non-adaptive FDR r-values in working-set order.
pub fn fdr_rvalues(sel: &SelectionOutcome, c: f64) -> Vec<f64> {
    bonferroni_rvalues(sel, c).fdr()
}

/// Adaptive r-values over `S_{1,lambda} ∩ S_{2,lambda}` for given plug-in
/// estimates. `sel` should already be restricted by lambda.
pub fn adaptive_bonferroni_rvalues(sel: &SelectionOutcome, pi0_1: f64, pi0_2: f64, c: f64) -> RValueTable {
    let weights = StepUpWeights {
        study1: pi0_1 * sel.s2_lambda().len() as f64,
        study2: pi0_2 * sel.s1_lambda().len() as f64,
    };
    let input = StepUpInput::new(sel.intersection(), sel.working_p1(), sel.working_p2(), weights, c);
    RValueTable::from_input(input, RValueVariant::Adaptive, Some((pi0_1, pi0_2)), c)
}

/// Adaptive FDR r-values in working-set order.
pub fn adaptive_fdr_rvalues(sel: &SelectionOutcome, pi0_1: f64, pi0_2: f64, c: f64) -> Vec<f64> {
    adaptive_bonferroni_rvalues(sel, pi0_1, pi0_2, c).fdr()
}

/// Restricts `sel` by `lambda`, estimates the null fractions and computes
/// the adaptive table.
pub fn adaptive_rvalues(sel: &SelectionOutcome, lambda: f64, c: f64) -> Result<RValueTable> {
    let restricted = restrict_by_lambda(sel, lambda);
    let (pi0_1, pi0_2) = plugin_pi0_cross(&restricted, lambda)?;
    Ok(adaptive_bonferroni_rvalues(&restricted, pi0_1, pi0_2, c))
}

/// r-values valid under arbitrary within-study dependence: the selection
/// sizes are inflated by their harmonic sums before the step-up.
pub fn arbitrary_dependence_rvalues(sel: &SelectionOutcome, c: f64) -> RValueTable {
    let (n1, n2) = (sel.s1().len(), sel.s2().len());
    let weights = StepUpWeights {
        study1: harmonic(n2) * n2 as f64,
        study2: harmonic(n1) * n1 as f64,
    };
    let input = StepUpInput::new(sel.intersection(), sel.working_p1(), sel.working_p2(), weights, c);
    RValueTable::from_input(input, RValueVariant::ArbitraryDependence, None, c)
}

/// Per-feature maximum p-value across the two studies. For left-sided input
/// this is `2 min(max(pL_1, pL_2), max(pR_1, pR_2))`, which may exceed one
/// for discordant features.
pub fn max_pvalues(pvals: &TwoStudyPValues) -> Vec<f64> {
    let pairs = pvals.p1().iter().zip(pvals.p2());
    match pvals.mode() {
        PValueMode::OneSided => pairs.map(|(&a, &b)| a.max(b)).collect(),
        PValueMode::LeftSided => pairs
            .map(|(&l1, &l2)| 2.0 * l1.max(l2).min(right_sided(l1).max(right_sided(l2))))
            .collect(),
    }
}

/// Bonferroni-on-max (`m max_j`) or BH-on-max r-values over all features.
pub fn max_comparator_rvalues(pvals: &TwoStudyPValues, kind: AdjustKind) -> Vec<f64> {
    adjusted_pvalues_single(&max_pvalues(pvals), kind)
}

/// Single-family adjusted p-values: Bonferroni `m p` or BH step-up.
/// Values are not clamped.
pub fn adjusted_pvalues_single(pvalues: &[f64], kind: AdjustKind) -> Vec<f64> {
    let m = pvalues.len() as f64;
    let scaled: Vec<f64> = pvalues.iter().map(|&p| m * p).collect();
    match kind {
        AdjustKind::Bonferroni => scaled,
        AdjustKind::Bh => fdr_step(&scaled),
    }
}
