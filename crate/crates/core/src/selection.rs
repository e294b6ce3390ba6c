//! Stable selection rules: fixed per-study thresholds, lambda restriction and
//! directional selection for two-sided alternatives.
//!
//! Every rule here thresholds each study's p-values independently, so a
//! selected feature can move its own p-value anywhere below the threshold
//! without changing the selected set.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{right_sided, PValueMode, TwoStudyPValues};

/// Direction of the claimed effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Left,
    Right,
    /// One-sided input, or the studies disagree on the favoured direction.
    NotApplicable,
}

impl Direction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Direction::Left => "left",
            Direction::Right => "right",
            Direction::NotApplicable => "na",
        }
    }
}

/// Per-feature p-values after resolving directions.
///
/// `selection_p*` are the values thresholds are applied to (the raw value in
/// one-sided mode, `min(p_left, p_right)` in left-sided mode); `working_p*`
/// are the values fed to r-values and plug-in estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedPValues {
    pub(crate) selection_p1: Vec<f64>,
    pub(crate) selection_p2: Vec<f64>,
    pub(crate) working_p1: Vec<f64>,
    pub(crate) working_p2: Vec<f64>,
    pub(crate) directions: Vec<Direction>,
    pub(crate) directional: bool,
}

impl ResolvedPValues {
    pub fn new(pvals: &TwoStudyPValues) -> Self {
        match pvals.mode() {
            PValueMode::OneSided => Self {
                selection_p1: pvals.p1().to_vec(),
                selection_p2: pvals.p2().to_vec(),
                working_p1: pvals.p1().to_vec(),
                working_p2: pvals.p2().to_vec(),
                directions: vec![Direction::NotApplicable; pvals.m()],
                directional: false,
            },
            PValueMode::LeftSided => Self::directional(pvals.p1(), pvals.p2()),
        }
    }

    fn directional(left1: &[f64], left2: &[f64]) -> Self {
        let m = left1.len();
        let mut out = Self {
            selection_p1: Vec::with_capacity(m),
            selection_p2: Vec::with_capacity(m),
            working_p1: Vec::with_capacity(m),
            working_p2: Vec::with_capacity(m),
            directions: Vec::with_capacity(m),
            directional: true,
        };
        for (&l1, &l2) in left1.iter().zip(left2) {
            let (r1, r2) = (right_sided(l1), right_sided(l2));
            out.selection_p1.push(l1.min(r1));
            out.selection_p2.push(l2.min(r2));
            out.working_p1.push(side_of_other(l1, r1, l2, r2));
            out.working_p2.push(side_of_other(l2, r2, l1, r1));
            let direction = if l1.max(l2) < 0.5 {
                Direction::Left
            } else if r1.max(r2) < 0.5 {
                Direction::Right
            } else {
                Direction::NotApplicable
            };
            out.directions.push(direction);
        }
        out
    }

    pub fn m(&self) -> usize {
        self.selection_p1.len()
    }

    pub fn is_directional(&self) -> bool {
        self.directional
    }

    /// Whether feature `j` may enter the replicability working set. Always
    /// true for one-sided input.
    pub fn is_concordant(&self, j: usize) -> bool {
        !self.directional || self.directions[j] != Direction::NotApplicable
    }

    pub fn selection_p1(&self) -> &[f64] {
        &self.selection_p1
    }

    pub fn selection_p2(&self) -> &[f64] {
        &self.selection_p2
    }

    pub fn working_p1(&self) -> &[f64] {
        &self.working_p1
    }

    pub fn working_p2(&self) -> &[f64] {
        &self.working_p2
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }
}

/// One-sided p-value of this study in the direction favoured by the other
/// study. A tie in the other study takes the larger (conservative) side.
fn side_of_other(left: f64, right: f64, other_left: f64, other_right: f64) -> f64 {
    if other_left < other_right {
        left
    } else if other_left > other_right {
        right
    } else {
        left.max(right)
    }
}

/// Selected index sets of both studies plus the working set for
/// replicability analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionOutcome {
    resolved: ResolvedPValues,
    t1: f64,
    t2: f64,
    lambda: Option<f64>,
    s1: Vec<usize>,
    s2: Vec<usize>,
    s1_lambda: Vec<usize>,
    s2_lambda: Vec<usize>,
    intersection: Vec<usize>,
}

impl SelectionOutcome {
    /// Thresholds already-resolved p-values: `S_i = {j : p_ij <= t_i}`.
    pub fn from_resolved(resolved: ResolvedPValues, t1: f64, t2: f64) -> Self {
        let s1 = indices_at_most(&resolved.selection_p1, t1);
        let s2 = indices_at_most(&resolved.selection_p2, t2);
        let intersection = intersect(&s1, &s2, &resolved);
        Self {
            s1_lambda: s1.clone(),
            s2_lambda: s2.clone(),
            resolved,
            t1,
            t2,
            lambda: None,
            s1,
            s2,
            intersection,
        }
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    /// The lambda used by [`restrict_by_lambda`], if any.
    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    pub fn s1(&self) -> &[usize] {
        &self.s1
    }

    pub fn s2(&self) -> &[usize] {
        &self.s2
    }

    /// `S_1 ∩ {j : p_1j <= lambda}`; equal to `S_1` before restriction.
    pub fn s1_lambda(&self) -> &[usize] {
        &self.s1_lambda
    }

    pub fn s2_lambda(&self) -> &[usize] {
        &self.s2_lambda
    }

    /// Working set; in directional mode only concordant features.
    pub fn intersection(&self) -> &[usize] {
        &self.intersection
    }

    pub fn working_p1(&self) -> &[f64] {
        &self.resolved.working_p1
    }

    pub fn working_p2(&self) -> &[f64] {
        &self.resolved.working_p2
    }

    pub fn directions(&self) -> &[Direction] {
        &self.resolved.directions
    }

    pub fn resolved(&self) -> &ResolvedPValues {
        &self.resolved
    }

    pub fn is_directional(&self) -> bool {
        self.resolved.directional
    }
}

fn indices_at_most(p: &[f64], t: f64) -> Vec<usize> {
    p.iter()
        .enumerate()
        .filter(|&(_, &v)| v <= t)
        .map(|(j, _)| j)
        .collect()
}

fn intersect(a: &[usize], b: &[usize], resolved: &ResolvedPValues) -> Vec<usize> {
    let (mut i, mut k) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && k < b.len() {
        match a[i].cmp(&b[k]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => k += 1,
            std::cmp::Ordering::Equal => {
                if resolved.is_concordant(a[i]) {
                    out.push(a[i]);
                }
                i += 1;
                k += 1;
            }
        }
    }
    out
}

fn check_threshold(name: &'static str, t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::ThresholdOutOfRange { name, value: t })
    }
}

/// Selects `{j : p_ij <= t_i}` in each study.
///
/// Left-sided input is routed through [`directional_select`].
pub fn select_by_threshold(pvals: &TwoStudyPValues, t1: f64, t2: f64) -> Result<SelectionOutcome> {
    check_threshold("t1", t1)?;
    check_threshold("t2", t2)?;
    Ok(SelectionOutcome::from_resolved(ResolvedPValues::new(pvals), t1, t2))
}

/// Directional selection: each study selects on its smaller one-sided
/// p-value, and only features whose favoured direction agrees in both
/// studies enter the working set.
pub fn directional_select(pvals: &TwoStudyPValues, t1: f64, t2: f64) -> Result<SelectionOutcome> {
    if pvals.mode() != PValueMode::LeftSided {
        return Err(Error::NotLeftSided);
    }
    select_by_threshold(pvals, t1, t2)
}

/// Restricts both selections to features with selection p-value at most
/// `lambda` and recomputes the working set.
pub fn restrict_by_lambda(sel: &SelectionOutcome, lambda: f64) -> SelectionOutcome {
    let keep = |set: &[usize], p: &[f64]| -> Vec<usize> {
        set.iter().copied().filter(|&j| p[j] <= lambda).collect()
    };
    let s1_lambda = keep(&sel.s1, &sel.resolved.selection_p1);
    let s2_lambda = keep(&sel.s2, &sel.resolved.selection_p2);
    let intersection = intersect(&s1_lambda, &s2_lambda, &sel.resolved);
    SelectionOutcome {
        resolved: sel.resolved.clone(),
        t1: sel.t1,
        t2: sel.t2,
        lambda: Some(lambda),
        s1: sel.s1.clone(),
        s2: sel.s2.clone(),
        s1_lambda,
        s2_lambda,
        intersection,
    }
}
