//! Shared domain types: the two-study p-value matrix, procedure
//! configuration and (simulation) ground truth.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the stored p-values are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PValueMode {
    /// One-sided p-values against a pre-specified alternative.
    OneSided,
    /// Left-sided p-values; the right-sided value is always `1 - p_left`.
    LeftSided,
}

/// The `m x 2` matrix of p-values, one column per study.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoStudyPValues {
    p1: Vec<f64>,
    p2: Vec<f64>,
    mode: PValueMode,
    feature_ids: Vec<String>,
}

impl TwoStudyPValues {
    /// Builds a one-sided table with default feature ids `"1".."m"`.
    pub fn one_sided(p1: Vec<f64>, p2: Vec<f64>) -> Result<Self> {
        Self::new(p1, p2, PValueMode::OneSided, None)
    }

    /// Builds a left-sided table with default feature ids `"1".."m"`.
    pub fn left_sided(p1_left: Vec<f64>, p2_left: Vec<f64>) -> Result<Self> {
        Self::new(p1_left, p2_left, PValueMode::LeftSided, None)
    }

    pub fn new(
        p1: Vec<f64>,
        p2: Vec<f64>,
        mode: PValueMode,
        feature_ids: Option<Vec<String>>,
    ) -> Result<Self> {
        if p1.len() != p2.len() {
            return Err(Error::LengthMismatch {
                len1: p1.len(),
                len2: p2.len(),
            });
        }
        if p1.is_empty() {
            return Err(Error::NoFeatures);
        }
        for (study, column) in [(1, &p1), (2, &p2)] {
            for (index, &value) in column.iter().enumerate() {
                check_probability(study, index, value)?;
            }
        }
        let feature_ids = match feature_ids {
            Some(ids) if ids.len() != p1.len() => {
                return Err(Error::FeatureIdMismatch {
                    expected: p1.len(),
                    got: ids.len(),
                })
            }
            Some(ids) => ids,
            None => (1..=p1.len()).map(|j| j.to_string()).collect(),
        };
        Ok(Self {
            p1,
            p2,
            mode,
            feature_ids,
        })
    }

    /// Number of features.
    pub fn m(&self) -> usize {
        self.p1.len()
    }

    pub fn mode(&self) -> PValueMode {
        self.mode
    }

    /// Stored p-values of study 1 (left-sided in [`PValueMode::LeftSided`]).
    pub fn p1(&self) -> &[f64] {
        &self.p1
    }

    /// Stored p-values of study 2 (left-sided in [`PValueMode::LeftSided`]).
    pub fn p2(&self) -> &[f64] {
        &self.p2
    }

    pub fn study(&self, study: Study) -> &[f64] {
        match study {
            Study::One => &self.p1,
            Study::Two => &self.p2,
        }
    }

    pub fn feature_ids(&self) -> &[String] {
        &self.feature_ids
    }

    /// Right-sided p-value of feature `j`, derived as `1 - p_left`.
    ///
    /// Only meaningful in left-sided mode; in one-sided mode it is the
    /// complement of the stored value all the same.
    pub fn right(&self, study: Study, j: usize) -> f64 {
        right_sided(self.study(study)[j])
    }
}

/// Right-sided p-value under continuity of the test statistic.
#[inline]
pub fn right_sided(p_left: f64) -> f64 {
    1.0 - p_left
}

fn check_probability(study: usize, index: usize, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::PValueOutOfRange {
            study,
            index,
            value,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Study {
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorRate {
    Fwer,
    Fdr,
}

/// Dependence assumption within each study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dependence {
    Independent,
    /// Harmonic-sum corrected FDR r-values, valid under any within-study
    /// dependence.
    Arbitrary,
}

/// Level, level split and plug-in parameters of a replicability analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcedureConfig {
    pub alpha: f64,
    /// Fraction of `alpha` spent on study one.
    pub c: f64,
    pub lambda: f64,
    pub adaptive: bool,
    pub dependence: Dependence,
    pub error_rate: ErrorRate,
}

impl ProcedureConfig {
    /// Defaults: `c = 0.5`, `lambda = alpha`, non-adaptive FDR under
    /// independence.
    pub fn new(alpha: f64) -> Self {
        Self {
            alpha,
            c: 0.5,
            lambda: alpha,
            adaptive: false,
            dependence: Dependence::Independent,
            error_rate: ErrorRate::Fdr,
        }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_adaptive(mut self, adaptive: bool) -> Self {
        self.adaptive = adaptive;
        self
    }

    pub fn with_dependence(mut self, dependence: Dependence) -> Self {
        self.dependence = dependence;
        self
    }

    pub fn with_error_rate(mut self, error_rate: ErrorRate) -> Self {
        self.error_rate = error_rate;
        self
    }

    /// Level spent on study one, `c * alpha`.
    pub fn alpha1(&self) -> f64 {
        self.c * self.alpha
    }

    /// Level spent on study two, `alpha - alpha1`.
    pub fn alpha2(&self) -> f64 {
        self.alpha - self.alpha1()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("alpha", self.alpha), ("c", self.c), ("lambda", self.lambda)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::ParameterOutOfRange { name, value });
            }
        }
        Ok(())
    }
}

impl Default for ProcedureConfig {
    fn default() -> Self {
        Self::new(0.05)
    }
}

/// Checks the inputs of an analysis. The p-value table enforces its own
/// invariants at construction, so only the configuration can fail here.
pub fn validate<'a>(
    pvals: &'a TwoStudyPValues,
    config: &'a ProcedureConfig,
) -> Result<(&'a TwoStudyPValues, &'a ProcedureConfig)> {
    config.validate()?;
    Ok((pvals, config))
}

/// Ground-truth hypothesis indicators: `true` means the feature is non-null
/// in that study.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypothesisStates {
    h1: Vec<bool>,
    h2: Vec<bool>,
}

impl HypothesisStates {
    pub fn new(h1: Vec<bool>, h2: Vec<bool>) -> Result<Self> {
        if h1.len() != h2.len() {
            return Err(Error::LengthMismatch {
                len1: h1.len(),
                len2: h2.len(),
            });
        }
        Ok(Self { h1, h2 })
    }

    pub fn m(&self) -> usize {
        self.h1.len()
    }

    pub fn h1(&self) -> &[bool] {
        &self.h1
    }

    pub fn h2(&self) -> &[bool] {
        &self.h2
    }

    /// The feature is non-null in both studies.
    pub fn is_replicated(&self, j: usize) -> bool {
        self.h1[j] && self.h2[j]
    }

    /// Number of features in the non-replicability null, states (0,0),
    /// (0,1) and (1,0).
    pub fn count_nonreplicated(&self) -> usize {
        (0..self.m()).filter(|&j| !self.is_replicated(j)).count()
    }

    pub fn count_replicated(&self) -> usize {
        self.m() - self.count_nonreplicated()
    }
}
