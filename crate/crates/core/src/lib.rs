//! Replicability analysis of features measured in two independent studies.
//!
//! A feature is replicated when its null hypothesis is false in both
//! studies. The procedures here select promising features in each study,
//! then control the FWER or FDR of replicability claims over the features
//! selected by both, reporting an r-value per feature: the smallest level at
//! which it would be declared replicated.
//!
//! ```
//! use twostudy::{analyze, fixtures, ProcedureConfig, SelectionRule};
//!
//! let config = ProcedureConfig::new(0.05).with_adaptive(true);
//! let analysis = analyze(&fixtures::mice(), &config, SelectionRule::Fixed { t1: 0.025, t2: 0.025 }).unwrap();
//! assert_eq!(analysis.discoveries.count(), 12);
//! ```

pub mod error;
pub mod estimators;
pub mod fixtures;
pub mod io;
pub mod model;
pub mod procedures;
pub mod rvalues;
pub mod selection;
pub mod simulation;
pub mod thresholds;

pub use error::{Error, Result};
pub use model::{
    Dependence, ErrorRate, HypothesisStates, PValueMode, ProcedureConfig, Study, TwoStudyPValues,
};
pub use procedures::{analyze, Analysis, AnalysisWarning, Discoveries, SelectionRule};
pub use rvalues::{RValueEntry, RValueTable, RValueVariant};
pub use selection::{select_by_threshold, Direction, SelectionOutcome};
pub use thresholds::{solve_thresholds, ThresholdSolution};
