//! Embedded example data.

use crate::io::parse_pvalues;
use crate::model::{PValueMode, TwoStudyPValues};

/// Left-sided p-values of 29 behavioural endpoints comparing two mouse
/// strains in two laboratories (see `data/README.md` for how the table was
/// reconstructed from its published rounded form).
pub const MICE_CSV: &str = include_str!("../data/mice.csv");

/// The mouse-strain table as left-sided p-values, feature ids `"1".."29"`.
pub fn mice() -> TwoStudyPValues {
    parse_pvalues(MICE_CSV, PValueMode::LeftSided)
        .expect("embedded fixture parses")
        .expect("embedded fixture is non-empty")
}
