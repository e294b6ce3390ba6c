//! Inputs shared by the benchmarks.

use twostudy::simulation::{generate_dataset, SimScenario};
use twostudy::TwoStudyPValues;

/// Simulated one-sided p-values with 5% replicated and 10% single-study
/// signals.
pub fn dataset(m: usize, seed: u64) -> TwoStudyPValues {
    let scenario = SimScenario {
        m,
        seed,
        ..SimScenario::new([0.85, 0.05, 0.05, 0.05], 3.0, 0.0)
    };
    generate_dataset(&scenario, 0).0
}
