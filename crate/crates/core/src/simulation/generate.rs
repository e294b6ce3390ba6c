//! Gaussian two-study data with equi-correlated noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::erfc;

use crate::model::{HypothesisStates, TwoStudyPValues};

use super::SimScenario;

/// Upper normal tail `1 - Phi(x)`, accurate far into the tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Splits `m` into per-state counts `(n00, n10, n01, n11)` by
/// largest-remainder rounding of `m f`. Ties go to the earlier state.
pub fn state_counts(f: [f64; 4], m: usize) -> [usize; 4] {
    let exact: Vec<f64> = f.iter().map(|&x| x * m as f64).collect();
    let mut counts: [usize; 4] = std::array::from_fn(|k| exact[k].floor() as usize);
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &k in order.iter().take(m.saturating_sub(assigned)) {
        counts[k] += 1;
    }
    counts
}

/// Block layout: the first `n00` features are `(0,0)`, then `(1,0)`,
/// `(0,1)` and `(1,1)`.
pub fn hypothesis_states(f: [f64; 4], m: usize) -> HypothesisStates {
    let counts = state_counts(f, m);
    let mut h1 = Vec::with_capacity(m);
    let mut h2 = Vec::with_capacity(m);
    for (k, &n) in counts.iter().enumerate() {
        let (a, b) = [(false, false), (true, false), (false, true), (true, true)][k];
        h1.extend(std::iter::repeat_n(a, n));
        h2.extend(std::iter::repeat_n(b, n));
    }
    HypothesisStates::new(h1, h2).expect("equal lengths")
}

/// Generator for one `(replicate, study)` pair. The key carries the seed and
/// the replicate index; the study selects the stream.
pub fn study_rng(seed: u64, replicate: u64, study: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&replicate.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(study);
    rng
}

fn study_pvalues(rng: &mut ChaCha8Rng, signal: &[bool], mu: f64, rho: f64) -> Vec<f64> {
    let shared = rho.sqrt() * rng.sample::<f64, _>(StandardNormal);
    let own = (1.0 - rho).sqrt();
    signal
        .iter()
        .map(|&h| {
            let e = shared + own * rng.sample::<f64, _>(StandardNormal);
            normal_sf(if h { mu } else { 0.0 } + e)
        })
        .collect()
}

/// One simulated dataset. Noise in study `i` is
/// `sqrt(rho) Z_i0 + sqrt(1 - rho) Z_ij`, independent across studies, and
/// `p_ij = 1 - Phi(mu H_ij + e_ij)`.
pub fn generate_dataset(scenario: &SimScenario, replicate: u64) -> (TwoStudyPValues, HypothesisStates) {
    let states = hypothesis_states(scenario.f, scenario.m);
    let p1 = study_pvalues(&mut study_rng(scenario.seed, replicate, 1), states.h1(), scenario.mu, scenario.rho);
    let p2 = study_pvalues(&mut study_rng(scenario.seed, replicate, 2), states.h2(), scenario.mu, scenario.rho);
    let pvals = TwoStudyPValues::one_sided(p1, p2).expect("p-values in range");
    (pvals, states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn scenario(f: [f64; 4], mu: f64, rho: f64, m: usize) -> SimScenario {
        SimScenario {
            m,
            ..SimScenario::new(f, mu, rho)
        }
    }

    #[test]
    fn tail_matches_reference_cdf() {
        let normal = Normal::standard();
        for x in [-3.0, -0.5, 0.0, 0.7, 2.5, 5.0] {
            assert!((normal_sf(x) - (1.0 - normal.cdf(x))).abs() < 1e-12);
        }
        assert!(normal_sf(10.0) > 0.0);
    }

    #[test]
    fn counts_sum_to_m() {
        assert_eq!(state_counts([0.85, 0.05, 0.05, 0.05], 1000), [850, 50, 50, 50]);
        assert_eq!(state_counts([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0], 10), [4, 3, 3, 0]);
        assert_eq!(state_counts([0.25; 4], 3), [1, 1, 1, 0]);
        let counts = state_counts([0.1, 0.2, 0.3, 0.4], 7);
        assert_eq!(counts.iter().sum::<usize>(), 7);
    }

    #[test]
    fn block_layout() {
        let states = hypothesis_states([0.5, 0.25, 0.0, 0.25], 4);
        assert_eq!(states.h1(), [false, false, true, true]);
        assert_eq!(states.h2(), [false, false, false, true]);
    }

    #[test]
    fn null_pvalues_are_uniform() {
        let s = scenario([1.0, 0.0, 0.0, 0.0], 3.0, 0.0, 1000);
        let reps = 20;
        let mut sum = 0.0;
        for r in 0..reps {
            let (p, _) = generate_dataset(&s, r);
            sum += p.p1().iter().chain(p.p2()).sum::<f64>();
        }
        let n = (2 * 1000 * reps) as f64;
        let mean = sum / n;
        assert!((mean - 0.5).abs() < 3.0 / (12.0 * n).sqrt(), "mean {mean}");
    }

    #[test]
    fn equicorrelated_probits() {
        // correlation between two features of one study across datasets
        let s = scenario([1.0, 0.0, 0.0, 0.0], 3.0, 0.95, 2);
        let normal = Normal::standard();
        let n = 100_000;
        let (mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for r in 0..n {
            let (p, _) = generate_dataset(&s, r);
            let x = normal.inverse_cdf(1.0 - p.p1()[0]);
            let y = normal.inverse_cdf(1.0 - p.p1()[1]);
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
            sxy += x * y;
        }
        let n = n as f64;
        let cov = sxy / n - sx * sy / (n * n);
        let corr = cov / ((sxx / n - (sx / n).powi(2)) * (syy / n - (sy / n).powi(2))).sqrt();
        assert!((corr - 0.95).abs() < 0.02, "corr {corr}");
    }

    #[test]
    fn studies_use_distinct_streams() {
        let s = scenario([1.0, 0.0, 0.0, 0.0], 3.0, 0.0, 50);
        let (p, _) = generate_dataset(&s, 0);
        assert_ne!(p.p1(), p.p2());
        assert_eq!(generate_dataset(&s, 3), generate_dataset(&s, 3));
        assert_ne!(generate_dataset(&s, 3).0, generate_dataset(&s, 4).0);
    }
}
