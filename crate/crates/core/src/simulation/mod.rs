//! Monte-Carlo evaluation of power, FWER and FDR.
//!
//! Each replicate draws an independent dataset from its own generator,
//! keyed by `(seed, replicate)`, so results do not depend on how the
//! replicates are scheduled across threads. Aggregates are summed in
//! replicate order.

mod generate;
mod methods;
mod oracles;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HypothesisStates, ProcedureConfig};

pub use generate::{generate_dataset, hypothesis_states, normal_sf, state_counts, study_rng};
pub use methods::Method;
pub use oracles::{max_oracles, oracle_bonferroni, oracle_max_level, MaxOracleKind};

fn default_alpha() -> f64 {
    0.05
}

fn default_c() -> f64 {
    0.5
}

fn default_procedures() -> Vec<Method> {
    Method::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimScenario {
    /// State fractions `(f00, f10, f01, f11)`.
    pub f: [f64; 4],
    pub mu: f64,
    pub rho: f64,
    pub m: usize,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    /// Defaults to `alpha`.
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Fixed selection thresholds, `alpha / 2` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    #[serde(default = "default_procedures")]
    pub procedures: Vec<Method>,
}

impl SimScenario {
    /// Desk-scale scenario: `m = 1000`, 1000 replicates, `alpha = lambda =
    /// 0.05`, every procedure.
    pub fn new(f: [f64; 4], mu: f64, rho: f64) -> Self {
        Self {
            f,
            mu,
            rho,
            m: 1000,
            replicates: 1000,
            seed: 0,
            alpha: default_alpha(),
            c: default_c(),
            lambda: None,
            t1: None,
            t2: None,
            procedures: default_procedures(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scenario: Self = serde_json::from_str(text).map_err(|e| Error::InvalidScenario(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda.unwrap_or(self.alpha)
    }

    pub fn fixed_thresholds(&self) -> (f64, f64) {
        (self.t1.unwrap_or(self.alpha / 2.0), self.t2.unwrap_or(self.alpha / 2.0))
    }

    pub fn config(&self) -> ProcedureConfig {
        ProcedureConfig::new(self.alpha).with_c(self.c).with_lambda(self.lambda())
    }

    pub fn states(&self) -> HypothesisStates {
        hypothesis_states(self.f, self.m)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidScenario(msg));
        if self.f.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return invalid(format!("f components must be non-negative, got {:?}", self.f));
        }
        let total: f64 = self.f.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return invalid(format!("f must sum to 1, got {total}"));
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return invalid(format!("mu must be positive, got {}", self.mu));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return invalid(format!("rho must be in [0,1), got {}", self.rho));
        }
        if self.m == 0 {
            return invalid("m must be positive".into());
        }
        if self.replicates == 0 {
            return Err(Error::NoReplicates);
        }
        if self.procedures.is_empty() {
            return invalid("no procedures".into());
        }
        self.config().validate()?;
        let (t1, t2) = self.fixed_thresholds();
        for (name, t) in [("t1", t1), ("t2", t2)] {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::ThresholdOutOfRange { name, value: t });
            }
        }
        Ok(())
    }
}

/// Per-replicate counts for one procedure.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ReplicateCounts {
    rejections: usize,
    false_claims: usize,
    true_claims: usize,
}

fn replicate_counts(scenario: &SimScenario, replicate: u64) -> Vec<ReplicateCounts> {
    let (pvals, states) = generate_dataset(scenario, replicate);
    let config = scenario.config();
    let fixed = scenario.fixed_thresholds();
    scenario
        .procedures
        .iter()
        .map(|method| {
            let found = method.discoveries(&pvals, &states, &config, fixed);
            let true_claims = found.iter().filter(|&&j| states.is_replicated(j)).count();
            ReplicateCounts {
                rejections: found.len(),
                false_claims: found.len() - true_claims,
                true_claims,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub procedure: Method,
    /// `None` when the scenario has no replicated features.
    pub power: Option<f64>,
    pub power_se: Option<f64>,
    pub fwer: f64,
    pub fwer_se: f64,
    pub fdr: f64,
    pub fdr_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub scenario: SimScenario,
    pub replicates: usize,
    pub estimates: Vec<Estimate>,
}

pub const RESULTS_HEADER: &str = "procedure,power,power_se,fwer,fwer_se,fdr,fdr_se";

fn mean_and_se(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let n_f = n as f64;
    let mean = values.clone().sum::<f64>() / n_f;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean).powi(2)).sum();
    (mean, (ss / (n_f - 1.0)).sqrt() / n_f.sqrt())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| v.to_string())
}

impl Estimate {
    fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.procedure,
            fmt_opt(self.power),
            fmt_opt(self.power_se),
            self.fwer,
            self.fwer_se,
            self.fdr,
            self.fdr_se
        )
    }
}

impl SimResult {
    pub fn estimate(&self, method: Method) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.procedure == method)
    }

    /// Results table, one row per procedure.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(RESULTS_HEADER);
        out.push('\n');
        for e in &self.estimates {
            out.push_str(&e.csv_fields());
            out.push('\n');
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        writer.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }
}

/// Table with a leading `mu` column, one row per (mu, procedure).
pub fn sweep_to_csv(results: &[SimResult]) -> String {
    let mut out = format!("mu,{RESULTS_HEADER}\n");
    for r in results {
        for e in &r.estimates {
            out.push_str(&format!("{},{}\n", r.scenario.mu, e.csv_fields()));
        }
    }
    out
}

/// Estimates power, FWER and FDR for every listed procedure.
///
/// Power is the fraction of replicated features discovered, FWER the
/// fraction of replicates with a false claim, and FDR the mean of
/// `V / max(R, 1)`. Replicates run on the current rayon pool.
pub fn run_scenario(scenario: &SimScenario) -> Result<SimResult> {
    scenario.validate()?;
    let per_replicate: Vec<Vec<ReplicateCounts>> = (0..scenario.replicates as u64)
        .into_par_iter()
        .map(|r| replicate_counts(scenario, r))
        .collect();

    let n = scenario.replicates;
    let replicated = scenario.states().count_replicated();
    let estimates = scenario
        .procedures
        .iter()
        .enumerate()
        .map(|(k, &procedure)| {
            let column = per_replicate.iter().map(move |row| row[k]);
            let (power, power_se) = if replicated == 0 {
                (None, None)
            } else {
                let (p, se) = mean_and_se(column.clone().map(|c| c.true_claims as f64 / replicated as f64), n);
                (Some(p), Some(se))
            };
            let fwer = column.clone().filter(|c| c.false_claims > 0).count() as f64 / n as f64;
            let fwer_se = (fwer * (1.0 - fwer) / n as f64).sqrt();
            let (fdr, fdr_se) = mean_and_se(
                column.map(|c| c.false_claims as f64 / c.rejections.max(1) as f64),
                n,
            );
            Estimate {
                procedure,
                power,
                power_se,
                fwer,
                fwer_se,
                fdr,
                fdr_se,
            }
        })
        .collect();

    Ok(SimResult {
        scenario: scenario.clone(),
        replicates: n,
        estimates,
    })
}

/// Runs the scenario once per `mu`, in order.
pub fn run_mu_sweep(scenario: &SimScenario, mus: &[f64]) -> Result<Vec<SimResult>> {
    mus.iter()
        .map(|&mu| run_scenario(&SimScenario { mu, ..scenario.clone() }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(f: [f64; 4], mu: f64) -> SimScenario {
        SimScenario {
            m: 200,
            replicates: 100,
            seed: 5,
            ..SimScenario::new(f, mu, 0.0)
        }
    }

    #[test]
    fn zero_replicates() {
        let s = SimScenario {
            replicates: 0,
            ..small([1.0, 0.0, 0.0, 0.0], 3.0)
        };
        assert_eq!(run_scenario(&s), Err(Error::NoReplicates));
    }

    #[test]
    fn scenario_json() {
        let s = SimScenario::from_json(
            r#"{"f": [0.85, 0.05, 0.05, 0.05], "mu": 3, "rho": 0, "m": 100, "replicates": 10,
                "seed": 7, "alpha": 0.05, "c": 0.5, "lambda": 0.05, "procedures": ["fdr", "max-bh"]}"#,
        )
        .unwrap();
        assert_eq!(s.procedures, [Method::Fdr, Method::MaxBh]);
        assert_eq!(s.fixed_thresholds(), (0.025, 0.025));
        assert!(SimScenario::from_json(r#"{"f": [0.5, 0.5, 0.5, 0.5], "mu": 3, "rho": 0, "m": 10, "replicates": 1}"#).is_err());
        assert!(SimScenario::from_json(r#"{"f": [1, 0, 0, 0], "mu": 3, "rho": 0, "m": 10, "replicates": 1, "procedures": ["x"]}"#).is_err());
        assert!(SimScenario::from_json("{").is_err());
    }

    #[test]
    fn overwhelming_signal_is_found() {
        let s = SimScenario {
            procedures: Method::ALL.into_iter().filter(|m| *m != Method::NaiveBhIntersect).collect(),
            ..small([0.0, 0.0, 0.0, 1.0], 6.0)
        };
        let result = run_scenario(&s).unwrap();
        for e in &result.estimates {
            assert!(e.power.unwrap() > 0.95, "{e:?}");
            assert_eq!(e.fwer, 0.0);
        }
    }

    #[test]
    fn global_null_has_no_power_column() {
        let result = run_scenario(&small([1.0, 0.0, 0.0, 0.0], 3.0)).unwrap();
        assert!(result.estimates.iter().all(|e| e.power.is_none()));
        let csv = result.to_csv();
        assert!(csv.starts_with(RESULTS_HEADER));
        assert!(csv.lines().nth(1).unwrap().starts_with("bonf,NA,NA,"));
    }

    #[test]
    fn adaptive_not_less_powerful() {
        let s = SimScenario {
            procedures: vec![Method::Fdr, Method::AdaptFdr],
            ..small([0.85, 0.05, 0.05, 0.05], 3.0)
        };
        let r = run_scenario(&s).unwrap();
        let (plain, adaptive) = (r.estimates[0].power.unwrap(), r.estimates[1].power.unwrap());
        assert!(adaptive >= plain - 2.0 * r.estimates[1].power_se.unwrap(), "{plain} {adaptive}");
    }

    #[test]
    fn thread_count_does_not_matter() {
        let s = SimScenario {
            replicates: 40,
            ..small([0.8, 0.1, 0.05, 0.05], 3.0)
        };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| run_scenario(&s)).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let parallel = pool.install(|| run_scenario(&s)).unwrap();
        assert_eq!(serial.to_csv(), parallel.to_csv());
    }

    #[test]
    fn sweep_has_mu_column() {
        let s = SimScenario {
            replicates: 5,
            procedures: vec![Method::Bonf],
            ..small([0.9, 0.0, 0.0, 0.1], 3.0)
        };
        let csv = sweep_to_csv(&run_mu_sweep(&s, &[2.0, 3.0]).unwrap());
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("mu,procedure"));
        assert!(lines[2].starts_with("3,bonf,"));
    }
}
