//! Regression suite, invariant fuzzer and their reports.

mod fuzz;
mod suite;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::BoundKind;
use crate::rational::Value;

pub use fuzz::{fuzz_invariants, random_instance, FuzzConfig, FuzzInstance, FUZZ_INVARIANTS};
pub use suite::{run_paper_suite, CHECK_IDS};

/// Tunable horizons, caps and tolerances; every field has a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub horizons: Horizons,
    pub tolerances: Tolerances,
    pub caps: Caps,
    pub fuzz: FuzzConfig,
    /// Record wall-clock time per check (breaks byte reproducibility).
    pub timings: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Horizons {
    /// Largest `n` and `m` in the norm-of-averages check.
    pub omega_max: u64,
    pub signflip_cesaro: [u64; 2],
    pub ell1_cesaro: [u64; 2],
    /// Cube subsequence of the Schreier basis at `N` and the comparison `N`.
    pub schreier_cube: [u64; 2],
    pub summing_tcca: u64,
    pub asep: [u64; 2],
    pub sm_window: u64,
    pub distortion: u64,
    pub wu: u64,
}

impl Default for Horizons {
    fn default() -> Self {
        Horizons {
            omega_max: 30,
            signflip_cesaro: [10, 1000],
            ell1_cesaro: [20, 400],
            schreier_cube: [10, 20],
            summing_tcca: 500,
            asep: [10, 5],
            sm_window: 10,
            distortion: 50,
            wu: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub float: f64,
    pub lp_vs_grid: f64,
    pub heuristic_vs_grid: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { float: 1e-9, lp_vs_grid: 1e-12, heuristic_vs_grid: 0.05 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Caps {
    pub fuzz_trials: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { fuzz_trials: 10_000 }
    }
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            horizons: Horizons::default(),
            tolerances: Tolerances::default(),
            caps: Caps::default(),
            fuzz: FuzzConfig::default(),
            timings: false,
        }
    }
}

impl VerifyConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Observation {
    pub name: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_kind: Option<BoundKind>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    /// The statement being reproduced.
    pub reference: String,
    pub values: Vec<Observation>,
    pub relation: String,
    pub tolerance: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Command that reruns just this check; set on failures.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reproduce: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

impl CheckRecord {
    pub fn new(id: &str, reference: &str, relation: &str, tolerance: &str) -> Self {
        CheckRecord {
            id: id.to_string(),
            reference: reference.to_string(),
            values: Vec::new(),
            relation: relation.to_string(),
            tolerance: tolerance.to_string(),
            pass: false,
            detail: None,
            reproduce: None,
            runtime_ms: None,
        }
    }

    pub fn value(mut self, name: &str, value: impl ToString) -> Self {
        self.values.push(Observation { name: name.to_string(), value: value.to_string(), bound_kind: None });
        self
    }

    pub fn estimate(mut self, name: &str, value: &Value, kind: BoundKind) -> Self {
        self.values.push(Observation { name: name.to_string(), value: value.display_exact(), bound_kind: Some(kind) });
        self
    }

    pub fn verdict(mut self, pass: bool) -> Self {
        self.pass = pass;
        self
    }

    pub fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub version: String,
    pub parameters: BTreeMap<String, String>,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new(suite: &str, parameters: BTreeMap<String, String>, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let passed = checks.iter().filter(|c| c.pass).count();
        VerificationReport {
            suite: suite.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            parameters,
            passed,
            failed: checks.len() - passed,
            checks,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// One row per check; observations joined as `name=value[kind]`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "pass", "relation", "tolerance", "values", "reference"]).expect("in-memory write");
        for c in &self.checks {
            let values: Vec<String> = c
                .values
                .iter()
                .map(|o| match o.bound_kind {
                    Some(k) => format!("{}={}[{}]", o.name, o.value, serde_json::to_value(k).unwrap().as_str().unwrap()),
                    None => format!("{}={}", o.name, o.value),
                })
                .collect();
            let pass = if c.pass { "pass" } else { "fail" };
            w.write_record([c.id.as_str(), pass, &c.relation, &c.tolerance, &values.join("; "), &c.reference])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

/// Runs `f`, attaching the elapsed time when timings are on.
pub(crate) fn timed(timings: bool, f: impl FnOnce() -> Result<CheckRecord>) -> Result<CheckRecord> {
    let start = Instant::now();
    let mut rec = f()?;
    if timings {
        rec.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_defaults() {
        let c = VerifyConfig::default();
        assert_eq!(VerifyConfig::from_toml(&c.to_toml()).unwrap(), c);
        let partial = VerifyConfig::from_toml("[horizons]\nomega_max = 5\n").unwrap();
        assert_eq!(partial.horizons.omega_max, 5);
        assert_eq!(partial.horizons.sm_window, 10);
        assert!(VerifyConfig::from_toml("[horizons]\nunknown = 1\n").is_err());
    }

    #[test]
    fn report_sorts_and_counts() {
        let a = CheckRecord::new("b", "r", "x = y", "0").verdict(true);
        let b = CheckRecord::new("a", "r", "x = y", "0").value("x", 1).verdict(false);
        let r = VerificationReport::new("t", BTreeMap::new(), vec![a, b]);
        assert_eq!(r.checks[0].id, "a");
        assert_eq!((r.passed, r.failed), (1, 1));
        assert!(r.to_csv().lines().nth(1).unwrap().starts_with("a,fail"));
    }
}
