//! Named verification checks and suites.
//!
//! Every check reduces to a scalar metric compared against a threshold.
//! `Expectation::Pass` checks pass when `metric ≤ threshold`;
//! `Expectation::ExpectedFail` checks demonstrate a known defect and pass
//! when `metric > threshold`.

mod checks;
pub mod exprgen;
pub mod measures;
pub mod scenarios;

use serde::Serialize;

use crate::error::{PdmError, Result};
use crate::par::{map_slice, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Pass,
    ExpectedFail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub expectation: Expectation,
    pub metric: f64,
    pub threshold: f64,
    pub details: String,
}

impl CheckReport {
    fn new(name: &str, expectation: Expectation, metric: f64, threshold: f64, details: String) -> Self {
        let passed = match expectation {
            Expectation::Pass => metric <= threshold,
            Expectation::ExpectedFail => metric > threshold,
        };
        CheckReport {
            name: name.to_string(),
            passed,
            expectation,
            metric,
            threshold,
            details,
        }
    }

    fn errored(name: &str, expectation: Expectation, threshold: f64, err: &PdmError) -> Self {
        CheckReport {
            name: name.to_string(),
            passed: false,
            expectation,
            metric: f64::NAN,
            threshold,
            details: format!("error: {err}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub seed: u64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Random points for the sampled checks.
    pub samples: usize,
    pub execution: Execution,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 20_240_917,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            samples: 10_000,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selection {
    /// Every check whose criterion is attainable.
    Default,
    /// Default plus the checks known to be unattainable.
    Full,
    Named(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub reports: Vec<CheckReport>,
    pub passed: usize,
    pub expected_failures: usize,
    pub failed: usize,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

/// Names of all registered checks, sorted.
pub fn check_names(selection: &Selection) -> Vec<String> {
    let mut names: Vec<String> = checks::registry()
        .into_iter()
        .filter(|c| match selection {
            Selection::Default => c.default_suite,
            Selection::Full => true,
            Selection::Named(list) => list.contains(&c.name),
        })
        .map(|c| c.name)
        .collect();
    names.sort();
    names
}

/// Run a single named check.
pub fn run_check(name: &str, config: &CheckConfig) -> Result<CheckReport> {
    let check = checks::registry()
        .into_iter()
        .find(|c| c.name == name)
        .ok_or_else(|| PdmError::UnknownCheck(name.to_string()))?;
    Ok(match (check.run)(config) {
        Ok((metric, details)) => CheckReport::new(&check.name, check.expectation, metric, check.threshold, details),
        Err(e) => CheckReport::errored(&check.name, check.expectation, check.threshold, &e),
    })
}

/// Run a selection of checks; reports are sorted by name.
pub fn run_suite(selection: &Selection, config: &CheckConfig) -> Result<SuiteReport> {
    if let Selection::Named(list) = selection {
        let known = check_names(&Selection::Full);
        if let Some(bad) = list.iter().find(|n| !known.contains(n)) {
            return Err(PdmError::UnknownCheck(bad.clone()));
        }
    }
    let names = check_names(selection);
    let reports: Vec<CheckReport> = map_slice(config.execution, &names, |n| run_check(n, config))
        .into_iter()
        .collect::<Result<_>>()?;
    let expected_failures = reports
        .iter()
        .filter(|r| r.passed && r.expectation == Expectation::ExpectedFail)
        .count();
    let passed = reports.iter().filter(|r| r.passed).count() - expected_failures;
    let failed = reports.len() - passed - expected_failures;
    Ok(SuiteReport {
        reports,
        passed,
        expected_failures,
        failed,
    })
}
