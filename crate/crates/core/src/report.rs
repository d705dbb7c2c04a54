//! Named pass/fail records produced by the verification routines.
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_name: String,
    pub pass: bool,
    pub residual: f64,
    pub expected: f64,
    pub measured: f64,
}

impl CheckReport {
    /// Passes when `|measured - expected| <= tol`.
    pub fn close(name: &str, expected: f64, measured: f64, tol: f64) -> Self {
        let residual = (measured - expected).abs();
        CheckReport {
            check_name: name.to_string(),
            pass: residual <= tol && residual.is_finite(),
            residual,
            expected,
            measured,
        }
    }

    /// Passes when the residual is at most `tol`; `expected` is recorded as zero.
    pub fn residual(name: &str, residual: f64, tol: f64) -> Self {
        CheckReport {
            check_name: name.to_string(),
            pass: residual <= tol && residual.is_finite(),
            residual,
            expected: 0.0,
            measured: residual,
        }
    }

    pub fn flag(name: &str, pass: bool) -> Self {
        CheckReport {
            check_name: name.to_string(),
            pass,
            residual: if pass { 0.0 } else { 1.0 },
            expected: 1.0,
            measured: if pass { 1.0 } else { 0.0 },
        }
    }

    /// Informational value; always passes.
    pub fn info(name: &str, value: f64) -> Self {
        CheckReport { check_name: name.to_string(), pass: true, residual: 0.0, expected: value, measured: value }
    }

    /// Passes when `measured <= bound`.
    pub fn at_most(name: &str, measured: f64, bound: f64) -> Self {
        CheckReport {
            check_name: name.to_string(),
            pass: measured <= bound,
            residual: (measured - bound).max(0.0),
            expected: bound,
            measured,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<CheckReport>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, c: CheckReport) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }
}
