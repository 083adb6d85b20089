//! Check reports: a human-readable table and a flat `key = value` file.

use crate::error::Result;
use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;

/// Shortest round-trip text of `x`, in exponent form outside `[1e-4, 1e6)`.
pub fn real(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub samples: usize,
}

impl CheckLine {
    /// NaN never passes.
    pub fn passed(&self) -> bool {
        self.max_residual <= self.tolerance
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CheckReport {
    pub title: String,
    pub checks: Vec<CheckLine>,
    /// Measured values that are reported but not judged.
    pub measurements: BTreeMap<String, String>,
    /// Inputs: parameters, seed, steps.
    pub provenance: BTreeMap<String, String>,
}

impl CheckReport {
    pub fn new(title: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            ..Self::default()
        }
    }

    pub fn check(&mut self, name: &str, max_residual: f64, tolerance: f64, samples: usize) -> &mut Self {
        self.checks.push(CheckLine {
            name: name.to_string(),
            max_residual,
            tolerance,
            samples,
        });
        self
    }

    pub fn measure(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.measurements.insert(key.to_string(), value.to_string());
        self
    }

    pub fn note(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.provenance.insert(key.to_string(), value.to_string());
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckLine::passed)
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckLine> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, name: &str) -> Option<&CheckLine> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "report = {}", self.title);
        let _ = writeln!(out, "pass = {}", self.passed());
        for c in &self.checks {
            let key = format!("check.{}", c.name);
            let _ = writeln!(out, "{key}.max_residual = {:.6e}", c.max_residual);
            let _ = writeln!(out, "{key}.tolerance = {:.6e}", c.tolerance);
            let _ = writeln!(out, "{key}.samples = {}", c.samples);
            let _ = writeln!(out, "{key}.pass = {}", c.passed());
        }
        for (k, v) in &self.measurements {
            let _ = writeln!(out, "value.{k} = {v}");
        }
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "provenance.{k} = {v}");
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        crate::export::write_file(path, &self.to_key_value())
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.title)?;
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        writeln!(
            f,
            "  {:<width$}  {:>12}  {:>10}  {:>7}  result",
            "check", "max resid", "tolerance", "samples"
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "  {:<width$}  {:>12.3e}  {:>10.1e}  {:>7}  {}",
                c.name,
                c.max_residual,
                c.tolerance,
                c.samples,
                if c.passed() { "pass" } else { "FAIL" }
            )?;
        }
        for (k, v) in &self.measurements {
            writeln!(f, "  {k} = {v}")?;
        }
        write!(f, "overall: {}", if self.passed() { "pass" } else { "FAIL" })
    }
}
