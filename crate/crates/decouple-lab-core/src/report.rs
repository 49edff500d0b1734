//! Named scalar metrics produced by experiment operations.

use crate::{Error, Result};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// An ordered list of `(name, value)` metrics. Names are unique and values
/// finite; the CLI layer serializes reports to CSV without reordering.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentReport {
    metrics: Vec<(String, f64)>,
}

impl ExperimentReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a metric. Errors on duplicate names or non-finite values.
    pub fn push(&mut self, name: &str, value: f64) -> Result<()> {
        if !value.is_finite() {
            return Err(Error::Domain(alloc::format!(
                "metric {name} is not finite: {value}"
            )));
        }
        if self.metrics.iter().any(|(n, _)| n == name) {
            return Err(Error::Domain(alloc::format!("duplicate metric {name}")));
        }
        self.metrics.push((name.to_string(), value));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.metrics
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn metrics(&self) -> &[(String, f64)] {
        &self.metrics
    }

    /// Moves all metrics of `other` into `self`, prefixing names.
    pub fn absorb(&mut self, prefix: &str, other: &ExperimentReport) -> Result<()> {
        for (n, v) in other.metrics() {
            self.push(&alloc::format!("{prefix}{n}"), *v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_non_finite() {
        let mut r = ExperimentReport::new();
        r.push("a", 1.0).unwrap();
        assert!(r.push("a", 2.0).is_err());
        assert!(r.push("b", f64::NAN).is_err());
        assert_eq!(r.get("a"), Some(1.0));
    }
}
