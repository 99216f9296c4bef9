//! Residual reports: one row per verified identity.

use serde::{Deserialize, Serialize};

/// Whether an identity's hypothesis was established before checking its
/// conclusion. Conclusions under a violated premise are skipped, never
/// counted as failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum PremiseStatus {
    NotApplicable,
    Passed,
    Violated,
}

/// Outcome of one identity check over a sample plan.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResidualReport {
    pub suite: String,
    pub identity: String,
    /// Human-readable statement of the identity being checked.
    pub anchor: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub premise_status: PremiseStatus,
    pub worst_point: Vec<f64>,
}

impl ResidualReport {
    pub fn new(
        suite: &str,
        identity: &str,
        anchor: &str,
        acc: &ResidualAccumulator,
        tolerance: f64,
    ) -> Self {
        ResidualReport {
            suite: suite.to_string(),
            identity: identity.to_string(),
            anchor: anchor.to_string(),
            max_residual: acc.max,
            tolerance,
            pass: acc.max <= tolerance,
            premise_status: PremiseStatus::NotApplicable,
            worst_point: acc.worst.clone(),
        }
    }

    pub fn with_premise(mut self, status: PremiseStatus) -> Self {
        self.premise_status = status;
        if status == PremiseStatus::Violated {
            self.pass = false;
        }
        self
    }

    /// Skipped = conclusion not judged because its hypothesis failed.
    pub fn skipped(&self) -> bool {
        self.premise_status == PremiseStatus::Violated
    }

    /// True when the row should count against the run's exit status.
    pub fn failed(&self) -> bool {
        !self.pass && !self.skipped()
    }
}

/// Max-residual fold over sample points; order-independent.
#[derive(Debug, Clone, Default)]
pub struct ResidualAccumulator {
    pub max: f64,
    pub worst: Vec<f64>,
}

impl ResidualAccumulator {
    pub fn new() -> Self {
        ResidualAccumulator { max: 0.0, worst: Vec::new() }
    }

    pub fn update(&mut self, residual: f64, point: &[f64]) {
        if residual > self.max || self.worst.is_empty() {
            self.max = residual.max(self.max);
            self.worst = point.to_vec();
        }
    }

    pub fn merge(&mut self, other: &ResidualAccumulator) {
        if other.max > self.max || self.worst.is_empty() {
            self.max = self.max.max(other.max);
            if !other.worst.is_empty() {
                self.worst = other.worst.clone();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_tracks_worst_point() {
        let mut acc = ResidualAccumulator::new();
        acc.update(0.1, &[1.0, 0.0]);
        acc.update(0.5, &[0.0, 2.0]);
        acc.update(0.2, &[3.0, 3.0]);
        assert_eq!(acc.max, 0.5);
        assert_eq!(acc.worst, vec![0.0, 2.0]);
    }

    #[test]
    fn merge_is_order_independent() {
        let mut a = ResidualAccumulator::new();
        a.update(0.3, &[1.0]);
        let mut b = ResidualAccumulator::new();
        b.update(0.7, &[2.0]);
        let mut ab = a.clone();
        ab.merge(&b);
        let mut ba = b.clone();
        ba.merge(&a);
        assert_eq!(ab.max, ba.max);
        assert_eq!(ab.worst, ba.worst);
    }

    #[test]
    fn violated_premise_is_skipped_not_failed() {
        let mut acc = ResidualAccumulator::new();
        acc.update(10.0, &[0.0]);
        let row = ResidualReport::new("s", "id", "x = y", &acc, 1e-6)
            .with_premise(PremiseStatus::Violated);
        assert!(row.skipped());
        assert!(!row.failed());
        assert!(!row.pass);
    }
}
