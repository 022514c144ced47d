use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub const NEGATIVE_SLACK: f64 = 1e-12;
    pub const SUM_SLACK: f64 = 1e-10;

    /// Validates and clamps tiny negatives to zero.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidProbabilityVector("no weights".into()));
        }
        let mut w = weights;
        for (i, x) in w.iter_mut().enumerate() {
            if !x.is_finite() || *x < -Self::NEGATIVE_SLACK {
                return Err(Error::InvalidProbabilityVector(format!(
                    "weight {i} is {x}"
                )));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let total: f64 = w.iter().sum();
        if (total - 1.0).abs() > Self::SUM_SLACK {
            return Err(Error::InvalidProbabilityVector(format!(
                "weights sum to {total}"
            )));
        }
        Ok(ProbabilityVector(w))
    }

    /// Rescales non-negative weights to sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().map(|w| w.max(0.0)).sum();
        if !(total > 0.0) {
            return Err(Error::InvalidProbabilityVector("zero total mass".into()));
        }
        Self::new(weights.into_iter().map(|w| w.max(0.0) / total).collect())
    }

    pub fn uniform(len: usize) -> Self {
        ProbabilityVector(vec![1.0 / len as f64; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    /// Appends zero weights up to `len`.
    pub fn padded(&self, len: usize) -> Self {
        let mut w = self.0.clone();
        w.resize(len.max(w.len()), 0.0);
        ProbabilityVector(w)
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(p: ProbabilityVector) -> Vec<f64> {
        p.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamps_tiny_negatives() {
        let p = ProbabilityVector::new(vec![1.0 + 5e-13, -5e-13]).unwrap();
        assert_eq!(p.weights()[1], 0.0);
    }

    #[test]
    fn rejects_bad_sums_and_signs() {
        assert!(ProbabilityVector::new(vec![0.5, 0.4]).is_err());
        assert!(ProbabilityVector::new(vec![1.1, -0.1]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
        assert!(ProbabilityVector::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn padding_keeps_mass() {
        let p = ProbabilityVector::new(vec![0.25, 0.75]).unwrap().padded(4);
        assert_eq!(p.weights(), &[0.25, 0.75, 0.0, 0.0]);
    }
}
