use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadratic wall outside an axis-aligned box:
/// `Σ_j (x_j − lo_j)² 1{x_j ≤ lo_j} + (x_j − hi_j)² 1{x_j ≥ hi_j}`.
///
/// Zero inside the box, C¹ across its faces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxPenalty {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl BoxPenalty {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u)) {
            return Err(Error::config("box", "every lower bound must be below its upper bound"));
        }
        Ok(BoxPenalty { lower, upper })
    }

    pub fn cube(d: usize, lo: f64, hi: f64) -> Result<Self> {
        BoxPenalty::new(vec![lo; d], vec![hi; d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&v, (&l, &u))| {
                if v <= l {
                    (v - l) * (v - l)
                } else if v >= u {
                    (v - u) * (v - u)
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Adds ∇L(x) into `out`.
    pub fn add_gradient(&self, x: &[f64], out: &mut [f64]) {
        for (j, &v) in x.iter().enumerate() {
            if v <= self.lower[j] {
                out[j] += 2.0 * (v - self.lower[j]);
            } else if v >= self.upper[j] {
                out[j] += 2.0 * (v - self.upper[j]);
            }
        }
    }
}
