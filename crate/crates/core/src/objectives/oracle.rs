use super::{Objective, SharedObjective};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Mini-batch estimator of F and ∇F.
///
/// Every call draws a fresh batch from `rng`. Value and gradient estimates
/// never share samples; `sample_values` evaluates one shared batch at all the
/// given points.
pub trait StochasticOracle: Send + Sync {
    fn dim(&self) -> usize;

    /// Samples per estimate (Θ).
    fn batch_size(&self) -> usize;

    fn sample_values(&self, points: &[&[f64]], rng: &mut RngStream) -> Vec<f64>;

    fn sample_value(&self, x: &[f64], rng: &mut RngStream) -> f64 {
        self.sample_values(&[x], rng)[0]
    }

    fn sample_grad_into(&self, x: &[f64], rng: &mut RngStream, out: &mut [f64]);

    fn sample_grad(&self, x: &[f64], rng: &mut RngStream) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.sample_grad_into(x, rng, &mut g);
        g
    }

    /// Data samples consumed by one value batch / one gradient batch.
    fn samples_per_value_batch(&self) -> u64 {
        self.batch_size() as u64
    }

    fn samples_per_gradient_batch(&self) -> u64 {
        self.batch_size() as u64
    }

    /// The exact objective this oracle estimates, when computable.
    fn exact(&self) -> Option<&dyn Objective>;

    /// True when values and gradients are returned without error.
    fn noise_free(&self) -> bool {
        false
    }

    fn name(&self) -> String;
}

/// Noise-free oracle: returns exact values and gradients, draws nothing.
#[derive(Clone)]
pub struct ExactOracle {
    inner: SharedObjective,
}

impl ExactOracle {
    pub fn new(inner: SharedObjective) -> Self {
        ExactOracle { inner }
    }
}

impl StochasticOracle for ExactOracle {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn batch_size(&self) -> usize {
        1
    }

    fn sample_values(&self, points: &[&[f64]], _rng: &mut RngStream) -> Vec<f64> {
        points.iter().map(|x| self.inner.value(x)).collect()
    }

    fn sample_grad_into(&self, x: &[f64], _rng: &mut RngStream, out: &mut [f64]) {
        self.inner.gradient_into(x, out)
    }

    fn samples_per_value_batch(&self) -> u64 {
        0
    }

    fn samples_per_gradient_batch(&self) -> u64 {
        0
    }

    fn exact(&self) -> Option<&dyn Objective> {
        Some(self.inner.as_ref())
    }

    fn noise_free(&self) -> bool {
        true
    }

    fn name(&self) -> String {
        format!("exact({})", self.inner.name())
    }
}

/// Exact values; gradients perturbed by iid N(0, θ I) noise.
#[derive(Clone)]
pub struct NoisyGradientOracle {
    inner: SharedObjective,
    std_dev: f64,
}

impl NoisyGradientOracle {
    pub fn new(inner: SharedObjective, variance: f64) -> Result<Self> {
        if !(variance >= 0.0) || !variance.is_finite() {
            return Err(Error::config("variance", "must be finite and >= 0"));
        }
        Ok(NoisyGradientOracle {
            inner,
            std_dev: variance.sqrt(),
        })
    }
}

impl StochasticOracle for NoisyGradientOracle {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn batch_size(&self) -> usize {
        1
    }

    fn sample_values(&self, points: &[&[f64]], _rng: &mut RngStream) -> Vec<f64> {
        points.iter().map(|x| self.inner.value(x)).collect()
    }

    fn sample_grad_into(&self, x: &[f64], rng: &mut RngStream, out: &mut [f64]) {
        self.inner.gradient_into(x, out);
        for o in out.iter_mut() {
            *o += self.std_dev * rng.standard_normal();
        }
    }

    fn samples_per_value_batch(&self) -> u64 {
        0
    }

    fn exact(&self) -> Option<&dyn Objective> {
        Some(self.inner.as_ref())
    }

    fn name(&self) -> String {
        format!("noisy-gradient({}, θ={})", self.inner.name(), self.std_dev * self.std_dev)
    }
}
