//! Benchmark objectives with closed-form values and gradients, the
//! mini-batch KDE oracle, and regularization wrappers.

mod benchmarks;
mod kde;
mod mixture;
mod oracle;
mod params;
mod penalty;
mod regularized;

use std::sync::Arc;

pub use benchmarks::{make_griewank, make_quadratic, make_rastrigin, Griewank, Quadratic, Rastrigin};
pub use kde::{make_kde_objective, KdeOracle};
pub use mixture::{make_gaussian_mixture, GaussianMixture, GaussianMixtureSpec, MixtureComponent, WeightLaw};
pub use oracle::{ExactOracle, NoisyGradientOracle, StochasticOracle};
pub use params::TheoryParams;
pub use penalty::BoxPenalty;
pub use regularized::{regularize_quadratic, Regularized};

use crate::point::Point;

/// A deterministic objective F: R^d → R with its exact gradient.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes ∇F(x) into `out` (length `dim()`).
    fn gradient_into(&self, x: &[f64], out: &mut [f64]);

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.gradient_into(x, &mut g);
        g
    }

    fn minimizer(&self) -> Option<Point> {
        None
    }

    fn min_value(&self) -> Option<f64> {
        None
    }

    /// Box the objective is meant to be explored in, when it has one.
    fn region(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        None
    }

    fn name(&self) -> String;
}

pub type SharedObjective = Arc<dyn Objective>;

impl<T: Objective + ?Sized> Objective for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        (**self).value(x)
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        (**self).gradient_into(x, out)
    }
    fn minimizer(&self) -> Option<Point> {
        (**self).minimizer()
    }
    fn min_value(&self) -> Option<f64> {
        (**self).min_value()
    }
    fn region(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        (**self).region()
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

/// Central finite-difference gradient with step `eps`. Test and diagnostics
/// helper; never used on the optimization path.
pub fn finite_difference_gradient(obj: &dyn Objective, x: &[f64], eps: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            xp[i] = x[i] + eps;
            let up = obj.value(&xp);
            xp[i] = x[i] - eps;
            let down = obj.value(&xp);
            xp[i] = x[i];
            (up - down) / (2.0 * eps)
        })
        .collect()
}
