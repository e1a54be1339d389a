use super::{Objective, SharedObjective};
use crate::error::{Error, Result};

/// F_λ(x) = F(x) + λ‖x‖². Adding the ridge makes any Lipschitz-gradient F
/// dissipative, hence coercive.
#[derive(Clone)]
pub struct Regularized {
    base: SharedObjective,
    lambda: f64,
}

pub fn regularize_quadratic(base: SharedObjective, lambda: f64) -> Result<Regularized> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::precondition("regularize_quadratic", format!("lambda must be > 0, got {lambda}")));
    }
    Ok(Regularized { base, lambda })
}

impl Regularized {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

impl Objective for Regularized {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.base.value(x) + self.lambda * x.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        self.base.gradient_into(x, out);
        for (o, v) in out.iter_mut().zip(x) {
            *o += 2.0 * self.lambda * v;
        }
    }

    fn region(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        self.base.region()
    }

    fn name(&self) -> String {
        format!("{} + {}‖x‖²", self.base.name(), self.lambda)
    }
}
