//! Classic test functions. Rastrigin and Griewank are confined to
//! `[−5, 5]^d` by the same quadratic edge wall used for the mixture.

use std::f64::consts::PI;

use super::{BoxPenalty, Objective};
use crate::error::{Error, Result};
use crate::point::Point;

const BOX_HALF_WIDTH: f64 = 5.0;

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::ZeroDimension)
    } else {
        Ok(())
    }
}

/// F(x) = ½‖x‖².
#[derive(Debug, Clone)]
pub struct Quadratic {
    d: usize,
}

pub fn make_quadratic(d: usize) -> Result<Quadratic> {
    check_dim(d)?;
    Ok(Quadratic { d })
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }

    fn minimizer(&self) -> Option<Point> {
        Point::zeros(self.d).ok()
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }

    fn name(&self) -> String {
        format!("quadratic(d={})", self.d)
    }
}

/// F(x) = 10d + Σ (xᵢ² − 10 cos 2πxᵢ), walled to [−5, 5]^d.
#[derive(Debug, Clone)]
pub struct Rastrigin {
    d: usize,
    penalty: BoxPenalty,
}

pub fn make_rastrigin(d: usize) -> Result<Rastrigin> {
    check_dim(d)?;
    Ok(Rastrigin {
        d,
        penalty: BoxPenalty::cube(d, -BOX_HALF_WIDTH, BOX_HALF_WIDTH)?,
    })
}

impl Objective for Rastrigin {
    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[f64]) -> f64 {
        let core: f64 = x
            .iter()
            .map(|&v| v * v - 10.0 * (2.0 * PI * v).cos())
            .sum();
        10.0 * self.d as f64 + core + self.penalty.value(x)
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for (o, &v) in out.iter_mut().zip(x) {
            *o = 2.0 * v + 20.0 * PI * (2.0 * PI * v).sin();
        }
        self.penalty.add_gradient(x, out);
    }

    fn minimizer(&self) -> Option<Point> {
        Point::zeros(self.d).ok()
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }

    fn region(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        Some((self.penalty.lower.clone(), self.penalty.upper.clone()))
    }

    fn name(&self) -> String {
        format!("rastrigin(d={})", self.d)
    }
}

/// F(x) = Σ xᵢ²/4000 − Π cos(xᵢ/√i) + 1, walled to [−5, 5]^d.
#[derive(Debug, Clone)]
pub struct Griewank {
    d: usize,
    inv_sqrt_i: Vec<f64>,
    penalty: BoxPenalty,
}

pub fn make_griewank(d: usize) -> Result<Griewank> {
    check_dim(d)?;
    Ok(Griewank {
        d,
        inv_sqrt_i: (1..=d).map(|i| 1.0 / (i as f64).sqrt()).collect(),
        penalty: BoxPenalty::cube(d, -BOX_HALF_WIDTH, BOX_HALF_WIDTH)?,
    })
}

impl Objective for Griewank {
    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, x: &[f64]) -> f64 {
        let sum: f64 = x.iter().map(|v| v * v).sum::<f64>() / 4000.0;
        let prod: f64 = x
            .iter()
            .zip(&self.inv_sqrt_i)
            .map(|(v, s)| (v * s).cos())
            .product();
        sum - prod + 1.0 + self.penalty.value(x)
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        // Π_{j≠k} cos via prefix/suffix products, safe when a cosine vanishes.
        let cosines: Vec<f64> = x
            .iter()
            .zip(&self.inv_sqrt_i)
            .map(|(v, s)| (v * s).cos())
            .collect();
        let mut prefix = 1.0;
        for k in 0..self.d {
            out[k] = prefix;
            prefix *= cosines[k];
        }
        let mut suffix = 1.0;
        for k in (0..self.d).rev() {
            let others = out[k] * suffix;
            let s = self.inv_sqrt_i[k];
            out[k] = x[k] / 2000.0 + s * (x[k] * s).sin() * others;
            suffix *= cosines[k];
        }
        self.penalty.add_gradient(x, out);
    }

    fn minimizer(&self) -> Option<Point> {
        Point::zeros(self.d).ok()
    }

    fn min_value(&self) -> Option<f64> {
        Some(0.0)
    }

    fn region(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        Some((self.penalty.lower.clone(), self.penalty.upper.clone()))
    }

    fn name(&self) -> String {
        format!("griewank(d={})", self.d)
    }
}
