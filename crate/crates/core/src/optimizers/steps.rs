use crate::error::{Error, Result};
use crate::objectives::{Objective, StochasticOracle};
use crate::point::Point;
use crate::rng::RngStream;
use crate::trace::guard_point;

pub(crate) fn descend_into(x: &[f64], grad: &[f64], h: f64, out: &mut [f64]) {
    for ((o, xi), gi) in out.iter_mut().zip(x).zip(grad) {
        *o = xi - h * gi;
    }
}

pub(crate) fn add_noise(out: &mut [f64], scale: f64, rng: &mut RngStream) {
    for o in out.iter_mut() {
        *o += scale * rng.standard_normal();
    }
}

fn check(op: &'static str, x: &Point, dim: usize, h: f64, gamma: f64) -> Result<()> {
    if x.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.dim(),
        });
    }
    if !(h > 0.0) {
        return Err(Error::precondition(op, format!("h must be > 0, got {h}")));
    }
    if !(gamma >= 0.0) {
        return Err(Error::precondition(op, format!("gamma must be >= 0, got {gamma}")));
    }
    Ok(())
}

fn finish(out: Vec<f64>, chain: &str) -> Result<Point> {
    guard_point(&out, 0, chain)?;
    Point::new(out)
}

/// x − h ∇F(x).
pub fn gd_step(obj: &dyn Objective, x: &Point, h: f64) -> Result<Point> {
    check("gd_step", x, obj.dim(), h, 0.0)?;
    let g = obj.gradient(x);
    let mut out = vec![0.0; x.dim()];
    descend_into(x, &g, h, &mut out);
    finish(out, "X")
}

/// y − h ∇F(y) + √(2γh) Z with Z ~ N(0, I).
pub fn ld_step(obj: &dyn Objective, y: &Point, h: f64, gamma: f64, rng: &mut RngStream) -> Result<Point> {
    check("ld_step", y, obj.dim(), h, gamma)?;
    let g = obj.gradient(y);
    let mut out = vec![0.0; y.dim()];
    descend_into(y, &g, h, &mut out);
    add_noise(&mut out, (2.0 * gamma * h).sqrt(), rng);
    finish(out, "Y")
}

/// x − h ∇F̂(x) with a fresh gradient batch from `data`.
pub fn sgd_step(oracle: &dyn StochasticOracle, x: &Point, h: f64, data: &mut RngStream) -> Result<Point> {
    check("sgd_step", x, oracle.dim(), h, 0.0)?;
    let g = oracle.sample_grad(x, data);
    let mut out = vec![0.0; x.dim()];
    descend_into(x, &g, h, &mut out);
    finish(out, "X")
}

/// y − h ∇F̂(y) + √(2γh) Z; gradient batch from `data`, Z from `noise`.
pub fn sgld_step(
    oracle: &dyn StochasticOracle,
    y: &Point,
    h: f64,
    gamma: f64,
    data: &mut RngStream,
    noise: &mut RngStream,
) -> Result<Point> {
    check("sgld_step", y, oracle.dim(), h, gamma)?;
    let g = oracle.sample_grad(y, data);
    let mut out = vec![0.0; y.dim()];
    descend_into(y, &g, h, &mut out);
    add_noise(&mut out, (2.0 * gamma * h).sqrt(), noise);
    finish(out, "Y")
}
