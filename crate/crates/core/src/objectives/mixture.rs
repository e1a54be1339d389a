use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use rand::Rng;
use rand_distr::Exp1;

use super::{BoxPenalty, Objective};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// How random grid weights are drawn before normalization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightLaw {
    /// iid Exp(1), i.e. uniform on the probability simplex.
    #[default]
    Simplex,
    /// iid Uniform(lo, hi).
    Uniform { lo: f64, hi: f64 },
}

impl WeightLaw {
    fn draw(&self, n: usize, rng: &mut RngStream) -> Result<Vec<f64>> {
        match *self {
            WeightLaw::Simplex => Ok((0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect()),
            WeightLaw::Uniform { lo, hi } => {
                if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                    return Err(Error::config("weight_law", format!("need 0 < lo < hi, got ({lo}, {hi})")));
                }
                Ok((0..n).map(|_| rng.uniform_in(lo, hi)).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: Vec<f64>,
    /// Diagonal of Σ.
    pub cov_diag: Vec<f64>,
}

/// Diagonal-covariance Gaussian mixture plus the box used for the edge penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixtureSpec {
    pub components: Vec<MixtureComponent>,
    pub penalty: BoxPenalty,
}

impl GaussianMixtureSpec {
    /// Weights sum to one, covariances positive, dimensions consistent.
    pub fn validate(&self) -> Result<()> {
        let d = self.penalty.dim();
        if self.components.is_empty() {
            return Err(Error::config("components", "at least one component required"));
        }
        for (i, c) in self.components.iter().enumerate() {
            if c.mean.len() != d || c.cov_diag.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: if c.mean.len() != d { c.mean.len() } else { c.cov_diag.len() },
                });
            }
            if !(c.weight > 0.0) || !c.weight.is_finite() {
                return Err(Error::config(format!("components[{i}].weight"), "must be > 0"));
            }
            if c.cov_diag.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
                return Err(Error::config(format!("components[{i}].cov_diag"), "entries must be > 0"));
            }
            if c.mean.iter().any(|m| !m.is_finite()) {
                return Err(Error::config(format!("components[{i}].mean"), "must be finite"));
            }
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::config("weights", format!("sum to {total}, expected 1")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.penalty.dim()
    }

    /// Components on the integer grid `{0, …, side−1}²` with isotropic
    /// variance `var`, box `[−1, side]²` and weights drawn from `law` with
    /// `weight_seed`, then normalized.
    pub fn grid(side: usize, var: f64, weight_seed: u64, law: WeightLaw) -> Result<Self> {
        if side == 0 {
            return Err(Error::config("side", "must be >= 1"));
        }
        let mut rng = RngStream::new(weight_seed);
        let raw = law.draw(side * side, &mut rng)?;
        let total: f64 = raw.iter().sum();
        let components = (0..side)
            .flat_map(|i| (0..side).map(move |j| (i, j)))
            .zip(raw)
            .map(|((i, j), w)| MixtureComponent {
                weight: w / total,
                mean: vec![i as f64, j as f64],
                cov_diag: vec![var, var],
            })
            .collect();
        let spec = GaussianMixtureSpec {
            components,
            penalty: BoxPenalty::cube(2, -1.0, side as f64)?,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The 25-mode landscape used throughout the two-dimensional experiments.
    pub fn grid25(weight_seed: u64) -> Result<Self> {
        GaussianMixtureSpec::grid(5, 0.1, weight_seed, WeightLaw::Simplex)
    }

    /// Same means and weights with every covariance inflated by `extra`.
    pub fn inflated(&self, extra: f64) -> Self {
        GaussianMixtureSpec {
            components: self
                .components
                .iter()
                .map(|c| MixtureComponent {
                    weight: c.weight,
                    mean: c.mean.clone(),
                    cov_diag: c.cov_diag.iter().map(|s| s + extra).collect(),
                })
                .collect(),
            penalty: self.penalty.clone(),
        }
    }

    /// Mixture density at `x` (no penalty).
    pub fn density(&self, x: &[f64]) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * gaussian_pdf_diag(x, &c.mean, &c.cov_diag))
            .sum()
    }

    /// First seed below `limit` whose `grid25` landscape is lowest at the
    /// mean `mode`, with value there within `tol` of `value`. Values are
    /// read at the component means.
    pub fn find_grid25_seed(mode: &[f64], value: f64, tol: f64, limit: u64) -> Option<u64> {
        (0..limit).find(|&seed| {
            let Ok(spec) = GaussianMixtureSpec::grid25(seed) else {
                return false;
            };
            let lowest = spec
                .components
                .iter()
                .map(|c| (c, -spec.density(&c.mean)))
                .min_by(|a, b| a.1.total_cmp(&b.1));
            lowest.is_some_and(|(c, f)| c.mean == mode && (f - value).abs() <= tol)
        })
    }
}

pub(crate) fn gaussian_pdf_diag(x: &[f64], mean: &[f64], var: &[f64]) -> f64 {
    let mut q = 0.0;
    let mut det = 1.0;
    for j in 0..x.len() {
        let dx = x[j] - mean[j];
        q += dx * dx / var[j];
        det *= 2.0 * PI * var[j];
    }
    (-0.5 * q).exp() / det.sqrt()
}

#[derive(Debug, Clone)]
struct Compiled {
    scale: f64,
    mean: Vec<f64>,
    inv_var: Vec<f64>,
}

/// F(x) = −Σᵢ wᵢ N(x; mᵢ, Σᵢ) + L_box(x).
#[derive(Debug, Clone)]
pub struct GaussianMixture {
    spec: GaussianMixtureSpec,
    compiled: Vec<Compiled>,
}

impl GaussianMixture {
    pub fn new(spec: GaussianMixtureSpec) -> Result<Self> {
        spec.validate()?;
        let compiled = spec
            .components
            .iter()
            .map(|c| {
                let det: f64 = c.cov_diag.iter().map(|s| 2.0 * PI * s).product();
                Compiled {
                    scale: c.weight / det.sqrt(),
                    mean: c.mean.clone(),
                    inv_var: c.cov_diag.iter().map(|s| 1.0 / s).collect(),
                }
            })
            .collect();
        Ok(GaussianMixture { spec, compiled })
    }

    pub fn spec(&self) -> &GaussianMixtureSpec {
        &self.spec
    }

    /// Component means, the natural starting points for locating the mode.
    pub fn means(&self) -> Vec<Vec<f64>> {
        self.spec.components.iter().map(|c| c.mean.clone()).collect()
    }
}

pub fn make_gaussian_mixture(spec: GaussianMixtureSpec) -> Result<GaussianMixture> {
    GaussianMixture::new(spec)
}

impl Objective for GaussianMixture {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut density = 0.0;
        for c in &self.compiled {
            let mut q = 0.0;
            for j in 0..x.len() {
                let dx = x[j] - c.mean[j];
                q += dx * dx * c.inv_var[j];
            }
            density += c.scale * (-0.5 * q).exp();
        }
        -density + self.spec.penalty.value(x)
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for c in &self.compiled {
            let mut q = 0.0;
            for j in 0..x.len() {
                let dx = x[j] - c.mean[j];
                q += dx * dx * c.inv_var[j];
            }
            let e = c.scale * (-0.5 * q).exp();
            for j in 0..x.len() {
                out[j] += e * (x[j] - c.mean[j]) * c.inv_var[j];
            }
        }
        self.spec.penalty.add_gradient(x, out);
    }

    fn region(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        Some((self.spec.penalty.lower.clone(), self.spec.penalty.upper.clone()))
    }

    fn name(&self) -> String {
        format!("gaussian-mixture({} components)", self.compiled.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::testing::{gradient_error, random_points};

    fn single() -> GaussianMixture {
        GaussianMixture::new(GaussianMixtureSpec {
            components: vec![MixtureComponent {
                weight: 1.0,
                mean: vec![0.0, 0.0],
                cov_diag: vec![0.1, 0.1],
            }],
            penalty: BoxPenalty::cube(2, -1.0, 5.0).unwrap(),
        })
        .unwrap()
    }

    #[test]
    fn single_component_at_mode() {
        let f = single();
        // -1 / (2π · 0.1), evaluated by hand
        let expected = -1.591_549_430_918_953_4;
        assert!((f.value(&[0.0, 0.0]) - expected).abs() < 1e-12);
        assert_eq!(f.gradient(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = GaussianMixture::new(GaussianMixtureSpec::grid25(3).unwrap()).unwrap();
        for x in random_points(&[-1.0, -1.0], &[5.0, 5.0], 100, 11) {
            let err = gradient_error(&f, &x);
            assert!(err <= 1e-5, "at {x:?}: {err}");
        }
    }

    #[test]
    fn grid_weights_normalized_and_bounded() {
        let spec = GaussianMixtureSpec::grid25(99).unwrap();
        assert_eq!(spec.components.len(), 25);
        let ws: Vec<f64> = spec.components.iter().map(|c| c.weight).collect();
        assert!((ws.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(ws.iter().all(|&w| w > 0.0));
        assert_eq!(spec, GaussianMixtureSpec::grid25(99).unwrap());
        assert_ne!(spec, GaussianMixtureSpec::grid25(100).unwrap());
        // Uniform(0.5, 1.5) normalized: ratio of any two weights below 3
        let law = WeightLaw::Uniform { lo: 0.5, hi: 1.5 };
        let spec = GaussianMixtureSpec::grid(5, 0.1, 99, law).unwrap();
        let (lo, hi) = spec.components.iter().fold((f64::MAX, 0.0f64), |(a, b), c| (a.min(c.weight), b.max(c.weight)));
        assert!(hi / lo < 3.0);
        assert!(GaussianMixtureSpec::grid(5, 0.1, 1, WeightLaw::Uniform { lo: 1.0, hi: 0.5 }).is_err());
    }

    #[test]
    fn seed_search_checks_mode_and_value() {
        let seed = GaussianMixtureSpec::find_grid25_seed(&[3.0, 2.0], -0.168, 5e-4, 10_000).unwrap();
        assert_eq!(seed, 3866);
        let spec = GaussianMixtureSpec::grid25(seed).unwrap();
        let f = -spec.density(&[3.0, 2.0]);
        assert!((f + 0.168).abs() <= 5e-4);
        assert!(spec.components.iter().all(|c| -spec.density(&c.mean) >= f));
        assert_eq!(GaussianMixtureSpec::find_grid25_seed(&[3.0, 2.0], -0.168, 5e-4, seed), None);
        assert_eq!(GaussianMixtureSpec::find_grid25_seed(&[0.5, 0.5], -0.1, 1.0, 100), None);
    }

    #[test]
    fn simplex_weights_have_uniform_marginals() {
        // Dirichlet(1, …, 1) marginal is Beta(1, 24): mean 1/25, variance 24/(25²·26)
        let n = 4_000;
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for seed in 0..n {
            let w = GaussianMixtureSpec::grid25(seed).unwrap().components[7].weight;
            m1 += w;
            m2 += w * w;
        }
        let mean = m1 / n as f64;
        let var = m2 / n as f64 - mean * mean;
        let target = 24.0 / (625.0 * 26.0);
        assert!((mean - 0.04).abs() < 3.0 * (target / n as f64).sqrt());
        assert!((var / target - 1.0).abs() < 0.15);
    }

    #[test]
    fn validation_errors() {
        let mut spec = single().spec().clone();
        spec.components[0].weight = 0.5;
        assert!(GaussianMixture::new(spec.clone()).is_err());
        spec.components[0].weight = 1.0;
        spec.components[0].cov_diag[1] = 0.0;
        assert!(GaussianMixture::new(spec).is_err());
    }

    #[test]
    fn continuous_across_box_faces() {
        let f = GaussianMixture::new(GaussianMixtureSpec::grid25(1).unwrap()).unwrap();
        for face in [-1.0, 5.0] {
            let a = [face - 1e-8, 2.0];
            let b = [face + 1e-8, 2.0];
            assert!((f.value(&a) - f.value(&b)).abs() < 1e-7);
            let (ga, gb) = (f.gradient(&a), f.gradient(&b));
            assert!((ga[0] - gb[0]).abs() < 1e-6);
        }
    }
}
