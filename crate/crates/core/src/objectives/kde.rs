//! Online KDE objective.
//!
//! Data S follow a Gaussian mixture. With the Gaussian kernel
//! κ_σ(x, s) = (2πσ)^{−d/2} exp(−‖x − s‖² / 2σ) (σ is a variance),
//! p(x) = E_S κ_σ(x, S) is the mixture with every covariance inflated by σ,
//! so F(x) = −p(x) + L_box(x) has a closed form to check the oracle against.

use std::f64::consts::PI;

use super::mixture::{GaussianMixture, GaussianMixtureSpec};
use super::{BoxPenalty, Objective, StochasticOracle};
use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct KdeOracle {
    cdf: Vec<f64>,
    means: Vec<Vec<f64>>,
    std_devs: Vec<Vec<f64>>,
    sigma: f64,
    kernel_norm: f64,
    batch: usize,
    penalty: BoxPenalty,
    exact: GaussianMixture,
}

/// Builds the exact smoothed objective and its mini-batch oracle.
pub fn make_kde_objective(
    mixture: &GaussianMixtureSpec,
    sigma: f64,
    batch_size: usize,
) -> Result<(GaussianMixture, KdeOracle)> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::config("sigma", format!("must be > 0, got {sigma}")));
    }
    if batch_size == 0 {
        return Err(Error::config("batch_size", "must be >= 1"));
    }
    mixture.validate()?;
    let exact = GaussianMixture::new(mixture.inflated(sigma))?;
    let d = mixture.dim();
    let mut acc = 0.0;
    let cdf = mixture
        .components
        .iter()
        .map(|c| {
            acc += c.weight;
            acc
        })
        .collect();
    let oracle = KdeOracle {
        cdf,
        means: mixture.components.iter().map(|c| c.mean.clone()).collect(),
        std_devs: mixture
            .components
            .iter()
            .map(|c| c.cov_diag.iter().map(|s| s.sqrt()).collect())
            .collect(),
        sigma,
        kernel_norm: (2.0 * PI * sigma).powf(-(d as f64) / 2.0),
        batch: batch_size,
        penalty: mixture.penalty.clone(),
        exact: exact.clone(),
    };
    Ok((exact, oracle))
}

impl KdeOracle {
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn with_batch_size(&self, batch_size: usize) -> Result<Self> {
        if batch_size == 0 {
            return Err(Error::config("batch_size", "must be >= 1"));
        }
        Ok(KdeOracle {
            batch: batch_size,
            ..self.clone()
        })
    }

    /// Draws one data point S from the mixture.
    pub fn draw_sample(&self, rng: &mut RngStream, out: &mut [f64]) {
        let u = rng.uniform() * self.cdf[self.cdf.len() - 1];
        let k = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.means[k][j] + self.std_devs[k][j] * rng.standard_normal();
        }
    }

    pub fn kernel(&self, x: &[f64], s: &[f64]) -> f64 {
        let r2: f64 = x.iter().zip(s).map(|(a, b)| (a - b) * (a - b)).sum();
        self.kernel_norm * (-r2 / (2.0 * self.sigma)).exp()
    }

    /// ∇ₓκ_σ(x, s) = −κ_σ(x, s)(x − s)/σ, added into `out` with factor `scale`.
    pub fn add_kernel_gradient(&self, x: &[f64], s: &[f64], scale: f64, out: &mut [f64]) {
        let k = self.kernel(x, s);
        for j in 0..x.len() {
            out[j] -= scale * k * (x[j] - s[j]) / self.sigma;
        }
    }
}

impl StochasticOracle for KdeOracle {
    fn dim(&self) -> usize {
        self.penalty.dim()
    }

    fn batch_size(&self) -> usize {
        self.batch
    }

    fn sample_values(&self, points: &[&[f64]], rng: &mut RngStream) -> Vec<f64> {
        let mut sums = vec![0.0; points.len()];
        let mut s = vec![0.0; self.dim()];
        for _ in 0..self.batch {
            self.draw_sample(rng, &mut s);
            for (acc, x) in sums.iter_mut().zip(points) {
                *acc += self.kernel(x, &s);
            }
        }
        sums.iter()
            .zip(points)
            .map(|(acc, x)| -acc / self.batch as f64 + self.penalty.value(x))
            .collect()
    }

    fn sample_grad_into(&self, x: &[f64], rng: &mut RngStream, out: &mut [f64]) {
        out.fill(0.0);
        let mut s = vec![0.0; self.dim()];
        // F̂ carries −κ, so each sample contributes −∇κ.
        let scale = -1.0 / self.batch as f64;
        for _ in 0..self.batch {
            self.draw_sample(rng, &mut s);
            self.add_kernel_gradient(x, &s, scale, out);
        }
        self.penalty.add_gradient(x, out);
    }

    fn exact(&self) -> Option<&dyn Objective> {
        Some(&self.exact)
    }

    fn name(&self) -> String {
        format!("kde(σ={}, Θ={})", self.sigma, self.batch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::mixture::MixtureComponent;

    fn single(sigma: f64, batch: usize) -> (GaussianMixture, KdeOracle) {
        let spec = GaussianMixtureSpec {
            components: vec![MixtureComponent {
                weight: 1.0,
                mean: vec![0.0, 0.0],
                cov_diag: vec![0.1, 0.1],
            }],
            penalty: BoxPenalty::cube(2, -1.0, 5.0).unwrap(),
        };
        make_kde_objective(&spec, sigma, batch).unwrap()
    }

    #[test]
    fn exact_value_at_mode() {
        let (exact, _) = single(0.01, 10);
        // −1 / (2π · 0.11)
        assert!((exact.value(&[0.0, 0.0]) + 1.446_863_119_017_230_4).abs() < 1e-12);
    }

    #[test]
    fn kernel_mean_matches_convolution_identity() {
        // Independent route: average κ over 10⁶ iid draws of S, 3-sigma band.
        let (exact, oracle) = single(0.01, 1);
        let mut rng = RngStream::new(77);
        let n = 1_000_000;
        let x = [0.0, 0.0];
        let mut s = [0.0; 2];
        let (mut m1, mut m2) = (0.0, 0.0);
        for _ in 0..n {
            oracle.draw_sample(&mut rng, &mut s);
            let k = oracle.kernel(&x, &s);
            m1 += k;
            m2 += k * k;
        }
        let mean = m1 / n as f64;
        let se = ((m2 / n as f64 - mean * mean) / n as f64).sqrt();
        assert!((-mean - exact.value(&x)).abs() < 3.0 * se, "mean {mean} se {se}");
    }

    #[test]
    fn large_batch_value_concentrates() {
        let (exact, oracle) = single(0.01, 1_000_000);
        let mut rng = RngStream::new(5);
        let x = [0.1, -0.05];
        let est = oracle.sample_value(&x, &mut rng);
        // analytic per-sample variance: E κ² = (4πσ)^{-1} N(x; m, Σ + σ/2)
        let spec = exact.spec();
        let base = spec.inflated(-0.01);
        let e2 = base.inflated(0.005).density(&x) / (4.0 * PI * 0.01);
        let p = -exact.value(&x);
        let sd = (e2 - p * p).sqrt();
        assert!((est - exact.value(&x)).abs() < 3.0 * sd / 1000.0);
    }

    #[test]
    fn unit_batch_is_one_kernel_evaluation() {
        let (_, oracle) = single(0.01, 1);
        let x = [0.2, 0.3];
        let mut rng = RngStream::new(9);
        let mut replay = rng.clone();
        let v = oracle.sample_value(&x, &mut rng);
        let mut s = [0.0; 2];
        oracle.draw_sample(&mut replay, &mut s);
        assert_eq!(v, -oracle.kernel(&x, &s));
    }

    #[test]
    fn same_stream_same_estimates() {
        let (_, oracle) = single(0.01, 50);
        let x = [0.4, -0.2];
        let rng = RngStream::new(3);
        let (mut a, mut b) = (rng.clone(), rng);
        assert_eq!(oracle.sample_value(&x, &mut a), oracle.sample_value(&x, &mut b));
        assert_eq!(oracle.sample_grad(&x, &mut a), oracle.sample_grad(&x, &mut b));
    }

    #[test]
    fn kernel_gradient_matches_finite_differences() {
        let (_, oracle) = single(0.01, 1);
        let s = [0.05, -0.02];
        for x in [[0.0, 0.0], [0.1, 0.07], [-0.03, 0.2]] {
            let mut g = [0.0; 2];
            oracle.add_kernel_gradient(&x, &s, 1.0, &mut g);
            for j in 0..2 {
                let eps = 1e-6;
                let mut xp = x;
                xp[j] += eps;
                let mut xm = x;
                xm[j] -= eps;
                let fd = (oracle.kernel(&xp, &s) - oracle.kernel(&xm, &s)) / (2.0 * eps);
                assert!((fd - g[j]).abs() <= 1e-5 * g[j].abs().max(1.0), "{fd} vs {}", g[j]);
            }
        }
    }

    #[test]
    fn gradient_estimator_is_unbiased() {
        let (exact, oracle) = single(0.01, 10);
        let x = [0.15, -0.1];
        let g = exact.gradient(&x);
        let mut rng = RngStream::new(21);
        let calls = 10_000;
        let mut sum = [0.0; 2];
        let mut sum2 = [0.0; 2];
        for _ in 0..calls {
            let e = oracle.sample_grad(&x, &mut rng);
            for j in 0..2 {
                sum[j] += e[j];
                sum2[j] += e[j] * e[j];
            }
        }
        for j in 0..2 {
            let mean = sum[j] / calls as f64;
            let se = ((sum2[j] / calls as f64 - mean * mean) / calls as f64).sqrt();
            assert!((mean - g[j]).abs() < 3.0 * se, "coord {j}: {mean} vs {} (se {se})", g[j]);
        }
    }

    #[test]
    fn gradient_mean_vanishes_at_mode() {
        let (_, oracle) = single(0.01, 100);
        let mut rng = RngStream::new(8);
        let calls = 2_000;
        let mut sum = [0.0; 2];
        let mut sum2 = [0.0; 2];
        for _ in 0..calls {
            let e = oracle.sample_grad(&[0.0, 0.0], &mut rng);
            for j in 0..2 {
                sum[j] += e[j];
                sum2[j] += e[j] * e[j];
            }
        }
        for j in 0..2 {
            let mean = sum[j] / calls as f64;
            let se = (sum2[j] / calls as f64 / calls as f64).sqrt();
            assert!(mean.abs() < 3.0 * se);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let spec = GaussianMixtureSpec::grid25(1).unwrap();
        assert!(make_kde_objective(&spec, 0.0, 10).is_err());
        assert!(make_kde_objective(&spec, 0.01, 0).is_err());
    }
}
