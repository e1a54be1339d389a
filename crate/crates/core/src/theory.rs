//! Constants and iteration counts from the convergence certificate of the
//! offline algorithms.
//!
//! Counts come in two forms: the real-valued thresholds used by the proofs
//! and their ceilings. The `iters_*` and `geometric_trials` functions return
//! ceilings; [`BoundReport`] carries both.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{Objective, TheoryParams};
use crate::point::{norm, Point};
use crate::rng::{gaussian_draw, RngStream};

/// Ceiling that ignores representation error just above an integer.
fn ceil_count(x: f64) -> f64 {
    (x - 1e-12 * x.abs().max(1.0)).ceil().max(0.0)
}

fn positive(op: &'static str, name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::precondition(op, format!("{name} must be finite and > 0, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovConstants {
    pub c_v: f64,
    pub r_v: f64,
    pub eta_max: f64,
}

/// C_V = M_c/4 + 4γLd, R_V = 8C_V/λ_c, η_max = 1/(8γ).
pub fn lyapunov_constants(p: &TheoryParams, gamma: f64, h: f64) -> Result<LyapunovConstants> {
    p.validate()?;
    positive("lyapunov_constants", "h", h)?;
    if h > 1.0 / (2.0 * p.l) {
        return Err(Error::precondition(
            "lyapunov_constants",
            format!("h = {h} exceeds 1/(2L) = {}", 1.0 / (2.0 * p.l)),
        ));
    }
    positive("lyapunov_constants", "gamma", gamma)?;
    let c_v = p.m_c / 4.0 + 4.0 * gamma * p.l * p.d as f64;
    Ok(LyapunovConstants {
        c_v,
        r_v: 8.0 * c_v / p.lambda_c,
        eta_max: 1.0 / (8.0 * gamma),
    })
}

/// Volume of the unit ball in R^d, π^{d/2}/Γ(d/2 + 1).
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::ZeroDimension);
    }
    // V_d = (2π/d) V_{d−2}, V_0 = 1, V_1 = 2
    let mut v = if d % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if d % 2 == 0 { 2 } else { 3 };
    while k <= d {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    Ok(v)
}

/// Lower bound S_d r^d (4πγh)^{−d/2} exp(−(D² + r²)/(2γh)) on the chance that
/// one Langevin step from a point with ‖x − h∇F(x)‖ ≤ D lands in the r-ball
/// around the minimizer, clamped to [0, 1].
pub fn smallset_alpha(r: f64, reach: f64, gamma: f64, h: f64, d: usize) -> Result<f64> {
    positive("smallset_alpha", "r", r)?;
    if !(reach >= 0.0) || !reach.is_finite() {
        return Err(Error::precondition("smallset_alpha", format!("D must be finite and >= 0, got {reach}")));
    }
    let gh = gamma * h;
    positive("smallset_alpha", "gamma*h", gh)?;
    let d_f = d as f64;
    let log_alpha = unit_ball_volume(d)?.ln() + d_f * r.ln()
        - 0.5 * d_f * (4.0 * PI * gh).ln()
        - (reach * reach + r * r) / (2.0 * gh);
    Ok(log_alpha.exp().clamp(0.0, 1.0))
}

fn strongconvex_real(eps: f64, r0: f64, m: f64, h: f64) -> Result<f64> {
    positive("iters_strongconvex", "eps", eps)?;
    positive("iters_strongconvex", "r0", r0)?;
    if eps > r0 {
        return Err(Error::precondition("iters_strongconvex", format!("eps = {eps} exceeds r0 = {r0}")));
    }
    let mh = m * h;
    if !(mh > 0.0 && mh < 1.0) {
        return Err(Error::precondition("iters_strongconvex", format!("m*h must lie in (0, 1), got {mh}")));
    }
    Ok(((eps.ln() - r0.ln()) / (1.0 - mh).ln()).max(0.0))
}

/// Iterations for the GD chain to go from F − F* ≤ r₀ to ≤ ε at linear rate
/// (1 − mh): ⌈(log ε − log r₀)/log(1 − mh)⌉.
pub fn iters_strongconvex(eps: f64, r0: f64, m: f64, h: f64) -> Result<f64> {
    strongconvex_real(eps, r0, m, h).map(ceil_count)
}

fn convex_real(eps: f64, r0: f64, r_u: f64, h: f64) -> Result<f64> {
    positive("iters_convex", "eps", eps)?;
    positive("iters_convex", "r0", r0)?;
    positive("iters_convex", "r_u", r_u)?;
    positive("iters_convex", "h", h)?;
    if eps > r0 {
        return Err(Error::precondition("iters_convex", format!("eps = {eps} exceeds r0 = {r0}")));
    }
    Ok((1.0 / eps - 1.0 / r0) * r_u * r_u / h)
}

/// Sublinear counterpart: ⌈(1/ε − 1/r₀) r_u²/h⌉.
pub fn iters_convex(eps: f64, r0: f64, r_u: f64, h: f64) -> Result<f64> {
    convex_real(eps, r0, r_u, h).map(ceil_count)
}

fn trials_real(delta: f64, alpha: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::precondition("geometric_trials", format!("delta must lie in (0, 1), got {delta}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::precondition("geometric_trials", format!("alpha must lie in (0, 1), got {alpha}")));
    }
    Ok((delta / 2.0).ln() / (1.0 - alpha).ln())
}

/// Independent visits needed so that all miss the small set with probability
/// below δ/2: ⌈log(δ/2)/log(1 − α)⌉.
pub fn geometric_trials(delta: f64, alpha: f64) -> Result<f64> {
    trials_real(delta, alpha).map(ceil_count)
}

/// T(δ) = −log(δ/2)/(hηC_V) + 2K + K R_V/(hC_V) + log(V₀)/(hηC_V),
/// with V₀ = V(X₀) + V(Y₀).
pub fn hitting_time_bound(delta: f64, k: f64, eta: f64, h: f64, c_v: f64, r_v: f64, v0: f64) -> Result<f64> {
    const OP: &str = "hitting_time_bound";
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::precondition(OP, format!("delta must lie in (0, 1), got {delta}")));
    }
    for (name, v) in [("K", k), ("eta", eta), ("h", h), ("C_V", c_v), ("R_V", r_v), ("V0", v0)] {
        positive(OP, name, v)?;
    }
    let drift = h * eta * c_v;
    Ok(-(delta / 2.0).ln() / drift + 2.0 * k + k * r_v / (h * c_v) + v0.ln() / drift)
}

/// V(x) = exp(ηF(x)).
pub fn lyapunov_value(obj: &dyn Objective, x: &Point, eta: f64) -> Result<f64> {
    positive("lyapunov_value", "eta", eta)?;
    if x.dim() != obj.dim() {
        return Err(Error::DimensionMismatch {
            expected: obj.dim(),
            got: x.dim(),
        });
    }
    let arg = eta * obj.value(x);
    let v = arg.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow {
            op: "lyapunov_value",
            reason: format!("exp(eta*F) with eta*F = {arg}"),
        })
    }
}

/// Which local convergence rate to certify inside the valley.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValleyRate {
    #[default]
    StrongConvex,
    Convex,
}

/// Inputs to a full certificate beyond the regularity constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundInputs {
    pub gamma: f64,
    pub h: f64,
    pub eps: f64,
    pub delta: f64,
    /// D: largest ‖x − h∇F(x)‖ over the sublevel set {F ≤ R_V}.
    #[serde(rename = "D")]
    pub reach: f64,
    /// η; defaults to η_max.
    #[serde(default)]
    pub eta: Option<f64>,
    /// F(X₀) − F* and F(Y₀) − F* for V₀.
    #[serde(default)]
    pub f_x0: f64,
    #[serde(default)]
    pub f_y0: f64,
    #[serde(default)]
    pub rate: ValleyRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(rename = "C_V")]
    pub c_v: f64,
    #[serde(rename = "R_V")]
    pub r_v: f64,
    pub eta_max: f64,
    pub eta: f64,
    pub v0: f64,
    /// α(r_l, D).
    pub alpha_lower: f64,
    #[serde(rename = "K")]
    pub k_trials: f64,
    pub k_eps: f64,
    pub t_delta: f64,
    pub n_total: f64,
    #[serde(rename = "K_ceil")]
    pub k_trials_ceil: f64,
    pub k_eps_ceil: f64,
    /// T(δ) evaluated with ⌈K⌉, rounded up.
    pub t_delta_ceil: f64,
    /// ⌈T⌉ + ⌈k(ε)⌉.
    pub n_total_ceil: f64,
}

impl BoundReport {
    pub fn compute(p: &TheoryParams, inp: &BoundInputs) -> Result<Self> {
        let lc = lyapunov_constants(p, inp.gamma, inp.h)?;
        let eta = inp.eta.unwrap_or(lc.eta_max);
        positive("bounds", "eta", eta)?;
        if eta > lc.eta_max {
            return Err(Error::precondition("bounds", format!("eta = {eta} exceeds eta_max = {}", lc.eta_max)));
        }
        let v0 = (eta * inp.f_x0).exp() + (eta * inp.f_y0).exp();
        if !v0.is_finite() {
            return Err(Error::Overflow {
                op: "bounds",
                reason: "V(X0) + V(Y0) overflows".into(),
            });
        }
        let alpha = smallset_alpha(p.r_l, inp.reach, inp.gamma, inp.h, p.d)?;
        let k_trials = trials_real(inp.delta, alpha)?;
        let k_eps = match inp.rate {
            ValleyRate::StrongConvex => strongconvex_real(inp.eps, p.r0, p.m, inp.h)?,
            ValleyRate::Convex => convex_real(inp.eps, p.r0, p.r_u, inp.h)?,
        };
        let t_delta = hitting_time_bound(inp.delta, k_trials, eta, inp.h, lc.c_v, lc.r_v, v0)?;
        let k_trials_ceil = ceil_count(k_trials);
        let k_eps_ceil = ceil_count(k_eps);
        let t_delta_ceil = ceil_count(hitting_time_bound(
            inp.delta,
            k_trials_ceil,
            eta,
            inp.h,
            lc.c_v,
            lc.r_v,
            v0,
        )?);
        Ok(BoundReport {
            c_v: lc.c_v,
            r_v: lc.r_v,
            eta_max: lc.eta_max,
            eta,
            v0,
            alpha_lower: alpha,
            k_trials,
            k_eps,
            t_delta,
            n_total: t_delta + k_eps,
            k_trials_ceil,
            k_eps_ceil,
            t_delta_ceil,
            n_total_ceil: t_delta_ceil + k_eps_ceil,
        })
    }

    /// Aligned `name  value` lines.
    pub fn to_text(&self) -> String {
        let rows = [
            ("C_V", self.c_v),
            ("R_V", self.r_v),
            ("eta_max", self.eta_max),
            ("eta", self.eta),
            ("V0", self.v0),
            ("alpha_lower", self.alpha_lower),
            ("K", self.k_trials),
            ("K_ceil", self.k_trials_ceil),
            ("k_eps", self.k_eps),
            ("k_eps_ceil", self.k_eps_ceil),
            ("T_delta", self.t_delta),
            ("T_delta_ceil", self.t_delta_ceil),
            ("N_total", self.n_total),
            ("N_total_ceil", self.n_total_ceil),
        ];
        rows.iter().map(|(k, v)| format!("{k:<14}{v:>24.12e}\n")).collect()
    }
}

/// Grid estimate of D = max ‖x − h∇F(x)‖ over {F ≤ level} ∩ box, with
/// `points_per_axis` grid points per coordinate. Returns `None` when no grid
/// point lies in the sublevel set.
pub fn estimate_reach(
    obj: &dyn Objective,
    h: f64,
    level: f64,
    lower: &[f64],
    upper: &[f64],
    points_per_axis: usize,
) -> Result<Option<f64>> {
    let d = obj.dim();
    if lower.len() != d || upper.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: lower.len().max(upper.len()),
        });
    }
    if points_per_axis < 2 {
        return Err(Error::precondition("estimate_reach", "need at least 2 points per axis"));
    }
    let total = (points_per_axis as f64).powi(d as i32);
    if total > 1e8 {
        return Err(Error::precondition("estimate_reach", format!("grid of {total} points is too large")));
    }
    let mut idx = vec![0usize; d];
    let mut x = vec![0.0; d];
    let mut g = vec![0.0; d];
    let mut best: Option<f64> = None;
    loop {
        for j in 0..d {
            let t = idx[j] as f64 / (points_per_axis - 1) as f64;
            x[j] = lower[j] + t * (upper[j] - lower[j]);
        }
        if obj.value(&x) <= level {
            obj.gradient_into(&x, &mut g);
            let step: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - h * b).collect();
            let r = norm(&step);
            best = Some(best.map_or(r, |b| b.max(r)));
        }
        let mut j = 0;
        loop {
            if j == d {
                return Ok(best);
            }
            idx[j] += 1;
            if idx[j] < points_per_axis {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Monte-Carlo lower estimate of the gradient Lipschitz constant L on a box:
/// the largest ‖∇F(x + δu) − ∇F(x)‖/δ over `samples` uniform points x and
/// random unit directions u, with δ = 1e-5.
pub fn estimate_smoothness(
    obj: &dyn Objective,
    lower: &[f64],
    upper: &[f64],
    samples: usize,
    rng: &mut RngStream,
) -> Result<f64> {
    let d = obj.dim();
    if lower.len() != d || upper.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: lower.len().max(upper.len()),
        });
    }
    if samples == 0 {
        return Err(Error::precondition("estimate_smoothness", "need at least one sample"));
    }
    const DELTA: f64 = 1e-5;
    let mut g0 = vec![0.0; d];
    let mut g1 = vec![0.0; d];
    let mut best = 0.0f64;
    for _ in 0..samples {
        let x: Vec<f64> = lower.iter().zip(upper).map(|(&l, &u)| rng.uniform_in(l, u)).collect();
        let u = gaussian_draw(rng, d)?;
        let scale = DELTA / u.norm();
        let y: Vec<f64> = x.iter().zip(u.coords()).map(|(a, b)| a + scale * b).collect();
        obj.gradient_into(&x, &mut g0);
        obj.gradient_into(&y, &mut g1);
        let diff: f64 = g0.iter().zip(&g1).map(|(a, b)| (a - b) * (a - b)).sum();
        best = best.max(diff.sqrt() / DELTA);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{make_quadratic, make_rastrigin};
    use crate::rng::RngStream;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn lyapunov_example() {
        let mut p = TheoryParams::quadratic(2);
        p.m_c = 4.0;
        p.lambda_c = 1.0;
        let c = lyapunov_constants(&p, 1.0, 0.1).unwrap();
        assert!(close(c.c_v, 9.0, 1e-15));
        assert!(close(c.r_v, 72.0, 1e-15));
        assert!(close(c.eta_max, 0.125, 1e-15));
        assert!(lyapunov_constants(&p, 0.0, 0.1).is_err());
        assert!(lyapunov_constants(&p, 1.0, 0.6).is_err());
        let mut prev = 0.0;
        for d in 1..10 {
            p.d = d;
            let c = lyapunov_constants(&p, 1.0, 0.1).unwrap().c_v;
            assert!(c > prev);
            prev = c;
        }
    }

    #[test]
    fn ball_volumes() {
        assert!(close(unit_ball_volume(1).unwrap(), 2.0, 1e-15));
        assert!(close(unit_ball_volume(2).unwrap(), PI, 1e-15));
        assert!(close(unit_ball_volume(3).unwrap(), 4.0 * PI / 3.0, 1e-15));
        // Γ(3) = 2, Γ(7/2) = 15√π/8
        assert!(close(unit_ball_volume(4).unwrap(), PI * PI / 2.0, 1e-14));
        assert!(close(unit_ball_volume(5).unwrap(), PI.powf(2.5) / (15.0 * PI.sqrt() / 8.0), 1e-14));
        assert!(unit_ball_volume(0).is_err());
    }

    #[test]
    fn alpha_example_and_monotonicity() {
        let a = smallset_alpha(1.0, 0.0, 1.0, 0.5, 1).unwrap();
        let expect = 2.0 / (2.0 * PI).sqrt() * (-1.0f64).exp();
        assert!(close(a, expect, 1e-14));
        assert!((a - 0.293525).abs() < 5e-7);
        assert!(smallset_alpha(1.0, 0.0, 0.0, 0.5, 1).is_err());
        for d in 1..4 {
            for gh in [0.05, 0.5, 2.0] {
                let mut prev = f64::INFINITY;
                for reach in [0.0, 0.3, 1.0, 2.0, 4.0] {
                    let a = smallset_alpha(0.5, reach, gh, 1.0, d).unwrap();
                    assert!((0.0..=1.0).contains(&a));
                    assert!(a < prev || prev == 0.0);
                    prev = a;
                }
            }
        }
    }

    #[test]
    fn alpha_peaks_where_the_radius_matches_the_noise() {
        // with u = r²/(2γh) the bound is S_d (u/2π)^{d/2} e^{−u}, largest at u = d/2
        for d in 1..6 {
            let gh = 0.3;
            let peak = smallset_alpha((d as f64 * gh).sqrt(), 0.0, gh, 1.0, d).unwrap();
            for r in [0.1, 0.5, 1.0, 2.0, 3.0] {
                assert!(smallset_alpha(r, 0.0, gh, 1.0, d).unwrap() <= peak * (1.0 + 1e-12));
            }
            assert!(peak < 1.0);
        }
    }

    #[test]
    fn alpha_dominated_by_one_step_hit_rate() {
        // Y' = (1−h)Y + √(2γh)Z on the quadratic, started where ‖(1−h)Y‖ = D.
        let mut rng = RngStream::new(99);
        for (r, reach, gamma, h) in [(0.5, 0.0, 1.0, 0.1), (1.0, 0.5, 1.0, 0.2), (0.3, 0.2, 0.5, 0.1)] {
            let alpha = smallset_alpha(r, reach, gamma, h, 2).unwrap();
            let trials = 100_000;
            let s = (2.0 * gamma * h).sqrt();
            let hits = (0..trials)
                .filter(|_| {
                    let a = reach + s * rng.standard_normal();
                    let b = s * rng.standard_normal();
                    a * a + b * b <= r * r
                })
                .count();
            let p = hits as f64 / trials as f64;
            let se = (alpha * (1.0 - alpha) / trials as f64).sqrt();
            assert!(p + 3.0 * se >= alpha, "p {p} alpha {alpha}");
        }
    }

    #[test]
    fn strongconvex_counts() {
        assert_eq!(iters_strongconvex(1.0, 1.0, 1.0, 0.5).unwrap(), 0.0);
        assert_eq!(iters_strongconvex(0.25, 1.0, 1.0, 0.5).unwrap(), 2.0);
        assert!(iters_strongconvex(2.0, 1.0, 1.0, 0.5).is_err());
        assert!(iters_strongconvex(0.5, 1.0, 1.0, 1.0).is_err());
        // halving ε adds log 2 / −log(1−mh) to the real count
        let step = 2f64.ln() / -(1.0f64 - 0.3).ln();
        let mut prev = iters_strongconvex(0.9, 1.0, 1.0, 0.3).unwrap();
        let mut eps = 0.9;
        for _ in 0..10 {
            eps /= 2.0;
            let k = iters_strongconvex(eps, 1.0, 1.0, 0.3).unwrap();
            assert!(k - prev == step.floor() || k - prev == step.ceil());
            prev = k;
        }
        // mh = 1/2: the step is exactly one iteration
        assert_eq!(iters_strongconvex(0.125, 1.0, 1.0, 0.5).unwrap(), 3.0);
    }

    #[test]
    fn convex_counts() {
        assert_eq!(iters_convex(1.0, 1.0, 1.0, 0.1).unwrap(), 0.0);
        assert_eq!(iters_convex(0.1, 1.0, 1.0, 0.1).unwrap(), 90.0);
        assert!(iters_convex(1.5, 1.0, 1.0, 0.1).is_err());
        let a = convex_real(0.1, 1.0, 1.0, 0.1).unwrap();
        let b = convex_real(0.05, 1.0, 1.0, 0.1).unwrap();
        let c = convex_real(0.025, 1.0, 1.0, 0.1).unwrap();
        assert!(close(c - b, 2.0 * (b - a), 1e-12));
    }

    #[test]
    fn trial_counts() {
        assert_eq!(geometric_trials(0.5, 0.5).unwrap(), 2.0);
        assert_eq!(geometric_trials(0.5, 1.0 - 1e-12).unwrap(), 1.0);
        assert!(geometric_trials(0.5, 0.0).is_err());
        assert!(geometric_trials(0.5, 1.0).is_err());
        let mut prev = 0.0;
        for delta in [0.9, 0.5, 0.1, 0.01, 1e-4] {
            let k = trials_real(delta, 0.2).unwrap();
            assert!(k > prev);
            prev = k;
        }
    }

    #[test]
    fn hitting_time_examples() {
        let t = hitting_time_bound(0.05, 10.0, 0.125, 0.1, 9.0, 72.0, 2.0).unwrap();
        let indep = (40f64).ln() / 0.1125 + 20.0 + 800.0 + 2f64.ln() / 0.1125;
        assert!(close(t, indep, 1e-13));
        assert!((t - 858.9).abs() < 0.1);
        // log terms vanish as δ → 2 and V₀ = 1; evaluate the remainder directly
        let k = 3.0;
        let t_small = hitting_time_bound(1.0 - 1e-15, k, 0.5, 0.1, 2.0, 5.0, 1.0).unwrap();
        assert!(close(t_small, 2.0 * k + k * 5.0 / 0.2 + 2f64.ln() / 0.1, 1e-9));
        let mut prev = 0.0;
        for r_v in [1.0, 10.0, 100.0] {
            let t = hitting_time_bound(0.05, 10.0, 0.125, 0.1, 9.0, r_v, 2.0).unwrap();
            assert!(t > prev);
            prev = t;
        }
        let mut prev = 0.0;
        for k in [1.0, 2.0, 5.0] {
            let t = hitting_time_bound(0.05, k, 0.125, 0.1, 9.0, 72.0, 2.0).unwrap();
            assert!(t > prev);
            prev = t;
        }
        assert!(hitting_time_bound(1.5, 10.0, 0.125, 0.1, 9.0, 72.0, 2.0).is_err());
    }

    #[test]
    fn lyapunov_values() {
        let q = make_quadratic(2).unwrap();
        assert_eq!(lyapunov_value(&q, &Point::zeros(2).unwrap(), 0.125).unwrap(), 1.0);
        let x = Point::new(vec![2f64.sqrt(), 0.0]).unwrap();
        assert!(close(lyapunov_value(&q, &x, 0.125).unwrap(), 0.125f64.exp(), 1e-15));
        assert!((lyapunov_value(&q, &x, 0.125).unwrap() - 1.13315).abs() < 5e-6);
        let far = Point::new(vec![1e3, 0.0]).unwrap();
        assert!(matches!(lyapunov_value(&q, &far, 1.0), Err(Error::Overflow { .. })));
    }

    #[test]
    fn lyapunov_drift_on_quadratic() {
        // E V(Y') ≤ exp(−ηhλ_c F(Y)/4 + ηhC_V) V(Y) for one LD step
        let p = TheoryParams::quadratic(1);
        let q = make_quadratic(1).unwrap();
        let (gamma, h) = (1.0, 0.1);
        let lc = lyapunov_constants(&p, gamma, h).unwrap();
        let eta = lc.eta_max;
        let mut rng = RngStream::new(2024);
        for y in [0.0, 0.5, 2.0, 4.0] {
            let yp = Point::new(vec![y]).unwrap();
            let trials = 100_000;
            let s = (2.0 * gamma * h).sqrt();
            let (mut m1, mut m2) = (0.0, 0.0);
            for _ in 0..trials {
                let next = Point::new(vec![(1.0 - h) * y + s * rng.standard_normal()]).unwrap();
                let v = lyapunov_value(&q, &next, eta).unwrap();
                m1 += v;
                m2 += v * v;
            }
            let mean = m1 / trials as f64;
            let se = ((m2 / trials as f64 - mean * mean) / trials as f64).sqrt();
            let f = 0.5 * y * y;
            let bound = (-0.25 * eta * h * p.lambda_c * f + eta * h * lc.c_v).exp()
                * lyapunov_value(&q, &yp, eta).unwrap();
            assert!(mean <= bound + 3.0 * se, "y {y}: {mean} > {bound}");
        }
    }

    #[test]
    fn report_composes() {
        let p = TheoryParams::quadratic(2);
        let inp = BoundInputs {
            gamma: 1.0,
            h: 0.1,
            eps: p.r0,
            delta: 0.1,
            reach: 2.0,
            eta: None,
            f_x0: 0.5,
            f_y0: 0.5,
            rate: ValleyRate::StrongConvex,
        };
        let r = BoundReport::compute(&p, &inp).unwrap();
        assert_eq!(r.k_eps, 0.0);
        assert_eq!(r.k_eps_ceil, 0.0);
        assert!(close(r.n_total, r.t_delta + r.k_eps, 1e-15));
        let lc = lyapunov_constants(&p, 1.0, 0.1).unwrap();
        assert_eq!(r.c_v, lc.c_v);
        let alpha = smallset_alpha(p.r_l, 2.0, 1.0, 0.1, 2).unwrap();
        assert_eq!(r.alpha_lower, alpha);
        assert_eq!(r.k_trials_ceil, geometric_trials(0.1, alpha).unwrap());
        let r2 = BoundReport::compute(&p, &BoundInputs { eps: 0.01, ..inp }).unwrap();
        assert_eq!(r2.k_eps_ceil, iters_strongconvex(0.01, 1.0, 1.0, 0.1).unwrap());
        assert!(BoundReport::compute(&p, &BoundInputs { gamma: 0.0, ..inp }).is_err());
        assert!(r.to_text().lines().count() == 14);
    }

    #[test]
    fn reach_on_quadratic() {
        // {½‖x‖² ≤ R} is the ball of radius √(2R); the GD map scales by (1−h)
        let q = make_quadratic(2).unwrap();
        let d = estimate_reach(&q, 0.1, 2.0, &[-3.0, -3.0], &[3.0, 3.0], 61).unwrap().unwrap();
        assert!((d - 0.9 * 2.0).abs() < 1e-9);
        assert_eq!(estimate_reach(&q, 0.1, -1.0, &[-1.0, -1.0], &[1.0, 1.0], 5).unwrap(), None);
    }

    #[test]
    fn smoothness_estimates() {
        let mut rng = RngStream::new(5);
        let q = make_quadratic(3).unwrap();
        let l = estimate_smoothness(&q, &[-2.0; 3], &[2.0; 3], 50, &mut rng).unwrap();
        assert!((l - 1.0).abs() < 1e-6);
        // Rastrigin d=1: F'' = 2 + 40π² cos(2πx), peaking at integers
        let r = make_rastrigin(1).unwrap();
        let l = estimate_smoothness(&r, &[-0.01], &[0.01], 200, &mut rng).unwrap();
        let exact = 2.0 + 40.0 * PI * PI;
        assert!(l <= exact * (1.0 + 1e-4) && l >= exact * 0.99, "{l}");
        assert!(estimate_smoothness(&q, &[0.0], &[1.0], 5, &mut rng).is_err());
        assert!(estimate_smoothness(&q, &[0.0; 3], &[1.0; 3], 0, &mut rng).is_err());
    }
}
