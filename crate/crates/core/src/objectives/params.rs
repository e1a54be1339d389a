use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Regularity constants of an objective: gradient Lipschitz constant `l`,
/// coercivity pair (`lambda_c`, `m_c`) with ‖∇F‖² ≥ λ_c F − M_c, Hessian
/// bounds `m ≤ M` near the minimizer, and the valley radii `r0`, `r_l`, `r_u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoryParams {
    #[serde(rename = "L")]
    pub l: f64,
    pub lambda_c: f64,
    #[serde(rename = "M_c")]
    pub m_c: f64,
    pub m: f64,
    #[serde(rename = "M")]
    pub m_upper: f64,
    pub r0: f64,
    pub r_l: f64,
    pub r_u: f64,
    pub d: usize,
}

impl TheoryParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("L", self.l),
            ("lambda_c", self.lambda_c),
            ("m", self.m),
            ("M", self.m_upper),
            ("r0", self.r0),
            ("r_l", self.r_l),
            ("r_u", self.r_u),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(name, format!("must be finite and > 0, got {v}")));
            }
        }
        if !(self.m_c >= 0.0) || !self.m_c.is_finite() {
            return Err(Error::config("M_c", format!("must be finite and >= 0, got {}", self.m_c)));
        }
        if !(self.m <= self.m_upper && self.m_upper <= self.l) {
            return Err(Error::config("m", "require m <= M <= L"));
        }
        if self.r_l > self.r_u {
            return Err(Error::config("r_l", "require r_l <= r_u"));
        }
        if self.d == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(())
    }

    /// F(x) = ½‖x‖²: ‖∇F‖² = 2F gives λ_c = 2, M_c = 0; L = m = M = 1.
    /// Taking r = 2 in the valley construction: a = min_{‖x‖≥2} F = 2, so
    /// r₀ = a/2 = 1, r_l = √(a/M) = √2, r_u = 2.
    pub fn quadratic(d: usize) -> Self {
        TheoryParams {
            l: 1.0,
            lambda_c: 2.0,
            m_c: 0.0,
            m: 1.0,
            m_upper: 1.0,
            r0: 1.0,
            r_l: std::f64::consts::SQRT_2,
            r_u: 2.0,
            d,
        }
    }

    pub fn preset(name: &str, d: usize) -> Option<Self> {
        match name {
            "quadratic" => Some(TheoryParams::quadratic(d)),
            _ => None,
        }
    }
}
