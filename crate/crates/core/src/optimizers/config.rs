use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::exchange::ExchangeRule;
use super::DEFAULT_ONLINE_T0;
use crate::error::{Error, Result};
use crate::point::Point;
use crate::trace::{default_stride, SuccessCriterion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Gd,
    Ld,
    Gdxld,
    Ngdxld,
    Sgd,
    Sgld,
    Sgdxsgld,
    Nsgdxsgld,
}

impl Mode {
    pub const ALL: [Mode; 8] = [
        Mode::Gd,
        Mode::Ld,
        Mode::Gdxld,
        Mode::Ngdxld,
        Mode::Sgd,
        Mode::Sgld,
        Mode::Sgdxsgld,
        Mode::Nsgdxsgld,
    ];

    pub fn is_online(self) -> bool {
        matches!(self, Mode::Sgd | Mode::Sgld | Mode::Sgdxsgld | Mode::Nsgdxsgld)
    }

    /// Two chains with an exchange step.
    pub fn is_coupled(self) -> bool {
        self.exchange_rule().is_some()
    }

    pub fn exchange_rule(self) -> Option<ExchangeRule> {
        match self {
            Mode::Gdxld | Mode::Sgdxsgld => Some(ExchangeRule::Swap),
            Mode::Ngdxld | Mode::Nsgdxsgld => Some(ExchangeRule::Copy),
            _ => None,
        }
    }

    /// Whether a single-chain mode injects Langevin noise.
    pub fn single_chain_is_langevin(self) -> bool {
        matches!(self, Mode::Ld | Mode::Sgld)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Gd => "gd",
            Mode::Ld => "ld",
            Mode::Gdxld => "gdxld",
            Mode::Ngdxld => "ngdxld",
            Mode::Sgd => "sgd",
            Mode::Sgld => "sgld",
            Mode::Sgdxsgld => "sgdxsgld",
            Mode::Nsgdxsgld => "nsgdxsgld",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::config("mode", format!("unknown mode `{s}`")))
    }
}

/// Hyper-parameters of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub mode: Mode,
    /// Step size h.
    pub h: f64,
    /// Temperature γ of the Langevin chain.
    pub gamma: f64,
    /// Exchange threshold t₀.
    pub t0: f64,
    pub n_iter: usize,
    /// Mini-batch size Θ (online modes); `None` uses the oracle's own.
    pub batch_size: Option<usize>,
    /// Exchange boundary M̂_V (online modes); `None` means +∞.
    pub exchange_radius: Option<f64>,
    pub x0: Point,
    /// Explorer start; coupled modes fall back to `x0`.
    pub y0: Option<Point>,
    pub seed: u64,
    pub snapshot_stride: Option<usize>,
    /// Criterion whose first hit is recorded at full resolution.
    pub track: Option<SuccessCriterion>,
    /// End the run at the tracked first hit.
    pub stop_at_hit: bool,
}

impl RunConfig {
    /// Config with mode-appropriate defaults: t₀ = 0 offline, 0.05 online.
    pub fn new(mode: Mode, h: f64, gamma: f64, n_iter: usize, x0: Point) -> Self {
        RunConfig {
            mode,
            h,
            gamma,
            t0: if mode.is_online() { DEFAULT_ONLINE_T0 } else { 0.0 },
            n_iter,
            batch_size: None,
            exchange_radius: None,
            x0,
            y0: None,
            seed: 0,
            snapshot_stride: None,
            track: None,
            stop_at_hit: false,
        }
    }

    pub fn with_y0(mut self, y0: Point) -> Self {
        self.y0 = Some(y0);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_t0(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.snapshot_stride = Some(stride);
        self
    }

    pub fn with_batch_size(mut self, batch: usize) -> Self {
        self.batch_size = Some(batch);
        self
    }

    pub fn with_exchange_radius(mut self, radius: f64) -> Self {
        self.exchange_radius = Some(radius);
        self
    }

    pub fn tracking(mut self, criterion: SuccessCriterion, stop_at_hit: bool) -> Self {
        self.track = Some(criterion);
        self.stop_at_hit = stop_at_hit;
        self
    }

    pub fn stride(&self) -> usize {
        self.snapshot_stride.unwrap_or_else(|| default_stride(self.n_iter))
    }

    pub fn dim(&self) -> usize {
        self.x0.dim()
    }

    pub fn explorer_start(&self) -> &Point {
        self.y0.as_ref().unwrap_or(&self.x0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::config("h", format!("must be finite and > 0, got {}", self.h)));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::config("gamma", format!("must be finite and >= 0, got {}", self.gamma)));
        }
        if !(self.t0 >= 0.0) || !self.t0.is_finite() {
            return Err(Error::config("t0", format!("must be finite and >= 0, got {}", self.t0)));
        }
        if self.mode.is_online() && self.t0 <= 0.0 {
            return Err(Error::config("t0", "online modes require t0 > 0"));
        }
        if self.batch_size == Some(0) {
            return Err(Error::config("batch_size", "must be >= 1"));
        }
        if let Some(r) = self.exchange_radius {
            if !(r > 0.0) {
                return Err(Error::config("exchange_radius", format!("must be > 0, got {r}")));
            }
        }
        if self.n_iter == 0 {
            return Err(Error::config("n_iter", "must be >= 1"));
        }
        if self.snapshot_stride == Some(0) {
            return Err(Error::config("snapshot_stride", "must be >= 1"));
        }
        if let Some(y0) = &self.y0 {
            if y0.dim() != self.x0.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.x0.dim(),
                    got: y0.dim(),
                });
            }
        }
        if let Some(c) = &self.track {
            if c.x_star.dim() != self.x0.dim() {
                return Err(Error::DimensionMismatch {
                    expected: self.x0.dim(),
                    got: c.x_star.dim(),
                });
            }
        }
        Ok(())
    }
}
