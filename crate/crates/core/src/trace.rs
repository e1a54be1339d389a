//! Per-iteration run records and their CSV form.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{euclidean_distance, Point};

/// Coordinates beyond this magnitude abort a run.
pub const DIVERGENCE_BOUND: f64 = 1e12;

/// Snapshot stride used when a config leaves it unset: `max(1, N / 1000)`.
pub fn default_stride(n_iter: usize) -> usize {
    (n_iter / 1000).max(1)
}

pub(crate) fn guard_point(x: &[f64], iteration: usize, chain: &str) -> Result<()> {
    if let Some((i, v)) = x
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || v.abs() > DIVERGENCE_BOUND)
    {
        return Err(Error::Divergence {
            iteration,
            reason: format!("{chain} coordinate {i} = {v}"),
        });
    }
    Ok(())
}

pub(crate) fn guard_value(f: f64, iteration: usize, chain: &str) -> Result<()> {
    if f.is_finite() {
        Ok(())
    } else {
        Err(Error::Divergence {
            iteration,
            reason: format!("{chain} objective value {f}"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub n: usize,
    pub f_x: f64,
    /// Absent for single-chain modes.
    pub f_y: Option<f64>,
    pub swapped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub n: usize,
    pub x: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub x: Point,
    pub y: Option<Point>,
    pub n: usize,
}

/// Work counters: exact objective calls and individual data samples drawn
/// by stochastic oracles.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalTally {
    pub exact_values: u64,
    pub exact_gradients: u64,
    pub value_samples: u64,
    pub gradient_samples: u64,
}

impl EvalTally {
    pub fn total_samples(&self) -> u64 {
        self.value_samples + self.gradient_samples
    }

    pub fn add(&mut self, other: &EvalTally) {
        self.exact_values += other.exact_values;
        self.exact_gradients += other.exact_gradients;
        self.value_samples += other.value_samples;
        self.gradient_samples += other.gradient_samples;
    }
}

/// Record of one run. `records[k]` describes iteration `k + 1`; the starting
/// point is kept in `start` and snapshots are taken at multiples of `stride`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub start: Point,
    pub start_f: f64,
    pub stride: usize,
    pub records: Vec<Record>,
    pub snapshots: Vec<Snapshot>,
    pub terminal: Terminal,
    pub tally: EvalTally,
    /// Exact first iteration inside the tracked criterion, when one was tracked.
    pub tracked_hit: Option<usize>,
}

impl Trace {
    pub fn dim(&self) -> usize {
        self.start.dim()
    }

    pub fn swap_count(&self) -> usize {
        self.records.iter().filter(|r| r.swapped).count()
    }

    pub fn f_values(&self) -> impl Iterator<Item = f64> + '_ {
        std::iter::once(self.start_f).chain(self.records.iter().map(|r| r.f_x))
    }

    /// CSV with header `n,fX,fY,swapped[,x0..x{d-1}]`; coordinates are filled
    /// only on snapshot rows. Reals use 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let d = self.dim();
        let with_x = !self.snapshots.is_empty();
        write!(w, "n,fX,fY,swapped")?;
        if with_x {
            for i in 0..d {
                write!(w, ",x{i}")?;
            }
        }
        writeln!(w)?;
        let mut snaps = self.snapshots.iter().peekable();
        for r in &self.records {
            write!(w, "{},{},", r.n, fmt_real(r.f_x))?;
            if let Some(fy) = r.f_y {
                write!(w, "{}", fmt_real(fy))?;
            }
            write!(w, ",{}", u8::from(r.swapped))?;
            if with_x {
                match snaps.next_if(|s| s.n == r.n) {
                    Some(s) => {
                        for v in s.x.iter() {
                            write!(w, ",{}", fmt_real(*v))?;
                        }
                    }
                    None => {
                        for _ in 0..d {
                            write!(w, ",")?;
                        }
                    }
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// 17 significant digits, round-trippable.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Success predicate: Euclidean ball around a known minimizer, plus an
/// objective-gap variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuccessCriterion {
    pub x_star: Point,
    pub tol: f64,
    pub f_star: f64,
    pub f_tol: f64,
}

impl SuccessCriterion {
    pub fn new(x_star: Point, tol: f64, f_star: f64, f_tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::config("tol", "must be > 0"));
        }
        if !(f_tol > 0.0) {
            return Err(Error::config("f_tol", "must be > 0"));
        }
        Ok(SuccessCriterion {
            x_star,
            tol,
            f_star,
            f_tol,
        })
    }

    pub fn within_ball(&self, x: &[f64]) -> bool {
        euclidean_distance(x, &self.x_star).is_ok_and(|r| r <= self.tol)
    }

    pub fn within_gap(&self, f: f64) -> bool {
        f - self.f_star <= self.f_tol
    }
}
