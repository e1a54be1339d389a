use serde::{Deserialize, Serialize};

use crate::point::norm;

/// What happens to the pair when the explorer wins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExchangeRule {
    /// (X, Y) ← (Y', X')
    Swap,
    /// (X, Y) ← (Y', Y'); the explorer keeps its position.
    Copy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapDecision {
    pub swap: bool,
    /// Values that were compared, before any exchange.
    pub f_x: f64,
    pub f_y: f64,
}

impl SwapDecision {
    /// Objective values attached to the post-exchange pair.
    pub fn post_exchange_values(&self, rule: ExchangeRule) -> (f64, f64) {
        match (self.swap, rule) {
            (false, _) => (self.f_x, self.f_y),
            (true, ExchangeRule::Swap) => (self.f_y, self.f_x),
            (true, ExchangeRule::Copy) => (self.f_y, self.f_y),
        }
    }
}

/// Exchange iff F(Y') < F(X') − t₀, evaluated as F(X') − F(Y') > t₀ so the
/// decision depends on the values only through their difference.
pub fn decide_offline(f_x: f64, f_y: f64, t0: f64) -> SwapDecision {
    SwapDecision {
        swap: f_x - f_y > t0,
        f_x,
        f_y,
    }
}

/// Offline predicate on estimates, gated on both proposals lying inside the
/// exchange boundary (`radius = None` is an infinite boundary).
pub fn decide_online(
    f_x: f64,
    f_y: f64,
    t0: f64,
    radius: Option<f64>,
    norm_x: f64,
    norm_y: f64,
) -> SwapDecision {
    let inside = radius.is_none_or(|r| norm_x <= r && norm_y <= r);
    SwapDecision {
        swap: inside && f_x - f_y > t0,
        f_x,
        f_y,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exchanged<P> {
    pub x: P,
    pub y: P,
    pub swapped: bool,
}

fn apply<P: Clone>(swap: bool, rule: ExchangeRule, x: P, y: P) -> Exchanged<P> {
    match (swap, rule) {
        (false, _) => Exchanged { x, y, swapped: false },
        (true, ExchangeRule::Swap) => Exchanged {
            x: y,
            y: x,
            swapped: true,
        },
        (true, ExchangeRule::Copy) => Exchanged {
            x: y.clone(),
            y,
            swapped: true,
        },
    }
}

pub fn exchange_offline<P: Clone>(
    f_x: f64,
    f_y: f64,
    t0: f64,
    rule: ExchangeRule,
    x: P,
    y: P,
) -> Exchanged<P> {
    apply(decide_offline(f_x, f_y, t0).swap, rule, x, y)
}

pub fn exchange_online<P: Clone + AsRef<[f64]>>(
    f_x: f64,
    f_y: f64,
    t0: f64,
    radius: Option<f64>,
    rule: ExchangeRule,
    x: P,
    y: P,
) -> Exchanged<P> {
    let d = decide_online(f_x, f_y, t0, radius, norm(x.as_ref()), norm(y.as_ref()));
    apply(d.swap, rule, x, y)
}
