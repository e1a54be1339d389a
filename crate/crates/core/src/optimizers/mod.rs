//! The eight iteration schemes: GD, LD, GDxLD, nGDxLD and their mini-batch
//! counterparts SGD, SGLD, SGDxSGLD, nSGDxSGLD.

mod config;
mod driver;
mod exchange;
mod steps;

pub use config::{Mode, RunConfig};
pub use driver::{rounding_floor, run, run_seeded, Target};
pub use exchange::{
    decide_offline, decide_online, exchange_offline, exchange_online, ExchangeRule, Exchanged,
    SwapDecision,
};
pub use steps::{gd_step, ld_step, sgd_step, sgld_step};

/// Default threshold for the online exchange test.
pub const DEFAULT_ONLINE_T0: f64 = 0.05;
