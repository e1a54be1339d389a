//! Replica-exchange hybrid optimizers.
//!
//! A gradient-descent chain exploits while a Langevin chain explores; after
//! every step the two positions are exchanged (or the explorer's position is
//! copied) whenever the explorer has found a lower objective value. Offline
//! variants use exact gradients, online variants mini-batch estimates with an
//! exchange threshold and an exchange boundary.

pub mod error;
pub mod harness;
pub mod objectives;
pub mod optimizers;
pub mod point;
pub mod rng;
pub mod theory;
pub mod trace;

pub use error::{Error, Result};
pub use point::{euclidean_distance, Point};
pub use rng::{gaussian_draw, RngStream};
pub use trace::{SuccessCriterion, Trace};
