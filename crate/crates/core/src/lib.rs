//! Stationary equilibria, optimal static signals and optimal dynamic signals
//! for an SIS epidemic in which agents choose protection based on a noisy
//! signal of their own infection state.
//!
//! * [`model`]: parameters, state, posterior and utility formulas.
//! * [`equilibrium`]: signal thresholds, equilibrium classification, optimal static signal.
//! * [`simulate`]: coupled epidemic and smoothed Smith dynamics, RK4 integration.
//! * [`optimal_control`]: piecewise-constant optimal signal by shooting and projected gradient.
//! * [`sweep`]: batch experiments over signal grids.

pub mod equilibrium;
pub mod error;
pub mod model;
pub mod optimal_control;
pub mod par;
pub mod roots;
pub mod simulate;
pub mod sweep;

pub use error::{Error, Result};
pub use par::Exec;
