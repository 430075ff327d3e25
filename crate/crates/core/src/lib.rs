//! Minimum-time transport of a particle in a harmonic trap whose centre moves
//! with bounded speed.
//!
//! The dimensionless model is `x1' = x2`, `x2' = x3 - x1`, `x3' = u` with
//! `|u| <= 1`, steered from the origin to `(γ, 0, γ)`. [`synthesis`] builds
//! the optimal bang-bang schedule, [`verification`] checks it against
//! independent oracles and [`quantum`] evolves an oscillator eigenstate
//! along the resulting trap path.

pub mod cli;
pub mod error;
pub mod model;
pub mod quantum;
pub mod root;
pub mod synthesis;
pub mod verification;

pub use error::{Error, Result};
pub use model::{
    gamma, propagate_schedule, ControlSegment, PhysicalParams, Schedule, Sign, State,
};
pub use synthesis::{build_schedule, minimum_time, SynthesisResult};
