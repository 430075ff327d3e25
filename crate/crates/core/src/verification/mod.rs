//! Oracles that check the synthesis independently of its construction.

pub mod brute_force;
pub mod ode;
pub mod residual;

pub use brute_force::{
    brute_force_min_time, brute_force_search, BruteForceOptions, BruteForceReport,
    FEASIBILITY_TOL,
};
pub use ode::{integrate_ode, IntegratorConfig, RK4_METHOD};
pub use residual::{endpoint_residual, EndpointResidual};
