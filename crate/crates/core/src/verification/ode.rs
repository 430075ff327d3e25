use serde::Serialize;

use crate::error::{require_positive, Result};
use crate::model::{Schedule, State};

pub const RK4_METHOD: &str = "rk4-fixed-step";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub step: f64,
    pub method: &'static str,
}

impl IntegratorConfig {
    pub fn new(step: f64) -> Result<Self> {
        require_positive("step", step)?;
        Ok(Self {
            step,
            method: RK4_METHOD,
        })
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            step: 1e-4,
            method: RK4_METHOD,
        }
    }
}

#[inline]
fn rhs(x: &State, u: f64) -> State {
    State::new(x.x2, x.x3 - x.x1, u)
}

#[inline]
fn axpy(x: &State, h: f64, k: &State) -> State {
    State::new(x.x1 + h * k.x1, x.x2 + h * k.x2, x.x3 + h * k.x3)
}

#[inline]
fn rk4_step(x: &State, u: f64, h: f64) -> State {
    let k1 = rhs(x, u);
    let k2 = rhs(&axpy(x, 0.5 * h, &k1), u);
    let k3 = rhs(&axpy(x, 0.5 * h, &k2), u);
    let k4 = rhs(&axpy(x, h, &k3), u);
    State::new(
        x.x1 + h / 6.0 * (k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1),
        x.x2 + h / 6.0 * (k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2),
        x.x3 + h / 6.0 * (k1.x3 + 2.0 * k2.x3 + 2.0 * k3.x3 + k4.x3),
    )
}

/// Integrates `ẋ = Ax + u b` from the origin with classical RK4.
///
/// Each constant-control segment is integrated on its own: full steps, then
/// one shortened step to land exactly on the switch.
pub fn integrate_ode(schedule: &Schedule, config: &IntegratorConfig) -> State {
    let h = config.step;
    let mut x = State::ORIGIN;
    for seg in schedule.segments() {
        let u = seg.u.value();
        let full = (seg.duration / h).floor();
        let n = full as u64;
        for _ in 0..n {
            x = rk4_step(&x, u, h);
        }
        let rest = seg.duration - full * h;
        if rest > 0.0 {
            x = rk4_step(&x, u, rest);
        }
    }
    x
}
