use crate::model::{advance, boundary_states, Schedule};

/// Simpson panels are at most this wide.
const SIMPSON_MAX_H: f64 = 5e-3;

pub fn energy(n: usize) -> f64 {
    n as f64 + 0.5
}

/// Global phase `φ_n(T) = -(E_n T + ½∫[ȧ² + s² - a²] dt)` of the transported
/// eigenstate, with `a = V·x1`, `ȧ = V·x2`, `s = V·x3`.
pub fn predicted_phase(n: usize, schedule: &Schedule, vmax: f64) -> f64 {
    predicted_phase_with_hold(n, schedule, vmax, 0.0)
}

/// As [`predicted_phase`], followed by `hold` time units at rest at the
/// target. The integrand vanishes there, so only `E_n` accrues.
pub fn predicted_phase_with_hold(n: usize, schedule: &Schedule, vmax: f64, hold: f64) -> f64 {
    let t_total = schedule.total_time() + hold;
    -(energy(n) * t_total + 0.5 * vmax * vmax * action_integral(schedule))
}

/// `∫ (x2² + x3² - x1²) dt` along the closed-form trajectory.
fn action_integral(schedule: &Schedule) -> f64 {
    let starts = boundary_states(schedule);
    schedule
        .segments()
        .zip(&starts)
        .map(|(seg, &x0)| {
            let u = seg.u.value();
            let f = |t: f64| {
                let x = advance(x0, u, t);
                x.x2 * x.x2 + x.x3 * x.x3 - x.x1 * x.x1
            };
            simpson(f, seg.duration)
        })
        .sum()
}

fn simpson<F: Fn(f64) -> f64>(f: F, len: f64) -> f64 {
    let m = 2 * ((len / SIMPSON_MAX_H / 2.0).ceil() as usize).max(1);
    let h = len / m as f64;
    let mut acc = f(0.0) + f(len);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0
}

/// Reduces an angle to `(-π, π]`.
pub fn wrap_phase(phi: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let r = phi.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sign;
    use std::f64::consts::PI;

    #[test]
    fn idle_trap_phase() {
        let p = predicted_phase_with_hold(0, &Schedule::empty(), 1.0, 3.0);
        assert_eq!(p, -1.5);
        let p = predicted_phase_with_hold(2, &Schedule::empty(), 1.0, 2.0);
        assert_eq!(p, -5.0);
    }

    #[test]
    fn single_ramp_matches_closed_form() {
        // u = +1 from rest: x1 = t - sin t, x2 = 1 - cos t, x3 = t.
        // ∫_0^T x2² + x3² - x1² = ∫ (1-cos)² + 2t sin t - sin² t dt
        let t: f64 = 2.0 * PI;
        let exact = {
            let a = 1.5 * t - 2.0 * t.sin() + 0.25 * (2.0 * t).sin();
            let b = 2.0 * (t.sin() - t * t.cos());
            let c = 0.5 * t - 0.25 * (2.0 * t).sin();
            a + b - c
        };
        let s = Schedule::bang(Sign::Plus, t).unwrap();
        let got = predicted_phase(0, &s, 1.0);
        let want = -(0.5 * t + 0.5 * exact);
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(|t| t * t * t - 2.0 * t, 2.0);
        assert!((v - 0.0).abs() < 1e-12);
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-15);
        assert!((wrap_phase(7.0) - (7.0 - 2.0 * PI)).abs() < 1e-15);
        assert_eq!(wrap_phase(0.25), 0.25);
    }
}
