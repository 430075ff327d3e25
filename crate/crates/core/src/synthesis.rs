//! Time-optimal synthesis for the transfer `(0, 0, 0) → (γ, 0, γ)`.
//!
//! For `2(ρ-1)π < γ < 2ρπ` the optimal control starts at `+1` and switches
//! `2ρ` times. The first and last arcs share a duration `τ ∈ (0, π)`, the
//! root of
//!
//! ```text
//! f_ρ(τ) = (2τ + 2(ρ-1)π - γ)/(2ρ-1) - 2·atan(sin τ / (2ρ - cos τ)) = 0,
//! ```
//!
//! every even arc lasts `(2τ + 2(ρ-1)π - γ)/(2ρ-1)` and every interior odd
//! arc completes it to `2π`. At `γ = 2ρπ` the optimum is the single bang
//! `u ≡ +1` of length `2ρπ`.

use std::f64::consts::{PI, TAU};
use std::io::{self, Write};

use serde::{Serialize, Serializer};

use crate::error::{require_finite, Error, Result};
use crate::model::{Schedule, Sign};
use crate::root::bisect;

/// Absolute distance in `γ` from `2ρπ` inside which the pure bang is emitted.
pub const DEFAULT_EPS_BANG: f64 = 1e-9;

/// Bracket width at which the `τ` bisection stops.
pub const TAU_XTOL: f64 = 1e-14;

/// Maximum `|Φ(t_j)|` accepted by [`fit_switching_function`].
pub const FIT_TOLERANCE: f64 = 1e-8;

/// Branch of the synthesis containing a given `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Branch {
    pub rho: u32,
    pub is_exact_bang: bool,
}

/// Smallest `ρ ≥ 1` with `γ ≤ 2ρπ`, and whether `γ` sits on a bang corner.
///
/// A `γ` within `eps` of some `2kπ` (either side) is snapped to branch `k`
/// with `is_exact_bang = true`, so lower boundaries belong to the previous
/// branch's bang case.
pub fn branch_index(gamma: f64, eps: f64) -> Result<Branch> {
    require_finite("gamma", gamma)?;
    if gamma <= 0.0 {
        return Err(Error::Domain(format!("gamma must be > 0, got {gamma}")));
    }
    let nearest = (gamma / TAU).round();
    if nearest >= 1.0 && (gamma - nearest * TAU).abs() <= eps {
        return Ok(Branch {
            rho: nearest as u32,
            is_exact_bang: true,
        });
    }
    let rho = (gamma / TAU).ceil().max(1.0);
    Ok(Branch {
        rho: rho as u32,
        is_exact_bang: false,
    })
}

/// The monotone function whose zero on `(0, π)` fixes the boundary arcs.
pub fn f_rho(tau: f64, gamma: f64, rho: u32) -> f64 {
    let r = f64::from(rho);
    let k = 2.0 * r - 1.0;
    (2.0 * tau + 2.0 * (r - 1.0) * PI - gamma) / k - 2.0 * (tau.sin() / (2.0 * r - tau.cos())).atan()
}

fn check_open_branch(gamma: f64, rho: u32) -> Result<()> {
    require_finite("gamma", gamma)?;
    if rho == 0 {
        return Err(Error::Domain("rho must be >= 1".into()));
    }
    let lo = f64::from(rho - 1) * TAU;
    let hi = f64::from(rho) * TAU;
    if !(gamma > lo && gamma < hi) {
        return Err(Error::Domain(format!(
            "gamma = {gamma} outside the open branch ({lo}, {hi}) of rho = {rho}"
        )));
    }
    Ok(())
}

/// Boundary arc duration `τ ∈ (0, π)` by bisection on `f_ρ`.
pub fn solve_tau(gamma: f64, rho: u32) -> Result<f64> {
    check_open_branch(gamma, rho)?;
    bisect(|t| f_rho(t, gamma, rho), 0.0, PI, TAU_XTOL)
}

/// Root in `(π, 2π)` of `f_1(τ) - 2π`, the slower two-switch extremal that
/// also reaches the target when `0 < γ < 2π`. Its transfer time is `4τ - γ`.
pub fn slow_branch_tau(gamma: f64) -> Result<f64> {
    check_open_branch(gamma, 1)?;
    bisect(|t| f_rho(t, gamma, 1) - TAU, PI, TAU, TAU_XTOL)
}

/// Optimal schedule together with its branch data.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    /// Requested displacement; negative when the schedule was mirrored.
    pub gamma: f64,
    pub rho: u32,
    /// Duration of the first and last arcs (`π` for a pure bang).
    pub tau: f64,
    pub schedule: Schedule,
    pub total_time: f64,
}

impl SynthesisResult {
    pub fn switch_times(&self) -> Vec<f64> {
        self.schedule.switch_times()
    }

    pub fn switch_count(&self) -> usize {
        self.schedule.switch_count()
    }

    pub fn is_bang(&self) -> bool {
        self.schedule.len() == 1
    }
}

#[derive(Serialize)]
struct SynthesisRecord<'a> {
    gamma: f64,
    rho: u32,
    tau: f64,
    initial_sign: Sign,
    durations: &'a [f64],
    total_time: f64,
    switch_times: Vec<f64>,
}

impl Serialize for SynthesisResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SynthesisRecord {
            gamma: self.gamma,
            rho: self.rho,
            tau: self.tau,
            initial_sign: self.schedule.initial_sign(),
            durations: self.schedule.durations(),
            total_time: self.total_time,
            switch_times: self.switch_times(),
        }
        .serialize(s)
    }
}

/// Minimum-time schedule for `γ > 0` with the default bang tolerance.
pub fn build_schedule(gamma: f64) -> Result<SynthesisResult> {
    build_schedule_with_eps(gamma, DEFAULT_EPS_BANG)
}

pub fn build_schedule_with_eps(gamma: f64, eps: f64) -> Result<SynthesisResult> {
    let branch = branch_index(gamma, eps)?;
    let rho = branch.rho;
    if branch.is_exact_bang {
        let t = f64::from(rho) * TAU;
        return Ok(SynthesisResult {
            gamma,
            rho,
            tau: PI,
            schedule: Schedule::bang(Sign::Plus, t)?,
            total_time: t,
        });
    }

    let tau = solve_tau(gamma, rho)?;
    let r = f64::from(rho);
    let k = 2.0 * r - 1.0;
    let even = (2.0 * tau + 2.0 * (r - 1.0) * PI - gamma) / k;
    let odd = TAU - even;

    let n = 2 * rho as usize + 1;
    let mut durations = Vec::with_capacity(n);
    durations.push(tau);
    for j in 2..n {
        durations.push(if j % 2 == 0 { even } else { odd });
    }
    durations.push(tau);

    let schedule = Schedule::new(Sign::Plus, durations).map_err(|e| {
        Error::Domain(format!(
            "gamma = {gamma} too close to a bang corner for eps = {eps}: {e}"
        ))
    })?;
    Ok(SynthesisResult {
        gamma,
        rho,
        tau,
        schedule,
        total_time: (4.0 * r * (tau + (r - 1.0) * PI) - gamma) / k,
    })
}

/// Synthesis for either direction: `γ < 0` mirrors the `|γ|` schedule.
pub fn build_schedule_signed(gamma: f64, eps: f64) -> Result<SynthesisResult> {
    require_finite("gamma", gamma)?;
    if gamma >= 0.0 {
        return build_schedule_with_eps(gamma, eps);
    }
    let mut result = build_schedule_with_eps(-gamma, eps)?;
    result.schedule = result.schedule.negated();
    result.gamma = gamma;
    Ok(result)
}

/// Minimum transfer time `T(γ)`.
pub fn minimum_time(gamma: f64) -> Result<f64> {
    Ok(build_schedule(gamma)?.total_time)
}

/// `T(γ̄ + 2(ρ-1)π) - 2(ρ-1)π`, the branch-ρ curve shifted onto `[0, 2π]`.
pub fn shifted_minimum_time(gamma_bar: f64, rho: u32) -> Result<f64> {
    if rho == 0 {
        return Err(Error::Domain("rho must be >= 1".into()));
    }
    let offset = f64::from(rho - 1) * TAU;
    Ok(minimum_time(gamma_bar + offset)? - offset)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub rho: u32,
    pub tau: f64,
    pub total_time: f64,
}

/// `T(γ)` on `count` uniformly spaced points of `[gamma_min, gamma_max]`.
pub fn sweep(gamma_min: f64, gamma_max: f64, count: usize) -> Result<Vec<SweepRow>> {
    require_finite("gamma_min", gamma_min)?;
    require_finite("gamma_max", gamma_max)?;
    if !(gamma_min > 0.0 && gamma_min < gamma_max) {
        return Err(Error::Domain(format!(
            "sweep needs 0 < gamma_min < gamma_max, got [{gamma_min}, {gamma_max}]"
        )));
    }
    if count < 2 {
        return Err(Error::Domain(format!("sweep needs count >= 2, got {count}")));
    }
    let step = (gamma_max - gamma_min) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            let gamma = if i + 1 == count {
                gamma_max
            } else {
                gamma_min + i as f64 * step
            };
            let r = build_schedule(gamma)?;
            Ok(SweepRow {
                gamma,
                rho: r.rho,
                tau: r.tau,
                total_time: r.total_time,
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(mut w: W, rows: &[SweepRow]) -> io::Result<()> {
    writeln!(w, "gamma,rho,tau,total_time")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.gamma, r.rho, r.tau, r.total_time)?;
    }
    Ok(())
}

/// Shifted minimum time in the limit of many switchings: `2τ` with
/// `τ - sin τ = γ̄/2`, `τ ∈ [0, π]`.
pub fn limit_curve(gamma_bar: f64) -> Result<f64> {
    require_finite("gamma_bar", gamma_bar)?;
    if !(0.0..=TAU).contains(&gamma_bar) {
        return Err(Error::Domain(format!(
            "gamma_bar must lie in [0, 2π], got {gamma_bar}"
        )));
    }
    let g = |t: f64| t - t.sin() - 0.5 * gamma_bar;
    if g(0.0) >= 0.0 {
        return Ok(0.0);
    }
    if g(PI) <= 0.0 {
        return Ok(TAU);
    }
    Ok(2.0 * bisect(g, 0.0, PI, TAU_XTOL)?)
}

/// Switching function `Φ(t) = c - A·sin(t + θ)` with `A = 1`, fitted to a
/// bang-bang schedule. The costate follows as
/// `λ = (A sin(t+θ), A cos(t+θ), Φ(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SwitchingFit {
    pub c: f64,
    pub amplitude: f64,
    /// Phase in `[0, 2π)`.
    pub theta: f64,
    /// `max_j |Φ(t_j)|` over all switching times.
    pub residual: f64,
}

impl SwitchingFit {
    pub fn evaluate(&self, t: f64) -> f64 {
        self.c - self.amplitude * (t + self.theta).sin()
    }

    pub fn costate(&self, t: f64) -> [f64; 3] {
        let (s, c) = (t + self.theta).sin_cos();
        [self.amplitude * s, self.amplitude * c, self.evaluate(t)]
    }

    /// Zeros of `Φ` in the open interval `(a, b)`.
    fn zeros_in(&self, a: f64, b: f64) -> Vec<f64> {
        let ratio = self.c / self.amplitude;
        if ratio.abs() > 1.0 {
            return Vec::new();
        }
        let base = ratio.asin();
        let mut out = Vec::new();
        for phase in [base, PI - base] {
            // t = phase - θ + 2kπ
            let first = phase - self.theta;
            let mut k = ((a - first) / TAU).floor();
            loop {
                let t = first + k * TAU;
                if t >= b {
                    break;
                }
                if t > a {
                    out.push(t);
                }
                k += 1.0;
            }
        }
        out
    }
}

/// Fits one sinusoidal switching function through the first two switching
/// times and checks that it vanishes at every other switch and has the sign
/// of the control on every arc.
pub fn fit_switching_function(schedule: &Schedule) -> Result<SwitchingFit> {
    let switches = schedule.switch_times();
    if switches.len() < 2 {
        return Err(Error::Structural(format!(
            "switching fit needs at least two switchings, got {}",
            switches.len()
        )));
    }
    let (t1, t2) = (switches[0], switches[1]);
    // sin(t1+θ) = sin(t2+θ) with cos(t1+θ) > 0 when Φ falls through zero at t1.
    let mut theta = 0.5 * (PI - t1 - t2);
    if schedule.initial_sign() == Sign::Minus {
        theta += PI;
    }
    let theta = theta.rem_euclid(TAU);
    let c = (t1 + theta).sin();
    let mut fit = SwitchingFit {
        c,
        amplitude: 1.0,
        theta,
        residual: 0.0,
    };
    fit.residual = switches
        .iter()
        .map(|&t| fit.evaluate(t).abs())
        .fold(0.0, f64::max);
    if fit.residual > FIT_TOLERANCE {
        return Err(Error::NotExtremal(format!(
            "switching function misses a switch by {:e}",
            fit.residual
        )));
    }

    // Zeros closer than this to an arc boundary are attributed to the switch.
    const EDGE: f64 = 1e-6;
    let bounds = schedule.boundaries();
    for (k, seg) in schedule.segments().enumerate() {
        let (a, b) = (bounds[k], bounds[k + 1]);
        let mid = fit.evaluate(0.5 * (a + b));
        if mid * seg.u.value() <= 0.0 {
            return Err(Error::NotExtremal(format!(
                "Φ has the wrong sign on arc {} (Φ(mid) = {mid:e}, u = {})",
                k + 1,
                seg.u
            )));
        }
        if let Some(z) = fit.zeros_in(a + EDGE, b - EDGE).first() {
            return Err(Error::NotExtremal(format!(
                "Φ changes sign at t = {z} inside arc {}",
                k + 1
            )));
        }
    }
    Ok(fit)
}
