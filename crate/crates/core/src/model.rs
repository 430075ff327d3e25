//! Dimensionless transport model.
//!
//! With `x1 = (ω/V)·a`, `x2 = ȧ/V`, `x3 = (ω/V)·s`, `u = v/V` and time
//! measured in units of `1/ω`, the oscillator center `a` and the trap
//! position `s` obey the linear system
//!
//! ```text
//! x1' = x2
//! x2' = x3 - x1
//! x3' = u,        |u| <= 1
//! ```
//!
//! Under constant control the shifted coordinates `y = (x1 - x3, x2 - u)`
//! rotate clockwise at unit angular speed, so every constant-control arc is
//! a trochoid traced by a unit circle rolling on `x2 = 0`. Propagation here
//! uses that rotation directly and is exact up to rounding.

use std::f64::consts::TAU;
use std::fmt;
use std::io::{self, Write};
use std::ops::{Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{require_finite, require_positive, Error, Result};

/// Physical description of a transport task, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Trap angular frequency ω (rad/s).
    pub omega: f64,
    /// Particle mass (kg).
    pub mass: f64,
    /// Reduced Planck constant (J·s).
    pub hbar: f64,
    /// Displacement d of the trap (m).
    pub distance: f64,
    /// Maximum trap speed V (m/s).
    pub vmax: f64,
}

impl PhysicalParams {
    pub fn new(omega: f64, mass: f64, hbar: f64, distance: f64, vmax: f64) -> Result<Self> {
        let params = Self {
            omega,
            mass,
            hbar,
            distance,
            vmax,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("omega", self.omega)?;
        require_positive("mass", self.mass)?;
        require_positive("hbar", self.hbar)?;
        require_positive("distance", self.distance)?;
        require_positive("vmax", self.vmax)?;
        let g = self.omega * self.distance / self.vmax;
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("ω·d/V = {g} is not a finite positive number"),
            });
        }
        Ok(())
    }

    /// Oscillator length `sqrt(ħ / (m ω))` in meters.
    pub fn oscillator_length(&self) -> f64 {
        (self.hbar / (self.mass * self.omega)).sqrt()
    }

    /// Maps physical `(a, ȧ, s)` to the dimensionless state.
    pub fn to_state(&self, a: f64, a_dot: f64, s: f64) -> State {
        let k = self.omega / self.vmax;
        State::new(k * a, a_dot / self.vmax, k * s)
    }

    /// Inverse of [`PhysicalParams::to_state`]: returns `(a, ȧ, s)`.
    pub fn from_state(&self, state: &State) -> (f64, f64, f64) {
        let k = self.vmax / self.omega;
        (k * state.x1, state.x2 * self.vmax, k * state.x3)
    }
}

/// Dimensionless displacement `γ = ω d / V`.
pub fn gamma(params: &PhysicalParams) -> Result<f64> {
    params.validate()?;
    Ok(params.omega * params.distance / params.vmax)
}

/// Converts a dimensionless time `ω t` back to seconds.
pub fn to_physical_time(params: &PhysicalParams, t: f64) -> Result<f64> {
    require_positive("omega", params.omega)?;
    require_finite("t", t)?;
    if t < 0.0 {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    Ok(t / params.omega)
}

/// Extreme value of the normalized trap velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn from_i8(v: i8) -> Result<Sign> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::InvalidParameter {
                name: "initial_sign",
                reason: format!("must be +1 or -1, got {other}"),
            }),
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        self.flip()
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.as_i8())
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i8::deserialize(d)?;
        Sign::from_i8(v).map_err(serde::de::Error::custom)
    }
}

/// Point `(x1, x2, x3)` of the dimensionless system.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct State {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl State {
    pub const ORIGIN: State = State {
        x1: 0.0,
        x2: 0.0,
        x3: 0.0,
    };

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    /// Transport target `(γ, 0, γ)`.
    pub const fn target(gamma: f64) -> Self {
        Self::new(gamma, 0.0, gamma)
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    pub fn norm(&self) -> f64 {
        (self.x1 * self.x1 + self.x2 * self.x2 + self.x3 * self.x3).sqrt()
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(&self, other: &State) -> f64 {
        (self.x1 - other.x1)
            .abs()
            .max((self.x2 - other.x2).abs())
            .max((self.x3 - other.x3).abs())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }
}

impl Neg for State {
    type Output = State;
    fn neg(self) -> State {
        State::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Sub for State {
    type Output = State;
    fn sub(self, rhs: State) -> State {
        State::new(self.x1 - rhs.x1, self.x2 - rhs.x2, self.x3 - rhs.x3)
    }
}

/// One constant-control arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlSegment {
    pub u: Sign,
    pub duration: f64,
}

/// Alternating bang control: `initial_sign` on the first segment, then the
/// sign flips at every boundary. Durations are stored; absolute switch times
/// are derived by prefix sums.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    initial_sign: Sign,
    durations: Vec<f64>,
}

impl Schedule {
    /// Builds a schedule, rejecting non-finite or non-positive durations.
    /// With two or more segments every duration must also be below 2π.
    pub fn new(initial_sign: Sign, durations: Vec<f64>) -> Result<Self> {
        for &d in &durations {
            require_positive("duration", d)?;
        }
        if durations.len() > 1 {
            if let Some(&d) = durations.iter().find(|&&d| d >= TAU) {
                return Err(Error::InvalidParameter {
                    name: "duration",
                    reason: format!("multi-segment durations must be < 2π, got {d}"),
                });
            }
        }
        Ok(Self {
            initial_sign,
            durations,
        })
    }

    pub(crate) fn new_unchecked(initial_sign: Sign, durations: Vec<f64>) -> Self {
        Self {
            initial_sign,
            durations,
        }
    }

    pub fn empty() -> Self {
        Self::new_unchecked(Sign::Plus, Vec::new())
    }

    /// Single constant-control segment of any positive length.
    pub fn bang(sign: Sign, duration: f64) -> Result<Self> {
        Self::new(sign, vec![duration])
    }

    pub fn initial_sign(&self) -> Sign {
        self.initial_sign
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    pub fn len(&self) -> usize {
        self.durations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.durations.is_empty()
    }

    pub fn switch_count(&self) -> usize {
        self.durations.len().saturating_sub(1)
    }

    /// Control of segment `k` (zero-based).
    pub fn control(&self, k: usize) -> Sign {
        if k.is_multiple_of(2) {
            self.initial_sign
        } else {
            self.initial_sign.flip()
        }
    }

    pub fn segments(&self) -> impl Iterator<Item = ControlSegment> + '_ {
        self.durations
            .iter()
            .enumerate()
            .map(|(k, &duration)| ControlSegment {
                u: self.control(k),
                duration,
            })
    }

    pub fn total_time(&self) -> f64 {
        self.durations.iter().sum()
    }

    /// `Σ ± τ_k` with the schedule's alternating signs; equals the final `x3`.
    pub fn signed_sum(&self) -> f64 {
        self.segments().map(|s| s.u.value() * s.duration).sum()
    }

    /// Segment boundaries `t_0 = 0, t_1, …, t_n = T`.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut t = 0.0;
        let mut out = Vec::with_capacity(self.durations.len() + 1);
        out.push(0.0);
        for &d in &self.durations {
            t += d;
            out.push(t);
        }
        out
    }

    /// Interior switching instants `t_1, …, t_{n-1}`.
    pub fn switch_times(&self) -> Vec<f64> {
        let b = self.boundaries();
        if b.len() <= 2 {
            return Vec::new();
        }
        b[1..b.len() - 1].to_vec()
    }

    /// The same durations with every control reversed.
    pub fn negated(&self) -> Schedule {
        Schedule::new_unchecked(self.initial_sign.flip(), self.durations.clone())
    }

    /// Control active at time `t`; the later segment wins at a switch.
    pub fn control_at(&self, t: f64) -> Option<Sign> {
        let mut end = 0.0;
        for (k, &d) in self.durations.iter().enumerate() {
            end += d;
            if t < end {
                return Some(self.control(k));
            }
        }
        self.durations.len().checked_sub(1).map(|k| self.control(k))
    }
}

/// JSON form of a schedule.
#[derive(Serialize, Deserialize)]
struct ScheduleRecord {
    initial_sign: Sign,
    durations: Vec<f64>,
    #[serde(default, skip_deserializing)]
    gamma: f64,
    #[serde(default, skip_deserializing)]
    total_time: f64,
}

impl Serialize for Schedule {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScheduleRecord {
            initial_sign: self.initial_sign,
            durations: self.durations.clone(),
            gamma: self.signed_sum(),
            total_time: self.total_time(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Schedule {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = ScheduleRecord::deserialize(d)?;
        Schedule::new(rec.initial_sign, rec.durations).map_err(serde::de::Error::custom)
    }
}

/// Closed-form step used by every propagation path. No argument checks.
#[inline]
pub(crate) fn advance(start: State, u: f64, dt: f64) -> State {
    let (s, c) = dt.sin_cos();
    let y1 = start.x1 - start.x3;
    let y2 = start.x2 - u;
    let x3 = start.x3 + u * dt;
    State {
        x1: (c * y1 + s * y2) + x3,
        x2: (-s * y1 + c * y2) + u,
        x3,
    }
}

/// Exact evolution over `dt` under constant control `u`.
pub fn propagate_const(start: State, u: Sign, dt: f64) -> Result<State> {
    if !start.is_finite() {
        return Err(Error::NonFinite("start"));
    }
    require_finite("dt", dt)?;
    if dt < 0.0 {
        return Err(Error::Domain(format!("dt must be >= 0, got {dt}")));
    }
    if dt == 0.0 {
        return Ok(start);
    }
    Ok(advance(start, u.value(), dt))
}

/// Endpoint reached from the origin by composing per-segment rotations.
pub fn propagate_schedule(schedule: &Schedule) -> State {
    schedule
        .segments()
        .fold(State::ORIGIN, |x, seg| advance(x, seg.u.value(), seg.duration))
}

/// States at every segment boundary, starting with the origin.
pub fn boundary_states(schedule: &Schedule) -> Vec<State> {
    let mut out = Vec::with_capacity(schedule.len() + 1);
    let mut x = State::ORIGIN;
    out.push(x);
    for seg in schedule.segments() {
        x = advance(x, seg.u.value(), seg.duration);
        out.push(x);
    }
    out
}

/// Endpoint from the explicit alternating trig sums
///
/// ```text
/// x1 - x3      = -sin T + 2 Σ_j (-1)^{j-1} sin(T - t_j)
/// x2 - (-1)^{n-1} = -cos T + 2 Σ_j (-1)^{j-1} cos(T - t_j)
/// x3           = Σ_k (-1)^{k-1} τ_k
/// ```
///
/// scaled by the initial sign. Kept separate from [`propagate_schedule`] as
/// an independent cross-check.
pub fn trig_sum_endpoint(schedule: &Schedule) -> State {
    let n = schedule.len();
    if n == 0 {
        return State::ORIGIN;
    }
    let b = schedule.boundaries();
    let t_end = b[n];
    let mut y1 = -t_end.sin();
    let mut y2 = -t_end.cos();
    let mut x3 = 0.0;
    for (j, &tj) in b.iter().enumerate().take(n).skip(1) {
        let sign = if j % 2 == 1 { 2.0 } else { -2.0 };
        let (s, c) = (t_end - tj).sin_cos();
        y1 += sign * s;
        y2 += sign * c;
    }
    for (k, &tau) in schedule.durations().iter().enumerate() {
        if k % 2 == 0 {
            x3 += tau;
        } else {
            x3 -= tau;
        }
    }
    let last_u = if n % 2 == 1 { 1.0 } else { -1.0 };
    let sigma = schedule.initial_sign().value();
    State::new(sigma * (y1 + x3), sigma * (y2 + last_u), sigma * x3)
}

/// `y1² + y2²` for the rolling-circle coordinates under control `u`.
pub fn trochoid_radius_sq(state: &State, u: Sign) -> f64 {
    let y1 = state.x1 - state.x3;
    let y2 = state.x2 - u.value();
    y1 * y1 + y2 * y2
}

/// One row of a sampled trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: State,
    /// Active control: ±1, or 0 for an empty schedule.
    pub u: i8,
}

/// Samples the trajectory at `0, dt, 2dt, …` and always at `T`.
///
/// Each sample restarts the closed form from the boundary state of the
/// segment that contains it.
pub fn sample_trajectory(schedule: &Schedule, dt_sample: f64) -> Result<Vec<TrajectorySample>> {
    require_positive("dt_sample", dt_sample)?;
    let bounds = schedule.boundaries();
    let states = boundary_states(schedule);
    let t_end = *bounds.last().unwrap_or(&0.0);

    let sample_at = |t: f64, seg: usize| -> TrajectorySample {
        if schedule.is_empty() {
            return TrajectorySample {
                t,
                state: State::ORIGIN,
                u: 0,
            };
        }
        let u = schedule.control(seg);
        TrajectorySample {
            t,
            state: advance(states[seg], u.value(), t - bounds[seg]),
            u: u.as_i8(),
        }
    };

    let mut out = Vec::new();
    let mut seg = 0;
    let mut k: u64 = 0;
    // Grid points closer than this to T collapse onto the T sample.
    let guard = 1e-12 * t_end.max(1.0);
    loop {
        let t = k as f64 * dt_sample;
        if k > 0 && t >= t_end - guard {
            break;
        }
        while seg + 1 < schedule.len() && t >= bounds[seg + 1] {
            seg += 1;
        }
        out.push(sample_at(t, seg));
        k += 1;
    }
    if t_end > 0.0 {
        let last = schedule.len() - 1;
        let mut sample = sample_at(t_end, last);
        sample.state = states[schedule.len()];
        out.push(sample);
    }
    Ok(out)
}

/// Writes samples as `t,x1,x2,x3,u` CSV with shortest round-trip decimals.
pub fn write_trajectory_csv<W: Write>(mut w: W, samples: &[TrajectorySample]) -> io::Result<()> {
    writeln!(w, "t,x1,x2,x3,u")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{},{},{}",
            s.t, s.state.x1, s.state.x2, s.state.x3, s.u
        )?;
    }
    Ok(())
}
