use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::{GridSpec, MIN_CENTER_CLEARANCE};
use super::wave::WaveState;
use crate::error::{require_finite, require_positive, Error, Result};
use crate::model::{boundary_states, sample_trajectory, Schedule};

/// Spacing of the classical samples used for the boundary-proximity check.
const CLEARANCE_SAMPLE_STEP: f64 = 1e-2;

/// Trap centre `s(t) = V·x3(t)`: piecewise linear with slope `±V`.
pub fn trap_path(schedule: &Schedule, vmax: f64, t: f64) -> Result<f64> {
    require_positive("vmax", vmax)?;
    require_finite("t", t)?;
    let bounds = schedule.boundaries();
    let t_end = *bounds.last().unwrap_or(&0.0);
    if !(0.0..=t_end).contains(&t) {
        return Err(Error::Domain(format!("t = {t} outside [0, {t_end}]")));
    }
    let mut s = 0.0;
    for (k, seg) in schedule.segments().enumerate() {
        let dt = (t - bounds[k]).clamp(0.0, seg.duration);
        s += seg.u.value() * dt;
        if t <= bounds[k + 1] {
            break;
        }
    }
    Ok(vmax * s)
}

/// Piece of trap motion with constant velocity `v` lasting `duration`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapMove {
    pub velocity: f64,
    pub duration: f64,
}

/// Symmetric split-step propagator for `H = p²/2 + (x - s(t))²/2`.
pub struct SplitStep {
    grid: GridSpec,
    x: Vec<f64>,
    k2: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl SplitStep {
    pub fn new(grid: &GridSpec) -> Result<Self> {
        grid.validate()?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.n_points);
        let inverse = planner.plan_fft_inverse(grid.n_points);
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Ok(Self {
            grid: *grid,
            x: grid.positions(),
            k2: grid.wavenumbers().iter().map(|k| k * k).collect(),
            forward,
            inverse,
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        })
    }

    /// Runs `moves` back to back starting with the trap at `s0`.
    ///
    /// Each move is cut into `ceil(duration/dt)` equal steps so that no step
    /// straddles a change of velocity. `observer` sees the state after every
    /// step.
    pub fn run<F>(&mut self, psi: &mut WaveState, s0: f64, moves: &[TrapMove], mut observer: F)
    where
        F: FnMut(&WaveState),
    {
        let n = self.grid.n_points as f64;
        let mut s = s0;
        for m in moves {
            if m.duration <= 0.0 {
                continue;
            }
            let steps = (m.duration / self.grid.dt).ceil().max(1.0) as usize;
            let h = m.duration / steps as f64;
            let kinetic: Vec<Complex64> = self
                .k2
                .iter()
                .map(|k2| Complex64::from_polar(1.0 / n, -0.5 * k2 * h))
                .collect();
            let t0 = psi.time;
            for j in 0..steps {
                let s_mid = s + m.velocity * (j as f64 + 0.5) * h;
                self.half_potential(psi, s_mid, h);
                self.forward.process_with_scratch(&mut psi.samples, &mut self.scratch);
                for (z, f) in psi.samples.iter_mut().zip(&kinetic) {
                    *z *= f;
                }
                self.inverse.process_with_scratch(&mut psi.samples, &mut self.scratch);
                self.half_potential(psi, s_mid, h);
                psi.time = t0 + (j + 1) as f64 * h;
                observer(psi);
            }
            psi.time = t0 + m.duration;
            s += m.velocity * m.duration;
        }
    }

    fn half_potential(&self, psi: &mut WaveState, s: f64, h: f64) {
        for (z, x) in psi.samples.iter_mut().zip(&self.x) {
            let d = x - s;
            *z *= Complex64::from_polar(1.0, -0.25 * d * d * h);
        }
    }
}

fn schedule_moves(schedule: &Schedule, vmax: f64) -> Vec<TrapMove> {
    schedule
        .segments()
        .map(|seg| TrapMove {
            velocity: vmax * seg.u.value(),
            duration: seg.duration,
        })
        .collect()
}

/// Fails if the classical centre `a = V·x1` comes within
/// [`MIN_CENTER_CLEARANCE`] of either grid boundary.
pub fn check_clearance(schedule: &Schedule, vmax: f64, grid: &GridSpec) -> Result<()> {
    let samples = sample_trajectory(schedule, CLEARANCE_SAMPLE_STEP)?;
    let centres = samples
        .iter()
        .map(|s| s.state.x1)
        .chain(boundary_states(schedule).into_iter().map(|s| s.x1))
        .map(|x1| vmax * x1);
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for a in centres {
        lo = lo.min(a);
        hi = hi.max(a);
    }
    if lo - grid.x_min < MIN_CENTER_CLEARANCE || grid.x_max - hi < MIN_CENTER_CLEARANCE {
        return Err(Error::Grid(format!(
            "packet centre spans [{lo:.3}, {hi:.3}], closer than {MIN_CENTER_CLEARANCE} to [{}, {}]",
            grid.x_min, grid.x_max
        )));
    }
    Ok(())
}

/// Evolves `psi0` while the trap follows `s(t) = V·x3(t)` for `schedule`.
pub fn evolve(psi0: &WaveState, schedule: &Schedule, vmax: f64) -> Result<WaveState> {
    evolve_observed(psi0, schedule, vmax, |_| {})
}

pub fn evolve_observed<F>(
    psi0: &WaveState,
    schedule: &Schedule,
    vmax: f64,
    observer: F,
) -> Result<WaveState>
where
    F: FnMut(&WaveState),
{
    require_positive("vmax", vmax)?;
    check_clearance(schedule, vmax, &psi0.grid)?;
    let mut stepper = SplitStep::new(&psi0.grid)?;
    let mut psi = psi0.clone();
    stepper.run(&mut psi, 0.0, &schedule_moves(schedule, vmax), observer);
    Ok(psi)
}

/// Evolves `psi0` in a trap held at the origin.
pub fn evolve_static(psi0: &WaveState, duration: f64) -> Result<WaveState> {
    require_finite("duration", duration)?;
    if duration < 0.0 {
        return Err(Error::Domain(format!("duration must be >= 0, got {duration}")));
    }
    let mut stepper = SplitStep::new(&psi0.grid)?;
    let mut psi = psi0.clone();
    let moves = [TrapMove {
        velocity: 0.0,
        duration,
    }];
    stepper.run(&mut psi, 0.0, &moves, |_| {});
    Ok(psi)
}
