use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Highest level [`eigenstate`] builds.
pub const MAX_LEVEL: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub samples: Vec<Complex64>,
    pub grid: GridSpec,
    pub time: f64,
}

impl WaveState {
    pub fn norm_sq(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    /// `⟨self|other⟩` on the grid.
    pub fn overlap(&self, other: &WaveState) -> Complex64 {
        let s: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.grid.dx()
    }

    pub fn probability(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn mean_position(&self) -> f64 {
        let dx = self.grid.dx();
        self.samples
            .iter()
            .enumerate()
            .map(|(k, z)| self.grid.x(k) * z.norm_sqr())
            .sum::<f64>()
            * dx
            / self.norm_sq()
    }
}

/// Normalized Hermite functions `ψ_0..=ψ_n` at `x`.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let p0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(p0);
    if n >= 1 {
        out.push(2f64.sqrt() * x * p0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// Oscillator eigenstate `Ψ_n(x - center)`, renormalized on the grid.
pub fn eigenstate(n: usize, grid: &GridSpec, center: f64) -> Result<WaveState> {
    if n > MAX_LEVEL {
        return Err(Error::InvalidParameter {
            name: "level",
            reason: format!("must be <= {MAX_LEVEL}, got {n}"),
        });
    }
    grid.validate()?;
    let samples: Vec<Complex64> = (0..grid.n_points)
        .map(|k| Complex64::new(hermite_functions(n, grid.x(k) - center)[n], 0.0))
        .collect();
    let mut psi = WaveState {
        samples,
        grid: *grid,
        time: 0.0,
    };
    let scale = 1.0 / psi.norm_sq().sqrt();
    psi.samples.iter_mut().for_each(|z| *z *= scale);
    Ok(psi)
}

/// Writes `|ψ|²` as `x,prob` rows.
pub fn write_snapshot_csv<W: Write>(mut w: W, psi: &WaveState) -> io::Result<()> {
    writeln!(w, "x,prob")?;
    for (k, p) in psi.probability().iter().enumerate() {
        writeln!(w, "{},{}", psi.grid.x(k), p)?;
    }
    Ok(())
}
