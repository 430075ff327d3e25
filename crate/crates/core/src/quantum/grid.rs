use serde::Serialize;

use crate::error::{require_finite, require_positive, Error, Result};

/// Margin, in oscillator lengths, required beyond the start and end positions.
pub const MIN_MARGIN: f64 = 8.0;

/// Closest the classical packet centre may come to either boundary.
pub const MIN_CENTER_CLEARANCE: f64 = 6.0;

pub const MIN_POINTS: usize = 256;

pub const MIN_POINTS_PER_LENGTH: f64 = 16.0;

/// Default padding on either side of `[0, d]`.
pub const DEFAULT_PADDING: f64 = 10.0;
pub const DEFAULT_POINTS: usize = 2048;
pub const DEFAULT_DT: f64 = 1e-3;

/// Periodic position grid `x_k = x_min + k·Δx`, `Δx = (x_max - x_min)/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dt: f64,
}

impl GridSpec {
    pub fn new(x_min: f64, x_max: f64, n_points: usize, dt: f64) -> Result<Self> {
        let g = Self {
            x_min,
            x_max,
            n_points,
            dt,
        };
        g.validate()?;
        Ok(g)
    }

    /// `[-10, d + 10]` with 2048 points and `dt = 1e-3`.
    pub fn for_distance(d: f64) -> Result<Self> {
        Self::with_points(d, DEFAULT_POINTS, DEFAULT_DT)
    }

    pub fn with_points(d: f64, n_points: usize, dt: f64) -> Result<Self> {
        require_finite("distance", d)?;
        let g = Self::new(
            d.min(0.0) - DEFAULT_PADDING,
            d.max(0.0) + DEFAULT_PADDING,
            n_points,
            dt,
        )?;
        g.validate_for_distance(d)?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("x_min", self.x_min)?;
        require_finite("x_max", self.x_max)?;
        require_positive("dt", self.dt)?;
        if !(self.x_min < 0.0 && self.x_max > 0.0) {
            return Err(Error::Grid(format!(
                "domain [{}, {}] must contain 0",
                self.x_min, self.x_max
            )));
        }
        if self.n_points < MIN_POINTS || !self.n_points.is_power_of_two() {
            return Err(Error::Grid(format!(
                "n_points must be a power of two >= {MIN_POINTS}, got {}",
                self.n_points
            )));
        }
        let per_length = 1.0 / self.dx();
        if per_length < MIN_POINTS_PER_LENGTH {
            return Err(Error::Resolution(format!(
                "{per_length:.2} points per oscillator length, need {MIN_POINTS_PER_LENGTH}"
            )));
        }
        Ok(())
    }

    /// Checks the margin around both the start (0) and the end (`d`).
    pub fn validate_for_distance(&self, d: f64) -> Result<()> {
        self.validate()?;
        let lo = d.min(0.0) - self.x_min;
        let hi = self.x_max - d.max(0.0);
        if lo < MIN_MARGIN || hi < MIN_MARGIN {
            return Err(Error::Grid(format!(
                "need {MIN_MARGIN} lengths of margin around [0, {d}], have {lo:.3} and {hi:.3}"
            )));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n_points as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        self.x_min + k as f64 * self.dx()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.x(k)).collect()
    }

    /// Angular wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let n = self.n_points;
        let dk = std::f64::consts::TAU / self.length();
        (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                m * dk
            })
            .collect()
    }

    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        Self::new(self.x_min, self.x_max, self.n_points, dt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_valid() {
        let g = GridSpec::for_distance(std::f64::consts::PI).unwrap();
        assert_eq!(g.n_points, 2048);
        assert_eq!(g.x_min, -10.0);
        assert!((g.dx() - g.length() / 2048.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_point_counts() {
        assert!(matches!(GridSpec::new(-10.0, 10.0, 1000, 1e-3), Err(Error::Grid(_))));
        assert!(matches!(GridSpec::new(-10.0, 10.0, 128, 1e-3), Err(Error::Grid(_))));
    }

    #[test]
    fn coarse_grid_is_resolution_error() {
        assert!(matches!(
            GridSpec::new(-100.0, 100.0, 256, 1e-3),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn margin_is_checked() {
        let g = GridSpec::new(-10.0, 12.0, 1024, 1e-3).unwrap();
        assert!(g.validate_for_distance(4.5).is_err());
        assert!(g.validate_for_distance(4.0 - 1e-9).is_ok());
    }

    #[test]
    fn wavenumbers_are_fft_ordered() {
        let g = GridSpec::new(-8.0, 8.0, 256, 1e-3).unwrap();
        let k = g.wavenumbers();
        assert_eq!(k[0], 0.0);
        assert!(k[1] > 0.0 && k[255] < 0.0);
        assert!((k[128] + 128.0 * std::f64::consts::TAU / 16.0).abs() < 1e-12);
    }
}
