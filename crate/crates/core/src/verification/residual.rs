use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Schedule, Sign};

/// Magnitudes of the two terminal conditions for `(γ, 0, γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndpointResidual {
    /// `|-e^{iT} + 2 Σ_j (-1)^{j-1} e^{i(T - t_j)} + 1|`
    pub complex: f64,
    /// `|Σ_k (-1)^{k-1} τ_k - γ|`
    pub x3: f64,
}

impl EndpointResidual {
    pub fn max(&self) -> f64 {
        self.complex.max(self.x3)
    }
}

/// Terminal-condition residuals of an odd-length schedule starting at `+1`.
pub fn endpoint_residual(schedule: &Schedule, gamma: f64) -> Result<EndpointResidual> {
    if schedule.is_empty() || schedule.len().is_multiple_of(2) {
        return Err(Error::Structural(format!(
            "residual needs an odd number of segments, got {}",
            schedule.len()
        )));
    }
    if schedule.initial_sign() != Sign::Plus {
        return Err(Error::Structural(
            "residual is defined for schedules starting with u = +1".into(),
        ));
    }
    let b = schedule.boundaries();
    let t_end = b[b.len() - 1];
    let mut z = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, t_end);
    for (j, &tj) in b[1..b.len() - 1].iter().enumerate() {
        let sign = if j % 2 == 0 { 2.0 } else { -2.0 };
        z += sign * Complex64::from_polar(1.0, t_end - tj);
    }
    Ok(EndpointResidual {
        complex: z.norm(),
        x3: (schedule.signed_sum() - gamma).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthesis::build_schedule;
    use std::f64::consts::PI;

    #[test]
    fn synthesized_schedule_has_zero_residual() {
        let r = build_schedule(PI).unwrap();
        let res = endpoint_residual(&r.schedule, PI).unwrap();
        assert!(res.complex < 1e-9 && res.x3 < 1e-9, "{res:?}");
    }

    #[test]
    fn full_bang_residual() {
        let s = Schedule::bang(Sign::Plus, 2.0 * PI).unwrap();
        let res = endpoint_residual(&s, 2.0 * PI).unwrap();
        assert!(res.complex < 1e-15);
        assert_eq!(res.x3, 0.0);
    }

    #[test]
    fn perturbation_is_detected() {
        let r = build_schedule(PI).unwrap();
        let mut d = r.schedule.durations().to_vec();
        d[1] += 0.1;
        let s = Schedule::new(Sign::Plus, d).unwrap();
        let res = endpoint_residual(&s, PI).unwrap();
        assert!(res.complex > 1e-2, "{res:?}");
    }

    #[test]
    fn even_segment_count_is_structural_error() {
        let s = Schedule::new(Sign::Plus, vec![1.0, 1.0]).unwrap();
        assert!(matches!(endpoint_residual(&s, 1.0), Err(Error::Structural(_))));
        let s = Schedule::new(Sign::Minus, vec![1.0]).unwrap();
        assert!(matches!(endpoint_residual(&s, 1.0), Err(Error::Structural(_))));
    }
}
