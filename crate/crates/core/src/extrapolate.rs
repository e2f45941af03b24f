//! Richardson extrapolation to `eps -> 0` on a decreasing schedule, and the
//! schedules themselves.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Extrapolated value with error estimate and the intermediate sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Extrapolated {
    pub value: Complex64,
    pub error: f64,
    /// Raw values at each schedule point.
    pub samples: Vec<Complex64>,
    /// Order-1 Richardson extrapolants from consecutive pairs.
    pub extrapolants: Vec<Complex64>,
}

/// Order-1 Richardson on a decreasing schedule: from consecutive pairs,
/// `R_k = (e_k f_{k+1} - e_{k+1} f_k) / (e_k - e_{k+1})`. The value is the
/// last extrapolant and the error is the gap between the last two.
pub fn richardson(schedule: &[f64], samples: &[Complex64]) -> Result<Extrapolated> {
    richardson_with_noise(schedule, samples, 0.0)
}

/// As [`richardson`], but differences below `noise` (the roundoff level of
/// the samples) never count as divergence.
pub fn richardson_with_noise(
    schedule: &[f64],
    samples: &[Complex64],
    noise: f64,
) -> Result<Extrapolated> {
    validate_schedule(schedule)?;
    if samples.len() != schedule.len() {
        return Err(Error::InvalidParameter(format!(
            "{} samples for {} schedule points",
            samples.len(),
            schedule.len()
        )));
    }
    let extrapolants: Vec<Complex64> = schedule
        .windows(2)
        .zip(samples.windows(2))
        .map(|(e, f)| (f[1] * e[0] - f[0] * e[1]) / (e[0] - e[1]))
        .collect();
    let n = extrapolants.len();
    let value = extrapolants[n - 1];
    let error = if n >= 2 {
        (extrapolants[n - 1] - extrapolants[n - 2]).norm()
    } else {
        (extrapolants[0] - samples[samples.len() - 1]).norm()
    };
    if n >= 3 {
        let last = (extrapolants[n - 1] - extrapolants[n - 2]).norm();
        let prev = (extrapolants[n - 2] - extrapolants[n - 3]).norm();
        let floor = (1e-9 * (1.0 + value.norm())).max(noise);
        if last > floor && last > prev {
            return Err(Error::NonConvergent(format!(
                "extrapolant differences grew from {prev:e} to {last:e}"
            )));
        }
    }
    Ok(Extrapolated {
        value,
        error,
        samples: samples.to_vec(),
        extrapolants,
    })
}

/// Evaluates `f` on the schedule and extrapolates.
pub fn extrapolate(
    schedule: &[f64],
    mut f: impl FnMut(f64) -> Result<Complex64>,
) -> Result<Extrapolated> {
    validate_schedule(schedule)?;
    let samples = schedule.iter().map(|&e| f(e)).collect::<Result<Vec<_>>>()?;
    richardson(schedule, &samples)
}

pub fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.len() < 2 {
        return Err(Error::ScheduleTooShort(schedule.len()));
    }
    if let Some(&bad) = schedule.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(Error::BadEpsilon(bad));
    }
    if schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "epsilon schedule must be strictly decreasing".into(),
        ));
    }
    Ok(())
}

/// `eps0 * 2^-k` for `k = 0..levels`.
pub fn geometric_schedule(eps0: f64, levels: usize) -> Vec<f64> {
    (0..levels).map(|k| eps0 * 0.5f64.powi(k as i32)).collect()
}

/// Halves from `eps0` until the penultimate level reaches `target`, with at
/// least `min_levels` levels and never below `floor`.
pub fn adaptive_schedule(eps0: f64, min_levels: usize, target: f64, floor: f64) -> Vec<f64> {
    let mut out = vec![eps0];
    loop {
        let n = out.len();
        let penultimate_ok = n >= 2 && out[n - 2] <= target;
        if n >= min_levels.max(2) && penultimate_ok {
            break;
        }
        let next = out[n - 1] * 0.5;
        if next < floor {
            if n >= min_levels.max(2) {
                break;
            }
            // Still honour the minimum level count.
        }
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn constant_sequence() {
        let s = geometric_schedule(0.5, 6);
        let r = extrapolate(&s, |_| Ok(Complex64::new(2.0, -1.0))).unwrap();
        assert_eq!(r.value, Complex64::new(2.0, -1.0));
        assert_eq!(r.error, 0.0);
    }

    #[test]
    fn affine_is_exact() {
        let s = geometric_schedule(0.5, 6);
        let r = extrapolate(&s, |e| Ok(c(3.0 + 7.0 * e))).unwrap();
        assert!((r.value.re - 3.0).abs() < 1e-12);
        assert!(r.error < 1e-12);
    }

    #[test]
    fn exponential_convergence_is_tracked() {
        let s = geometric_schedule(0.5, 8);
        let r = extrapolate(&s, |e| Ok(c(1.0 + (-1.0 / e).exp()))).unwrap();
        assert!((r.value.re - 1.0).abs() < 1e-6);
        assert!(r.error < 1e-5);
    }

    #[test]
    fn divergence_is_reported() {
        let s = geometric_schedule(0.5, 6);
        let err = extrapolate(&s, |e| Ok(c(1.0 / (e * e)))).unwrap_err();
        assert!(matches!(err, Error::NonConvergent(_)));
    }

    #[test]
    fn schedule_checks() {
        assert_eq!(validate_schedule(&[0.1]), Err(Error::ScheduleTooShort(1)));
        assert!(validate_schedule(&[0.1, 0.2]).is_err());
        assert_eq!(validate_schedule(&[0.1, -0.2]), Err(Error::BadEpsilon(-0.2)));
    }

    #[test]
    fn adaptive_schedule_reaches_target() {
        let s = adaptive_schedule(0.5, 6, 1e-3, 1e-6);
        assert!(s.len() >= 6);
        assert!(s[s.len() - 2] <= 1e-3);
        assert!(s[s.len() - 3] > 1e-3);
        let s = adaptive_schedule(0.5, 6, 1e-9, 1e-4);
        assert!(*s.last().unwrap() >= 1e-4 * 0.5);
        let s = adaptive_schedule(0.5, 6, 10.0, 1e-6);
        assert_eq!(s, geometric_schedule(0.5, 6));
    }
}
