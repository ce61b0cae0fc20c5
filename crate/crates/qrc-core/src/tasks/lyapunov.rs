//! Divergence-rate estimate from a trajectory and its perturbed twin.

use crate::error::CoreError;
use crate::math;
use crate::Result;

/// Window length over which separations are measured.
pub const LYAPUNOV_WINDOW: usize = 17;
/// Offset between the first and last separation measurement.
pub const LYAPUNOV_HORIZON: usize = 500;

/// Largest-exponent estimate lambda = (ln d_H - ln d_0) / H where d_k is the
/// Euclidean distance between the length-`window` slices of the two
/// trajectories starting at offset k.
pub fn lyapunov_estimate(
    reference: &[f64],
    perturbed: &[f64],
    window: usize,
    horizon: usize,
) -> Result<f64> {
    if window == 0 || horizon == 0 {
        return Err(CoreError::Parameter("window and horizon must be positive"));
    }
    let needed = horizon + window;
    if reference.len() < needed || perturbed.len() < needed {
        return Err(CoreError::LengthMismatch {
            what: "trajectory",
            expected: needed,
            actual: reference.len().min(perturbed.len()),
        });
    }
    let sep2 = |k: usize| -> f64 {
        let mut acc = 0.0;
        for i in 0..window {
            let d = reference[k + i] - perturbed[k + i];
            acc += d * d;
        }
        acc
    };
    let d0 = sep2(0);
    let dh = sep2(horizon);
    if d0 == 0.0 {
        return Err(CoreError::UndefinedMeasure(
            "zero initial separation between trajectories",
        ));
    }
    if dh == 0.0 {
        return Err(CoreError::UndefinedMeasure(
            "trajectories coincide at the horizon",
        ));
    }
    // ln d = ln(d^2) / 2, avoiding the intermediate square root.
    Ok((math::ln(dh) - math::ln(d0)) / (2.0 * horizon as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn constant_offset_gives_zero() {
        // Dyadic ramp and offset so the separation is exactly constant.
        let y: Vec<f64> = (0..600).map(|k| (k as f64) * 2f64.powi(-9)).collect();
        let offset = 2f64.powi(-27);
        let shifted: Vec<f64> = y.iter().map(|v| v + offset).collect();
        let lambda = lyapunov_estimate(&y, &shifted, LYAPUNOV_WINDOW, LYAPUNOV_HORIZON).unwrap();
        assert_abs_diff_eq!(lambda, 0.0, epsilon = 1e-12);
        // Same conclusion for a constant trajectory offset by 1e-8.
        let flat = vec![0.37; 600];
        let flat_shift: Vec<f64> = flat.iter().map(|v| v + 1e-8).collect();
        let lambda =
            lyapunov_estimate(&flat, &flat_shift, LYAPUNOV_WINDOW, LYAPUNOV_HORIZON).unwrap();
        assert_abs_diff_eq!(lambda, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn synthetic_exponential_rate_is_recovered() {
        // Separation d_k = d_0 e^{0.003 k} exactly, since every window entry
        // carries the same exponential envelope.
        let len = LYAPUNOV_HORIZON + LYAPUNOV_WINDOW;
        let reference = vec![0.0; len];
        let perturbed: Vec<f64> = (0..len).map(|k| 1e-8 * math::exp(0.003 * k as f64)).collect();
        let lambda =
            lyapunov_estimate(&reference, &perturbed, LYAPUNOV_WINDOW, LYAPUNOV_HORIZON).unwrap();
        assert_abs_diff_eq!(lambda, 0.003, epsilon = 1e-9);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let y = vec![0.5; 600];
        assert!(matches!(
            lyapunov_estimate(&y, &y, LYAPUNOV_WINDOW, LYAPUNOV_HORIZON),
            Err(CoreError::UndefinedMeasure(_))
        ));
        let short = vec![0.5; 100];
        assert!(matches!(
            lyapunov_estimate(&short, &short, LYAPUNOV_WINDOW, LYAPUNOV_HORIZON),
            Err(CoreError::LengthMismatch { .. })
        ));
        assert!(lyapunov_estimate(&y, &y, 0, 10).is_err());
    }
}
