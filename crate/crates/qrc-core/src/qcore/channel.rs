//! Per-qubit dephasing channels and the noise configuration record.

use crate::error::CoreError;
use crate::qcore::density::DensityMatrix;
use crate::Result;
use alloc::vec::Vec;

/// Axis of the per-qubit phase-flip channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DephasingAxis {
    Z,
    X,
}

/// Noise attached to a reservoir: dephasing of the state plus Gaussian
/// observation noise on recorded signals (never on the state itself).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Dephasing rate gamma >= 0.
    pub dephasing_rate: f64,
    pub dephasing_axis: DephasingAxis,
    /// Channel discretization interval; the flip probability per application
    /// is (1 - e^{-2 gamma dt}) / 2.
    pub dephasing_dt: f64,
    /// Standard deviation of the Gaussian observation noise.
    pub observation_sigma: f64,
}

impl NoiseSpec {
    /// No dephasing, no observation noise.
    pub fn none() -> Self {
        NoiseSpec {
            dephasing_rate: 0.0,
            dephasing_axis: DephasingAxis::Z,
            dephasing_dt: 1.0,
            observation_sigma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dephasing_rate >= 0.0) || !self.dephasing_rate.is_finite() {
            return Err(CoreError::Domain {
                what: "dephasing rate",
                value: self.dephasing_rate,
            });
        }
        if !(self.observation_sigma >= 0.0) || !self.observation_sigma.is_finite() {
            return Err(CoreError::Domain {
                what: "observation sigma",
                value: self.observation_sigma,
            });
        }
        if self.dephasing_rate > 0.0 && !(self.dephasing_dt > 0.0) {
            return Err(CoreError::Domain {
                what: "dephasing dt",
                value: self.dephasing_dt,
            });
        }
        Ok(())
    }
}

/// Apply E(rho) = p+ rho + p- P rho P independently on every qubit, with
/// P = Z or X and p- = (1 - e^{-2 gamma dt}) / 2.
pub fn dephase(
    rho: &DensityMatrix,
    gamma: f64,
    dt: f64,
    axis: DephasingAxis,
) -> Result<DensityMatrix> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(CoreError::Domain {
            what: "dephasing rate",
            value: gamma,
        });
    }
    if gamma > 0.0 && !(dt > 0.0) {
        return Err(CoreError::Domain {
            what: "dephasing dt",
            value: dt,
        });
    }
    let mut out = rho.clone();
    dephase_in_place(&mut out, gamma, dt, axis);
    Ok(out)
}

/// In-place channel application; `gamma = 0` is a no-op.
pub(crate) fn dephase_in_place(rho: &mut DensityMatrix, gamma: f64, dt: f64, axis: DephasingAxis) {
    if gamma == 0.0 {
        return;
    }
    let n = rho.n_qubits();
    let d = rho.dim();
    let decay = crate::math::exp(-2.0 * gamma * dt);
    match axis {
        DephasingAxis::Z => {
            // The N per-qubit Z channels compose to elementwise decay by
            // e^{-2 gamma dt} per differing qubit between row and column.
            let mut pow = Vec::with_capacity(n + 1);
            pow.push(1.0);
            for k in 1..=n {
                pow.push(pow[k - 1] * decay);
            }
            let m = rho.matrix_mut();
            for col in 0..d {
                for row in 0..d {
                    let differing = (row ^ col).count_ones() as usize;
                    if differing > 0 {
                        m[(row, col)] *= pow[differing];
                    }
                }
            }
        }
        DephasingAxis::X => {
            let p_minus = (1.0 - decay) / 2.0;
            let p_plus = 1.0 - p_minus;
            let m = rho.matrix_mut();
            for i in 1..=n {
                let mask = 1usize << (n - i);
                // Orbits of (row, col) -> (row^mask, col^mask) have size two;
                // take the representative with the qubit-i row bit clear.
                for col in 0..d {
                    for row in 0..d {
                        if row & mask != 0 {
                            continue;
                        }
                        let row2 = row ^ mask;
                        let col2 = col ^ mask;
                        let a = m[(row, col)];
                        let b = m[(row2, col2)];
                        m[(row, col)] = a * p_plus + b * p_minus;
                        m[(row2, col2)] = b * p_plus + a * p_minus;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::pauli;
    use crate::seed;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;
    use num_complex::Complex64;

    fn plus_state() -> DensityMatrix {
        let h = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        DensityMatrix::pure(1, &[h, h]).unwrap()
    }

    #[test]
    fn zero_rate_is_identity() {
        let rho = plus_state();
        let out = dephase(&rho, 0.0, 1.0, DephasingAxis::Z).unwrap();
        assert_eq!(out.matrix(), rho.matrix());
    }

    #[test]
    fn diagonal_states_are_fixed_points_of_z() {
        let rho = DensityMatrix::basis_state(2, 0b10).unwrap();
        let out = dephase(&rho, 0.8, 0.7, DephasingAxis::Z).unwrap();
        let diff = (out.matrix() - rho.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn plus_state_off_diagonal_decays_in_closed_form() {
        // gamma dt = 0.5: off-diagonal 0.5 e^{-1}.
        let out = dephase(&plus_state(), 0.5, 1.0, DephasingAxis::Z).unwrap();
        assert_abs_diff_eq!(out.matrix()[(0, 1)].re, 0.5 * (-1.0f64).exp(), epsilon = 1e-6);
        assert_abs_diff_eq!(out.purity(), 0.5 * (1.0 + (-2.0f64).exp()), epsilon = 1e-8);
        assert_abs_diff_eq!(out.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn x_axis_fixes_x_eigenstates_and_decays_z() {
        let rho = plus_state();
        let out = dephase(&rho, 0.5, 1.0, DephasingAxis::X).unwrap();
        let diff = (out.matrix() - rho.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        assert!(diff < 1e-12, "|+> is an X-channel fixed point");

        let z0 = DensityMatrix::basis_state(1, 0).unwrap();
        let out = dephase(&z0, 0.5, 1.0, DephasingAxis::X).unwrap();
        assert_abs_diff_eq!(out.expect_z(1).unwrap(), (-1.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn z_channel_matches_explicit_kraus_form() {
        // Compare the popcount fast path against p+ rho + p- Z rho Z applied
        // qubit by qubit with dense operators.
        let mut rng = seed::rng(3, &[seed::tags::INITIAL_STATE]);
        let rho = DensityMatrix::random_product_state(3, &mut rng).unwrap();
        let gamma = 0.3;
        let dt = 0.9;
        let fast = dephase(&rho, gamma, dt, DephasingAxis::Z).unwrap();

        let p_minus = (1.0 - (-2.0f64 * gamma * dt).exp()) / 2.0;
        let p_plus = 1.0 - p_minus;
        let mut slow: DMatrix<Complex64> = rho.matrix().clone();
        for i in 1..=3 {
            let z = pauli::z_op(3, i).unwrap();
            slow = &slow * Complex64::new(p_plus, 0.0)
                + (&z * &slow * &z) * Complex64::new(p_minus, 0.0);
        }
        let diff = (fast.matrix() - slow)
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn channel_is_linear() {
        let mut rng = seed::rng(17, &[seed::tags::INITIAL_STATE]);
        let rho1 = DensityMatrix::random_product_state(2, &mut rng).unwrap();
        let rho2 = DensityMatrix::random_product_state(2, &mut rng).unwrap();
        for &a in &[0.0, 0.25, 0.5, 0.9, 1.0] {
            let mix = DensityMatrix::from_matrix(
                2,
                rho1.matrix() * Complex64::new(a, 0.0)
                    + rho2.matrix() * Complex64::new(1.0 - a, 0.0),
            )
            .unwrap();
            let lhs = dephase(&mix, 0.4, 0.5, DephasingAxis::Z).unwrap();
            let rhs1 = dephase(&rho1, 0.4, 0.5, DephasingAxis::Z).unwrap();
            let rhs2 = dephase(&rho2, 0.4, 0.5, DephasingAxis::Z).unwrap();
            let rhs = rhs1.matrix() * Complex64::new(a, 0.0)
                + rhs2.matrix() * Complex64::new(1.0 - a, 0.0);
            let diff = (lhs.matrix() - rhs)
                .iter()
                .map(|z| z.norm())
                .fold(0.0f64, f64::max);
            assert!(diff < 1e-10, "a={a}");
        }
    }

    #[test]
    fn purity_never_increases() {
        let mut rng = seed::rng(23, &[seed::tags::INITIAL_STATE]);
        for _ in 0..4 {
            let rho = DensityMatrix::random_product_state(3, &mut rng).unwrap();
            let before = rho.purity();
            for axis in [DephasingAxis::Z, DephasingAxis::X] {
                let after = dephase(&rho, 0.6, 0.8, axis).unwrap().purity();
                assert!(after <= before + 1e-10);
            }
        }
    }

    #[test]
    fn noise_spec_validation() {
        assert!(NoiseSpec::none().validate().is_ok());
        let bad = NoiseSpec {
            dephasing_rate: 1.0,
            dephasing_dt: 0.0,
            ..NoiseSpec::none()
        };
        assert!(bad.validate().is_err());
        let bad = NoiseSpec {
            observation_sigma: -1.0,
            ..NoiseSpec::none()
        };
        assert!(bad.validate().is_err());
    }
}
