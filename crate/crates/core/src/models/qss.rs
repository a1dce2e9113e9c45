use std::f64::consts::TAU;

use super::{divergence_guard, Diagnostics, EstimatorKind, FrequencyEstimator, Tuning};
use crate::ekf::{EstimatorState, StateModel};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::quaternion::Quaternion;
use crate::signal::ThreePhaseFrame;

/// Quaternion model `[φ, q⁺, q⁻] ↦ [φ, q⁺φ, q⁻φ*]`, observing `q⁺ + q⁻`.
///
/// Jacobian entries are right-unit HR derivatives, which is what a
/// left-multiplying matrix–vector product linearises exactly for
/// left-constant terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct QssModel;

impl StateModel<Quaternion> for QssModel {
    fn state_dim(&self) -> usize {
        3
    }
    fn obs_dim(&self) -> usize {
        1
    }
    fn transition(&self, x: &[Quaternion]) -> Vec<Quaternion> {
        vec![x[0], x[1] * x[0], x[2] * x[0].conj()]
    }
    fn transition_jacobian(&self, x: &[Quaternion]) -> Mat<Quaternion> {
        let (phi, qp, qn) = (x[0], x[1], x[2]);
        let zero = Quaternion::ZERO;
        let re = Quaternion::real(phi.r);
        Mat::from_rows(&[
            &[Quaternion::ONE, zero, zero],
            &[qp, re, zero],
            &[qn * -0.5, zero, re],
        ])
    }
    fn observe(&self, x: &[Quaternion]) -> Vec<Quaternion> {
        vec![x[1] + x[2]]
    }
    fn observation_jacobian(&self, _: &[Quaternion]) -> Mat<Quaternion> {
        Mat::from_rows(&[&[Quaternion::ZERO, Quaternion::ONE, Quaternion::ONE]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QssState {
    /// Phase increment `e^{γ2πfΔT}`.
    pub phi: Quaternion,
    pub q_pos: Quaternion,
    pub q_neg: Quaternion,
}

impl QssState {
    /// Rotation axis `Im(φ)/|Im(φ)|`.
    pub fn axis(&self) -> Result<Quaternion> {
        let n = self.phi.im_norm();
        if n == 0.0 {
            return Err(Error::DegenerateAxis);
        }
        Ok(self.phi.im() / n)
    }
}

/// `|Im(ln φ)|/(2πΔT)`, signed by the projection of `Im(ln φ)` onto
/// `gamma_ref` when one is given.
pub fn qss_frequency(phi: Quaternion, dt: f64, gamma_ref: Option<Quaternion>) -> Result<f64> {
    let v = phi.im_norm();
    if v == 0.0 {
        return Err(Error::DegenerateAxis);
    }
    let f = v.atan2(phi.r) / (TAU * dt);
    Ok(match gamma_ref {
        Some(g) if phi.dot_im(g) < 0.0 => -f,
        _ => f,
    })
}

/// Quaternion EKF on `q = i·va + j·vb + k·vc`.
#[derive(Debug, Clone)]
pub struct QssEstimator {
    tuning: Tuning,
    dt: f64,
    initial_axis: Quaternion,
    gamma_ref: Option<Quaternion>,
    state: Option<EstimatorState<Quaternion>>,
    diagnostics: Diagnostics,
}

impl QssEstimator {
    /// Starts from the axis `−(i + j + k)/√3`.
    pub fn new(tuning: Tuning, dt: f64) -> Self {
        Self {
            tuning,
            dt,
            initial_axis: Quaternion::pure(-1.0, -1.0, -1.0) / 3f64.sqrt(),
            gamma_ref: None,
            state: None,
            diagnostics: Diagnostics::default(),
        }
    }

    /// Unit pure quaternion the initial phase increment rotates about.
    pub fn with_initial_axis(mut self, axis: Quaternion) -> Self {
        self.initial_axis = axis.im() / axis.im_norm();
        self
    }

    /// Reports signed frequencies relative to `gamma_ref`.
    pub fn with_reference_axis(mut self, gamma_ref: Quaternion) -> Self {
        self.gamma_ref = Some(gamma_ref);
        self
    }

    pub fn state(&self) -> Option<QssState> {
        self.state.as_ref().map(|s| QssState {
            phi: s.x[0],
            q_pos: s.x[1],
            q_neg: s.x[2],
        })
    }

    pub fn filter(&self) -> Option<&EstimatorState<Quaternion>> {
        self.state.as_ref()
    }
}

impl FrequencyEstimator for QssEstimator {
    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Qss
    }

    fn step(&mut self, frame: &ThreePhaseFrame) -> Result<f64> {
        let q = frame.to_quaternion();
        let next = match &self.state {
            None => {
                let t = &self.tuning;
                let phi = (self.initial_axis * (TAU * t.nominal_hz * self.dt)).exp();
                let (c, s) = (t.cr_increment, t.cr_signal);
                EstimatorState::new(
                    vec![phi, q * t.positive_share, q * (1.0 - t.positive_share)],
                    Mat::from_real_diagonal(&[t.m0; 3]),
                    Mat::from_real_diagonal(&[c, s, s]),
                    Mat::from_real_diagonal(&[t.cs]),
                )?
            }
            Some(s) => s.step(&[q], &QssModel)?,
        };
        divergence_guard(next.x[0].norm(), next.is_finite())?;
        let f = match qss_frequency(next.x[0], self.dt, self.gamma_ref) {
            Ok(f) => f,
            Err(Error::DegenerateAxis) => {
                self.diagnostics.degenerate += 1;
                0.0
            }
            Err(e) => return Err(e),
        };
        self.state = Some(next);
        Ok(f)
    }

    fn covariance_floor(&self) -> Option<f64> {
        self.state.as_ref().map(|s| s.m.min_embedded_eigenvalue())
    }

    fn covariance_defect(&self) -> Option<f64> {
        self.state.as_ref().map(|s| s.m.hermitian_defect())
    }

    fn diagnostics(&self) -> Diagnostics {
        self.diagnostics
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ekf::jacobian_discrepancy;
    use std::f64::consts::PI;

    #[test]
    fn frequency_readout() {
        let g = Quaternion::pure(-1.0, -1.0, -1.0) / 3f64.sqrt();
        let phi = (g * (0.1 * PI)).exp();
        assert!((qss_frequency(phi, 1e-3, None).unwrap() - 50.0).abs() < 1e-9);
        assert!((qss_frequency(phi, 1e-3, Some(-g)).unwrap() + 50.0).abs() < 1e-9);
        assert!(matches!(qss_frequency(Quaternion::ONE, 1e-3, None), Err(Error::DegenerateAxis)));
    }

    #[test]
    fn unit_increment_is_identity_on_sequences() {
        let x = [Quaternion::ONE, Quaternion::new(0.0, 1.0, 2.0, 3.0), Quaternion::new(0.0, -1.0, 0.5, 0.2)];
        assert_eq!(QssModel.transition(&x), x.to_vec());
    }

    #[test]
    fn conjugate_derivative_entry() {
        let x = [Quaternion::new(0.9, 0.1, 0.2, 0.3), Quaternion::I, Quaternion::ONE];
        let a = QssModel.transition_jacobian(&x);
        assert_eq!(a[(2, 0)], Quaternion::real(-0.5));
    }

    #[test]
    fn observation_is_sum_of_sequences() {
        let x = [Quaternion::new(0.9, 0.1, 0.2, 0.3), Quaternion::new(0.0, 1.0, 2.0, 3.0), Quaternion::new(0.0, -1.0, 0.5, 0.2)];
        assert_eq!(QssModel.observe(&x), vec![x[1] + x[2]]);
    }

    #[test]
    fn jacobians_match_right_unit_finite_differences() {
        let x = [
            Quaternion::new(0.95, -0.1, -0.12, -0.09),
            Quaternion::new(0.1, 0.7, -0.3, 0.2),
            Quaternion::new(-0.05, 0.2, 0.4, -0.6),
        ];
        let (a, h) = jacobian_discrepancy(&QssModel, &x, 1e-5);
        assert!(a < 1e-8 && h < 1e-8, "{a} {h}");
    }
}
