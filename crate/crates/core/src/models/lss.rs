use std::f64::consts::TAU;

use super::{divergence_guard, EstimatorKind, FrequencyEstimator, Tuning};
use crate::complex::{alpha_beta, Cplx};
use crate::ekf::{EstimatorState, StateModel};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::signal::ThreePhaseFrame;

/// Strictly linear model `[φ, v] ↦ [φ, φv]`, observing `v`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LssModel;

impl StateModel<Cplx> for LssModel {
    fn state_dim(&self) -> usize {
        2
    }
    fn obs_dim(&self) -> usize {
        1
    }
    fn transition(&self, x: &[Cplx]) -> Vec<Cplx> {
        vec![x[0], x[0] * x[1]]
    }
    fn transition_jacobian(&self, x: &[Cplx]) -> Mat<Cplx> {
        let one = Cplx::new(1.0, 0.0);
        let zero = Cplx::new(0.0, 0.0);
        Mat::from_rows(&[&[one, zero], &[x[1], x[0]]])
    }
    fn observe(&self, x: &[Cplx]) -> Vec<Cplx> {
        vec![x[1]]
    }
    fn observation_jacobian(&self, _: &[Cplx]) -> Mat<Cplx> {
        Mat::from_rows(&[&[Cplx::new(0.0, 0.0), Cplx::new(1.0, 0.0)]])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LssState {
    /// Phase increment `e^{j2πfΔT}`.
    pub phi: Cplx,
    pub v: Cplx,
}

/// `Im(ln φ)/(2πΔT)`.
pub fn lss_frequency(phi: Cplx, dt: f64) -> Result<f64> {
    if phi.norm_sqr() == 0.0 {
        return Err(Error::ZeroArgument);
    }
    Ok(phi.arg() / (TAU * dt))
}

/// Strictly linear complex EKF on the αβ voltage.
///
/// The αβ phasor of a positive-sequence system turns clockwise, so the
/// estimate is reported as a magnitude.
#[derive(Debug, Clone)]
pub struct LssEstimator {
    tuning: Tuning,
    dt: f64,
    state: Option<EstimatorState<Cplx>>,
}

impl LssEstimator {
    pub fn new(tuning: Tuning, dt: f64) -> Self {
        Self { tuning, dt, state: None }
    }

    pub fn state(&self) -> Option<LssState> {
        self.state.as_ref().map(|s| LssState { phi: s.x[0], v: s.x[1] })
    }

    pub fn filter(&self) -> Option<&EstimatorState<Cplx>> {
        self.state.as_ref()
    }
}

impl FrequencyEstimator for LssEstimator {
    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Lss
    }

    fn step(&mut self, frame: &ThreePhaseFrame) -> Result<f64> {
        let z = alpha_beta(frame.va, frame.vb, frame.vc);
        let next = match &self.state {
            None => {
                let t = &self.tuning;
                let phi = Cplx::from_polar(1.0, TAU * t.nominal_hz * self.dt);
                EstimatorState::new(
                    vec![phi, z],
                    Mat::from_real_diagonal(&[t.m0, t.m0]),
                    Mat::from_real_diagonal(&[t.cr_increment, t.cr_signal]),
                    Mat::from_real_diagonal(&[t.cs]),
                )?
            }
            Some(s) => s.step(&[z], &LssModel)?,
        };
        divergence_guard(next.x[0].norm(), next.is_finite())?;
        let f = lss_frequency(next.x[0], self.dt)?.abs();
        self.state = Some(next);
        Ok(f)
    }

    fn covariance_floor(&self) -> Option<f64> {
        self.state.as_ref().map(|s| s.m.min_embedded_eigenvalue())
    }

    fn covariance_defect(&self) -> Option<f64> {
        self.state.as_ref().map(|s| s.m.hermitian_defect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ekf::jacobian_discrepancy;
    use std::f64::consts::PI;

    #[test]
    fn frequency_readout() {
        let f = lss_frequency(Cplx::from_polar(1.0, 0.1 * PI), 1e-3).unwrap();
        assert!((f - 50.0).abs() < 1e-9);
        assert_eq!(lss_frequency(Cplx::new(1.0, 0.0), 1e-3).unwrap(), 0.0);
        let f = lss_frequency(Cplx::from_polar(1.0, 0.104 * PI), 1e-3).unwrap();
        assert!((f - 52.0).abs() < 1e-9);
        assert!(matches!(lss_frequency(Cplx::new(0.0, 0.0), 1e-3), Err(Error::ZeroArgument)));
    }

    #[test]
    fn analytic_jacobians() {
        let x = [Cplx::new(0.9, 0.3), Cplx::new(-0.4, 1.1)];
        let (a, h) = jacobian_discrepancy(&LssModel, &x, 1e-6);
        assert!(a < 1e-8 && h < 1e-8, "{a} {h}");
    }
}
