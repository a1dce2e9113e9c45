use std::f64::consts::TAU;

use super::{divergence_guard, Diagnostics, EstimatorKind, FrequencyEstimator, Tuning};
use crate::complex::{alpha_beta, Cplx};
use crate::ekf::{acekf_step, EstimatorState, StateModel};
use crate::error::Result;
use crate::matrix::Mat;
use crate::signal::ThreePhaseFrame;

/// Widely linear model on the augmented state `[h, g, v, h*, g*, v*]`:
/// `v ↦ hv + gv*`, observing `[v, v*]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct WlssModel;

impl StateModel<Cplx> for WlssModel {
    fn state_dim(&self) -> usize {
        6
    }
    fn obs_dim(&self) -> usize {
        2
    }
    fn transition(&self, x: &[Cplx]) -> Vec<Cplx> {
        let [h, g, v, hc, gc, vc] = [x[0], x[1], x[2], x[3], x[4], x[5]];
        vec![h, g, h * v + g * vc, hc, gc, hc * vc + gc * v]
    }
    fn transition_jacobian(&self, x: &[Cplx]) -> Mat<Cplx> {
        let [h, g, v, hc, gc, vc] = [x[0], x[1], x[2], x[3], x[4], x[5]];
        let mut a = Mat::zeros(6, 6);
        for i in [0, 1, 3, 4] {
            a[(i, i)] = Cplx::new(1.0, 0.0);
        }
        a[(2, 0)] = v;
        a[(2, 1)] = vc;
        a[(2, 2)] = h;
        a[(2, 5)] = g;
        a[(5, 3)] = vc;
        a[(5, 4)] = v;
        a[(5, 5)] = hc;
        a[(5, 2)] = gc;
        a
    }
    fn observe(&self, x: &[Cplx]) -> Vec<Cplx> {
        vec![x[2], x[5]]
    }
    fn observation_jacobian(&self, _: &[Cplx]) -> Mat<Cplx> {
        let mut h = Mat::zeros(2, 6);
        h[(0, 2)] = Cplx::new(1.0, 0.0);
        h[(1, 5)] = Cplx::new(1.0, 0.0);
        h
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WlssState {
    pub h: Cplx,
    pub g: Cplx,
    pub v: Cplx,
}

/// `arcsin(Im(h + a))/(2πΔT)` with `a = −j Im h + j√(Im²h − |g|²)`.
///
/// Returns the frequency and whether the discriminant was clamped at zero.
pub fn wlss_frequency(h: Cplx, g: Cplx, dt: f64) -> (f64, bool) {
    let disc = h.im * h.im - g.norm_sqr();
    let clamped = disc < 0.0;
    let s = disc.max(0.0).sqrt().min(1.0);
    (s.asin() / (TAU * dt), clamped)
}

/// Augmented complex EKF on the αβ voltage.
#[derive(Debug, Clone)]
pub struct WlssEstimator {
    tuning: Tuning,
    dt: f64,
    state: Option<EstimatorState<Cplx>>,
    diagnostics: Diagnostics,
}

impl WlssEstimator {
    pub fn new(tuning: Tuning, dt: f64) -> Self {
        Self {
            tuning,
            dt,
            state: None,
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn state(&self) -> Option<WlssState> {
        self.state.as_ref().map(|s| WlssState {
            h: s.x[0],
            g: s.x[1],
            v: s.x[2],
        })
    }

    pub fn filter(&self) -> Option<&EstimatorState<Cplx>> {
        self.state.as_ref()
    }
}

impl FrequencyEstimator for WlssEstimator {
    fn kind(&self) -> EstimatorKind {
        EstimatorKind::Wlss
    }

    fn step(&mut self, frame: &ThreePhaseFrame) -> Result<f64> {
        let z = alpha_beta(frame.va, frame.vb, frame.vc);
        let next = match &self.state {
            None => {
                let t = &self.tuning;
                let h = Cplx::from_polar(1.0, TAU * t.nominal_hz * self.dt);
                let zero = Cplx::new(0.0, 0.0);
                let (w, s) = (t.cr_weight, t.cr_signal);
                EstimatorState::new(
                    vec![h, zero, z, h.conj(), zero, z.conj()],
                    Mat::from_real_diagonal(&[t.m0; 6]),
                    Mat::from_real_diagonal(&[w, w, s, w, w, s]),
                    Mat::from_real_diagonal(&[t.cs, t.cs]),
                )?
            }
            Some(s) => acekf_step(s, &[z, z.conj()], &WlssModel)?,
        };
        divergence_guard(next.x[0].norm(), next.is_finite())?;
        let (f, clamped) = wlss_frequency(next.x[0], next.x[1], self.dt);
        self.diagnostics.clamped += u64::from(clamped);
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
    use crate::complex::AugCplxVec;
    use crate::ekf::jacobian_discrepancy;
    use std::f64::consts::PI;

    #[test]
    fn frequency_readout() {
        let (f, c) = wlss_frequency(Cplx::from_polar(1.0, 0.1 * PI), Cplx::new(0.0, 0.0), 1e-3);
        assert!((f - 50.0).abs() < 1e-9 && !c);
        let (f, c) = wlss_frequency(Cplx::new(0.8, 0.5), Cplx::new(0.3, 0.4), 1e-3);
        assert_eq!(f, 0.0);
        assert!(!c);
        let (f, c) = wlss_frequency(Cplx::new(0.8, 0.1), Cplx::new(0.3, 0.4), 1e-3);
        assert_eq!(f, 0.0);
        assert!(c);
    }

    #[test]
    fn transition_keeps_augmented_state_consistent() {
        let half = [Cplx::new(0.95, 0.3), Cplx::new(0.01, -0.02), Cplx::new(0.4, -1.1)];
        let x = AugCplxVec::augment(&half);
        let next = AugCplxVec::from_stacked(WlssModel.transition(x.as_slice())).unwrap();
        assert!(next.consistency_defect() < 1e-15);
    }

    #[test]
    fn analytic_jacobian_rows_for_signal() {
        // Entries coupling the weights to the signal follow from holomorphic
        // differentiation in each augmented coordinate.
        let half = [Cplx::new(0.95, 0.3), Cplx::new(0.01, -0.02), Cplx::new(0.4, -1.1)];
        let x = AugCplxVec::augment(&half).into_vec();
        let (a, h) = jacobian_discrepancy(&WlssModel, &x, 1e-6);
        assert!(a < 1e-8 && h < 1e-8, "{a} {h}");
    }
}
