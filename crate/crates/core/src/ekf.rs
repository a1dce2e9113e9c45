//! Extended Kalman filtering over ℂ and ℍ.
//!
//! One recursion serves the strictly linear complex filter, the augmented
//! complex filter (with a conjugate-consistency projection) and the
//! quaternion filter:
//!
//! ```text
//! x̂ₙ|ₙ₋₁ = f(x̂ₙ₋₁|ₙ₋₁)
//! Mₙ|ₙ₋₁ = Aₙ Mₙ₋₁|ₙ₋₁ Aₙᴴ + C_r
//! Gₙ     = Mₙ|ₙ₋₁ Hₙᴴ (Hₙ Mₙ|ₙ₋₁ Hₙᴴ + C_s)⁻¹
//! x̂ₙ|ₙ   = x̂ₙ|ₙ₋₁ + Gₙ (yₙ − g(x̂ₙ|ₙ₋₁))
//! Mₙ|ₙ   = (I − Gₙ Hₙ) Mₙ|ₙ₋₁
//! ```
//!
//! Matrix entries multiply vector entries from the left, so in ℍ the
//! Jacobians must be left-multiplying derivatives (see
//! [`crate::quaternion::hr`]).

use crate::complex::{AugCplxVec, Cplx};
use crate::error::{Error, Result};
use crate::matrix::{Mat, Scalar};

/// Innovation covariances whose real embedding is worse conditioned than
/// this are treated as singular.
pub const MAX_INNOVATION_CONDITION: f64 = 1e12;

/// State-space model: transition `f`, observation `g` and their Jacobians.
pub trait StateModel<S: Scalar> {
    fn state_dim(&self) -> usize;
    fn obs_dim(&self) -> usize;
    fn transition(&self, x: &[S]) -> Vec<S>;
    fn transition_jacobian(&self, x: &[S]) -> Mat<S>;
    fn observe(&self, x: &[S]) -> Vec<S>;
    fn observation_jacobian(&self, x: &[S]) -> Mat<S>;
}

/// Estimate, covariance and noise covariances of a running filter.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState<S> {
    pub x: Vec<S>,
    pub m: Mat<S>,
    /// State evolution noise covariance.
    pub c_r: Mat<S>,
    /// Observation noise covariance.
    pub c_s: Mat<S>,
    /// Number of completed updates.
    pub n: u64,
}

impl<S: Scalar> EstimatorState<S> {
    pub fn new(x: Vec<S>, m: Mat<S>, c_r: Mat<S>, c_s: Mat<S>) -> Result<Self> {
        let dim = x.len();
        for (context, got) in [
            ("covariance rows", m.rows()),
            ("covariance cols", m.cols()),
            ("state noise rows", c_r.rows()),
            ("state noise cols", c_r.cols()),
        ] {
            if got != dim {
                return Err(Error::DimensionMismatch {
                    context,
                    expected: dim,
                    got,
                });
            }
        }
        if c_s.rows() != c_s.cols() {
            return Err(Error::DimensionMismatch {
                context: "observation noise must be square",
                expected: c_s.rows(),
                got: c_s.cols(),
            });
        }
        Ok(Self { x, m, c_r, c_s, n: 0 })
    }

    fn check_model<M: StateModel<S>>(&self, model: &M) -> Result<()> {
        if model.state_dim() != self.x.len() {
            return Err(Error::DimensionMismatch {
                context: "model state dimension",
                expected: self.x.len(),
                got: model.state_dim(),
            });
        }
        if model.obs_dim() != self.c_s.rows() {
            return Err(Error::DimensionMismatch {
                context: "model observation dimension",
                expected: self.c_s.rows(),
                got: model.obs_dim(),
            });
        }
        Ok(())
    }

    /// A priori step.
    pub fn predict<M: StateModel<S>>(&self, model: &M) -> Result<Self> {
        self.check_model(model)?;
        let a = model.transition_jacobian(&self.x);
        let m = a.try_mul(&self.m)?.try_mul(&a.hermitian())?.try_add(&self.c_r)?;
        Ok(Self {
            x: model.transition(&self.x),
            m,
            c_r: self.c_r.clone(),
            c_s: self.c_s.clone(),
            n: self.n,
        })
    }

    /// `y − g(x̂)`.
    pub fn innovation<M: StateModel<S>>(&self, y: &[S], model: &M) -> Result<Vec<S>> {
        self.check_model(model)?;
        if y.len() != model.obs_dim() {
            return Err(Error::DimensionMismatch {
                context: "observation length",
                expected: model.obs_dim(),
                got: y.len(),
            });
        }
        Ok(y.iter()
            .zip(model.observe(&self.x))
            .map(|(&a, b)| a - b)
            .collect())
    }

    /// A posteriori step. The covariance is re-Hermitized afterwards.
    pub fn update<M: StateModel<S>>(&self, y: &[S], model: &M) -> Result<Self> {
        let e = self.innovation(y, model)?;
        let h = model.observation_jacobian(&self.x);
        let mh = self.m.try_mul(&h.hermitian())?;
        let s = h.try_mul(&mh)?.try_add(&self.c_s)?;
        let gain = mh.try_mul(&s.inverse(MAX_INNOVATION_CONDITION)?)?;
        let x = self
            .x
            .iter()
            .zip(gain.try_mul_vec(&e)?)
            .map(|(&a, b)| a + b)
            .collect();
        let i_gh = Mat::identity(self.x.len()).try_sub(&gain.try_mul(&h)?)?;
        let m = i_gh.try_mul(&self.m)?.hermitize();
        Ok(Self {
            x,
            m,
            c_r: self.c_r.clone(),
            c_s: self.c_s.clone(),
            n: self.n + 1,
        })
    }

    /// Predict followed by update.
    pub fn step<M: StateModel<S>>(&self, y: &[S], model: &M) -> Result<Self> {
        self.predict(model)?.update(y, model)
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().all(|v| v.is_finite()) && self.m.is_finite()
    }
}

/// Augmented complex step: predict, update, then force the second half of
/// the state to be the conjugate of the first.
pub fn acekf_step<M: StateModel<Cplx>>(
    state: &EstimatorState<Cplx>,
    y: &[Cplx],
    model: &M,
) -> Result<EstimatorState<Cplx>> {
    let mut next = state.step(y, model)?;
    let aug = AugCplxVec::from_stacked(next.x).ok_or(Error::DimensionMismatch {
        context: "augmented state must have even length",
        expected: state.x.len() + 1,
        got: state.x.len(),
    })?;
    next.x = aug.project_consistent().into_vec();
    Ok(next)
}

/// Jacobian of `f` at `x` by finite differences of [`Scalar::fd_derivative`].
pub fn numeric_jacobian<S, F>(f: F, x: &[S], step: f64) -> Mat<S>
where
    S: Scalar,
    F: Fn(&[S]) -> Vec<S>,
{
    let rows = f(x).len();
    Mat::from_fn(rows, x.len(), |r, c| {
        S::fd_derivative(
            |t| {
                let mut probe = x.to_vec();
                probe[c] = t;
                f(&probe)[r]
            },
            x[c],
            step,
        )
    })
}

/// Largest entry-wise gap between a model's analytic Jacobians and their
/// finite-difference counterparts at `x`: `(transition, observation)`.
pub fn jacobian_discrepancy<S, M>(model: &M, x: &[S], step: f64) -> (f64, f64)
where
    S: Scalar,
    M: StateModel<S>,
{
    let a = numeric_jacobian(|v| model.transition(v), x, step);
    let h = numeric_jacobian(|v| model.observe(v), x, step);
    (
        (&a - &model.transition_jacobian(x)).max_abs(),
        (&h - &model.observation_jacobian(x)).max_abs(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::Quaternion;

    /// `x ↦ a·x`, observed directly.
    struct Scale<S>(S);

    impl<S: Scalar> StateModel<S> for Scale<S> {
        fn state_dim(&self) -> usize {
            1
        }
        fn obs_dim(&self) -> usize {
            1
        }
        fn transition(&self, x: &[S]) -> Vec<S> {
            vec![self.0 * x[0]]
        }
        fn transition_jacobian(&self, _: &[S]) -> Mat<S> {
            Mat::from_rows(&[&[self.0]])
        }
        fn observe(&self, x: &[S]) -> Vec<S> {
            x.to_vec()
        }
        fn observation_jacobian(&self, _: &[S]) -> Mat<S> {
            Mat::identity(1)
        }
    }

    fn scalar_state<S: Scalar>(x: S, m: f64, cr: f64, cs: f64) -> EstimatorState<S> {
        EstimatorState::new(
            vec![x],
            Mat::from_real_diagonal(&[m]),
            Mat::from_real_diagonal(&[cr]),
            Mat::from_real_diagonal(&[cs]),
        )
        .unwrap()
    }

    #[test]
    fn identity_prediction() {
        let model = Scale(Quaternion::ONE);
        let s = scalar_state(Quaternion::new(1.0, 2.0, 3.0, 4.0), 1.0, 0.0, 1.0);
        assert_eq!(s.predict(&model).unwrap(), s);
        let s = scalar_state(Quaternion::I, 1.0, 0.25, 1.0);
        let p = s.predict(&model).unwrap();
        assert_eq!(p.m[(0, 0)], Quaternion::real(1.25));
        assert_eq!(p.x, s.x);
    }

    #[test]
    fn exact_measurement_is_adopted() {
        let model = Scale(Cplx::new(1.0, 0.0));
        let s = scalar_state(Cplx::new(0.0, 0.0), 1.0, 0.0, 0.0);
        let y = Cplx::new(0.7, -0.2);
        let u = s.update(&[y], &model).unwrap();
        assert!((u.x[0] - y).norm() < 1e-15);
        assert!(u.m[(0, 0)].norm() < 1e-15);
        assert!(u.innovation(&[y], &model).unwrap()[0].norm() < 1e-15);
    }

    #[test]
    fn huge_observation_noise_freezes_state() {
        let model = Scale(Quaternion::ONE);
        let x0 = Quaternion::new(0.1, 0.2, 0.3, 0.4);
        let s = scalar_state(x0, 1.0, 0.0, 1e11);
        let u = s.update(&[Quaternion::new(5.0, 5.0, 5.0, 5.0)], &model).unwrap();
        assert!(u.x[0].approx_eq(x0, 1e-9));
    }

    #[test]
    fn singular_innovation_is_reported() {
        let model = Scale(Cplx::new(1.0, 0.0));
        let s = scalar_state(Cplx::new(0.0, 0.0), 0.0, 0.0, 0.0);
        assert!(matches!(
            s.update(&[Cplx::new(1.0, 0.0)], &model),
            Err(Error::SingularInnovation { .. })
        ));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let model = Scale(Cplx::new(1.0, 0.0));
        let s = EstimatorState::new(
            vec![Cplx::new(0.0, 0.0); 2],
            Mat::identity(2),
            Mat::identity(2),
            Mat::identity(1),
        )
        .unwrap();
        assert!(matches!(s.predict(&model), Err(Error::DimensionMismatch { .. })));
        assert!(EstimatorState::new(
            vec![Cplx::new(0.0, 0.0); 2],
            Mat::<Cplx>::identity(3),
            Mat::identity(2),
            Mat::identity(1),
        )
        .is_err());
    }

    #[test]
    fn numeric_jacobian_matches_scale_model() {
        let model = Scale(Quaternion::new(0.2, -1.0, 0.5, 2.0));
        let (a, h) = jacobian_discrepancy(&model, &[Quaternion::new(1.0, 1.0, 0.0, -1.0)], 1e-3);
        assert!(a < 1e-12 && h < 1e-12);
    }
}
