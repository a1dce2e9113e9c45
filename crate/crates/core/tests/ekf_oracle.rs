//! The quaternion and complex recursions against a plain real Kalman filter
//! run on the real embeddings of the same linear model.

use nalgebra::{DMatrix, DVector};
use quatfreq_core::ekf::{EstimatorState, StateModel};
use quatfreq_core::matrix::{Mat, QuatMatrix, Scalar};
use quatfreq_core::quaternion::Quaternion;
use quatfreq_core::Cplx;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `x ↦ F x`, observed through `H`, with constant left-multiplying matrices.
struct Linear<S> {
    f: Mat<S>,
    h: Mat<S>,
}

impl<S: Scalar> StateModel<S> for Linear<S> {
    fn state_dim(&self) -> usize {
        self.f.cols()
    }
    fn obs_dim(&self) -> usize {
        self.h.rows()
    }
    fn transition(&self, x: &[S]) -> Vec<S> {
        self.f.try_mul_vec(x).unwrap()
    }
    fn transition_jacobian(&self, _: &[S]) -> Mat<S> {
        self.f.clone()
    }
    fn observe(&self, x: &[S]) -> Vec<S> {
        self.h.try_mul_vec(x).unwrap()
    }
    fn observation_jacobian(&self, _: &[S]) -> Mat<S> {
        self.h.clone()
    }
}

fn flatten<S: Scalar>(x: &[S]) -> DVector<f64> {
    DVector::from_iterator(
        x.len() * S::REAL_DIM,
        x.iter().flat_map(|v| v.to_parts().into_iter().take(S::REAL_DIM)),
    )
}

struct RealKf {
    x: DVector<f64>,
    m: DMatrix<f64>,
}

impl RealKf {
    fn step(&mut self, f: &DMatrix<f64>, h: &DMatrix<f64>, cr: &DMatrix<f64>, cs: &DMatrix<f64>, y: &DVector<f64>) {
        let x = f * &self.x;
        let m = f * &self.m * f.transpose() + cr;
        let s = h * &m * h.transpose() + cs;
        let g = &m * h.transpose() * s.try_inverse().unwrap();
        self.x = &x + &g * (y - h * &x);
        let n = self.m.nrows();
        let m = (DMatrix::identity(n, n) - &g * h) * m;
        self.m = (&m + m.transpose()) * 0.5;
    }
}

fn compare<S: Scalar>(model: Linear<S>, x0: Vec<S>, ys: &[Vec<S>], cr: f64, cs: f64) -> f64 {
    let n = x0.len();
    let mut q = EstimatorState::new(
        x0.clone(),
        Mat::identity(n),
        Mat::from_real_diagonal(&vec![cr; n]),
        Mat::from_real_diagonal(&vec![cs; model.obs_dim()]),
    )
    .unwrap();
    let (f, h) = (model.f.real_embed(), model.h.real_embed());
    let mut r = RealKf {
        x: flatten(&x0),
        m: Mat::<S>::identity(n).real_embed(),
    };
    let cr_r = q.c_r.real_embed();
    let cs_r = q.c_s.real_embed();
    let mut worst: f64 = 0.0;
    for y in ys {
        q = q.step(y, &model).unwrap();
        r.step(&f, &h, &cr_r, &cs_r, &flatten(y));
        worst = worst.max((flatten(&q.x) - &r.x).amax());
        worst = worst.max((q.m.real_embed() - &r.m).amax());
    }
    worst
}

fn rand_q(rng: &mut impl Rng) -> Quaternion {
    Quaternion::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    )
}

#[test]
fn quaternion_filter_matches_real_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let rot = (Quaternion::pure(1.0, -2.0, 0.5) * 0.05).exp();
        let f = QuatMatrix::from_rows(&[
            &[rot, Quaternion::ZERO],
            &[rand_q(&mut rng) * 0.1, rot.conj() * 0.9],
        ]);
        let h = QuatMatrix::from_rows(&[&[Quaternion::ONE, rand_q(&mut rng)]]);
        let ys: Vec<Vec<Quaternion>> = (0..200).map(|_| vec![rand_q(&mut rng)]).collect();
        let x0 = vec![rand_q(&mut rng), rand_q(&mut rng)];
        let err = compare(Linear { f, h }, x0, &ys, 1e-3, 0.1);
        assert!(err < 1e-9, "quaternion vs real filter: {err}");
    }
}

#[test]
fn complex_filter_matches_real_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let c = |rng: &mut ChaCha8Rng| Cplx::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let f = Mat::from_rows(&[&[Cplx::from_polar(1.0, 0.3), Cplx::new(0.0, 0.0)], &[c(&mut rng) * 0.1, Cplx::new(0.8, 0.1)]]);
    let h = Mat::from_rows(&[&[Cplx::new(1.0, 0.0), c(&mut rng)]]);
    let ys: Vec<Vec<Cplx>> = (0..300).map(|_| vec![c(&mut rng)]).collect();
    let x0 = vec![c(&mut rng), c(&mut rng)];
    let err = compare(Linear { f, h }, x0, &ys, 1e-3, 0.1);
    assert!(err < 1e-9, "complex vs real filter: {err}");
}
