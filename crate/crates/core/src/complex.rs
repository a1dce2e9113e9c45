//! Complex-domain helpers for the strictly and widely linear baselines:
//! the Clarke transform, the positive/negative sequence pair of an
//! unbalanced system, and augmented (conjugate-stacked) vectors.

use num_complex::Complex64;

pub type Cplx = Complex64;

const SQRT_2_3: f64 = 0.816_496_580_927_726; // √(2/3)

/// Orthonormal Clarke matrix, rows `(0, α, β)`.
pub fn clarke_matrix() -> [[f64; 3]; 3] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s3 = 3f64.sqrt() / 2.0;
    [
        [SQRT_2_3 * h, SQRT_2_3 * h, SQRT_2_3 * h],
        [SQRT_2_3, -SQRT_2_3 / 2.0, -SQRT_2_3 / 2.0],
        [0.0, SQRT_2_3 * s3, -SQRT_2_3 * s3],
    ]
}

/// Clarke transform `(v_a, v_b, v_c) → (v_0, v_α, v_β)`.
pub fn clarke(va: f64, vb: f64, vc: f64) -> (f64, f64, f64) {
    let m = clarke_matrix();
    let row = |r: [f64; 3]| r[0] * va + r[1] * vb + r[2] * vc;
    (row(m[0]), row(m[1]), row(m[2]))
}

/// Complex system voltage `v_α + j v_β`; the zero-sequence part is dropped.
pub fn alpha_beta(va: f64, vb: f64, vc: f64) -> Cplx {
    let (_, a, b) = clarke(va, vb, vc);
    Cplx::new(a, b)
}

/// Sequence coefficients `(A, B)` with `v = A e^{jθ} + B e^{−jθ}` for an
/// unbalanced system whose three phase shifts are equal.
pub fn unbalance_sequences(va: f64, vb: f64, vc: f64) -> (Cplx, Cplx) {
    let s6 = 6f64.sqrt();
    let a = Cplx::new(s6 * (va + vb + vc) / 6.0, 0.0);
    let b = Cplx::new(
        s6 * (2.0 * va - vb - vc) / 12.0,
        -(2f64.sqrt()) * (vb - vc) / 4.0,
    );
    (a, b)
}

/// Augmented vector `(x₁, …, x_m, x₁*, …, x_m*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AugCplxVec(Vec<Cplx>);

impl AugCplxVec {
    pub fn augment(x: &[Cplx]) -> Self {
        Self(x.iter().copied().chain(x.iter().map(|z| z.conj())).collect())
    }

    /// Wraps an already-stacked vector of even length.
    pub fn from_stacked(v: Vec<Cplx>) -> Option<Self> {
        v.len().is_multiple_of(2).then_some(Self(v))
    }

    /// Restores conjugate consistency: each first-half entry becomes the
    /// average of itself and the conjugate of its mirror.
    pub fn project_consistent(&self) -> Self {
        let m = self.half_len();
        let head: Vec<Cplx> = (0..m)
            .map(|k| (self.0[k] + self.0[m + k].conj()) * 0.5)
            .collect();
        Self::augment(&head)
    }

    pub fn half_len(&self) -> usize {
        self.0.len() / 2
    }

    pub fn head(&self) -> &[Cplx] {
        &self.0[..self.half_len()]
    }

    pub fn as_slice(&self) -> &[Cplx] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Cplx> {
        self.0
    }

    /// Largest `|x_{m+k} − x_k*|`.
    pub fn consistency_defect(&self) -> f64 {
        let m = self.half_len();
        (0..m)
            .map(|k| (self.0[m + k] - self.0[k].conj()).norm())
            .fold(0.0, f64::max)
    }
}
