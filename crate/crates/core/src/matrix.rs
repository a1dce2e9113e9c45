//! Small dense matrices over ℂ or ℍ, and their real embeddings.
//!
//! Every scalar maps to its real left-multiplication matrix (2×2 for complex,
//! 4×4 for quaternions). The map is a ring homomorphism that takes the
//! conjugate transpose to the real transpose, so inversion and spectral checks
//! run on the embedded real matrix.

use std::fmt::Debug;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quaternion::hr::{hr_derivative_fd, HrConvention};
use crate::quaternion::Quaternion;

const MAX_DECOMPOSITION_ITERS: usize = 10_000;

/// Scalar field usable by the Kalman engines.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    const FIELD: &'static str;
    /// Dimension over ℝ.
    const REAL_DIM: usize;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_real(x: f64) -> Self;
    fn conj(self) -> Self;
    fn abs_sqr(self) -> f64;
    fn real_part(self) -> f64;
    fn scale(self, s: f64) -> Self;
    fn is_finite(self) -> bool;
    /// Real components; only the first `REAL_DIM` are meaningful.
    fn to_parts(self) -> [f64; 4];
    fn from_parts(parts: &[f64]) -> Self;
    /// Entry of the real left-multiplication matrix of `self`.
    fn left_mul_entry(self, row: usize, col: usize) -> f64;
    /// Derivative used for Jacobians: Wirtinger `∂/∂z` for ℂ, right-unit HR
    /// derivative for ℍ. Central differences with the given step.
    fn fd_derivative<F: Fn(Self) -> Self>(f: F, x: Self, step: f64) -> Self;
}

impl Scalar for Complex64 {
    const FIELD: &'static str = "complex";
    const REAL_DIM: usize = 2;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn abs_sqr(self) -> f64 {
        self.norm_sqr()
    }
    fn real_part(self) -> f64 {
        self.re
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
    fn to_parts(self) -> [f64; 4] {
        [self.re, self.im, 0.0, 0.0]
    }
    fn from_parts(parts: &[f64]) -> Self {
        Complex64::new(parts[0], parts[1])
    }
    fn left_mul_entry(self, row: usize, col: usize) -> f64 {
        match (row, col) {
            (0, 0) | (1, 1) => self.re,
            (0, 1) => -self.im,
            (1, 0) => self.im,
            _ => unreachable!("complex embedding is 2x2"),
        }
    }
    fn fd_derivative<F: Fn(Self) -> Self>(f: F, x: Self, step: f64) -> Self {
        let dx = (f(x + step) - f(x - step)) / (2.0 * step);
        let iy = Complex64::new(0.0, step);
        let dy = (f(x + iy) - f(x - iy)) / (2.0 * step);
        (dx - Complex64::i() * dy) * 0.5
    }
}

impl Scalar for Quaternion {
    const FIELD: &'static str = "quaternion";
    const REAL_DIM: usize = 4;

    fn zero() -> Self {
        Quaternion::ZERO
    }
    fn one() -> Self {
        Quaternion::ONE
    }
    fn from_real(x: f64) -> Self {
        Quaternion::real(x)
    }
    fn conj(self) -> Self {
        Quaternion::conj(self)
    }
    fn abs_sqr(self) -> f64 {
        self.norm_sqr()
    }
    fn real_part(self) -> f64 {
        self.r
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn is_finite(self) -> bool {
        Quaternion::is_finite(self)
    }
    fn to_parts(self) -> [f64; 4] {
        self.to_array()
    }
    fn from_parts(parts: &[f64]) -> Self {
        Quaternion::new(parts[0], parts[1], parts[2], parts[3])
    }
    fn left_mul_entry(self, row: usize, col: usize) -> f64 {
        let [a0, a1, a2, a3] = self.to_array();
        let l = [
            [a0, -a1, -a2, -a3],
            [a1, a0, -a3, a2],
            [a2, a3, a0, -a1],
            [a3, -a2, a1, a0],
        ];
        l[row][col]
    }
    fn fd_derivative<F: Fn(Self) -> Self>(f: F, x: Self, step: f64) -> Self {
        hr_derivative_fd(f, x, step, HrConvention::RightUnits)
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

pub type QuatMatrix = Mat<Quaternion>;
pub type CplxMatrix = Mat<Complex64>;

impl<S: Scalar> Mat<S> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "matrix data length",
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let data = (0..rows * cols).map(|k| f(k / cols, k % cols)).collect();
        Self { rows, cols, data }
    }

    /// Builds from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[&[S]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| S::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { S::one() } else { S::zero() })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |r, c| if r == c { S::from_real(diag[r]) } else { S::zero() })
    }

    pub fn column(entries: &[S]) -> Self {
        Self {
            rows: entries.len(),
            cols: 1,
            data: entries.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[S] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<S> {
        self.data
    }

    pub fn hermitian(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.scale(s)).collect(),
        }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                context: "matrix product inner dimension",
                expected: self.cols,
                got: rhs.rows,
            });
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |r, c| {
            (0..self.cols).fold(S::zero(), |acc, k| acc + self[(r, k)] * rhs[(k, c)])
        }))
    }

    /// Matrix times column vector; entries multiply from the left.
    pub fn try_mul_vec(&self, v: &[S]) -> Result<Vec<S>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                expected: self.cols,
                got: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| (0..self.cols).fold(S::zero(), |acc, k| acc + self[(r, k)] * v[k]))
            .collect())
    }

    fn zip_with(&self, rhs: &Self, context: &'static str, f: impl Fn(S, S) -> S) -> Result<Self> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.rows * self.cols,
                got: rhs.rows * rhs.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "matrix sum", |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, "matrix difference", |a, b| a - b)
    }

    /// `(M + Mᴴ) / 2`. Square matrices only.
    pub fn hermitize(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self[(r, c)] + self[(c, r)].conj()).scale(0.5)
        })
    }

    /// Largest entry-wise magnitude of `M − Mᴴ`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.rows {
            for c in 0..self.cols {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).abs_sqr().sqrt());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs_sqr().sqrt()).fold(0.0, f64::max)
    }

    /// Real `(d·rows) × (d·cols)` block embedding.
    pub fn real_embed(&self) -> DMatrix<f64> {
        let d = S::REAL_DIM;
        DMatrix::from_fn(self.rows * d, self.cols * d, |r, c| {
            self[(r / d, c / d)].left_mul_entry(r % d, c % d)
        })
    }

    /// Inverse of [`Mat::real_embed`]. Rejects real matrices whose blocks
    /// deviate from a left-multiplication pattern by more than `tol`.
    pub fn real_extract(m: &DMatrix<f64>, tol: f64) -> Result<Self> {
        let d = S::REAL_DIM;
        if !m.nrows().is_multiple_of(d) || !m.ncols().is_multiple_of(d) {
            return Err(Error::NotInImage {
                field: S::FIELD,
                residual: f64::INFINITY,
            });
        }
        let (rows, cols) = (m.nrows() / d, m.ncols() / d);
        let out = Self::from_fn(rows, cols, |r, c| {
            let parts: Vec<f64> = (0..d).map(|k| m[(r * d + k, c * d)]).collect();
            S::from_parts(&parts)
        });
        let residual = (&out.real_embed() - m).amax();
        if residual > tol {
            return Err(Error::NotInImage {
                field: S::FIELD,
                residual,
            });
        }
        Ok(out)
    }

    /// Inverse computed on the real embedding; fails when the embedded
    /// condition number exceeds `max_condition`.
    pub fn inverse(&self, max_condition: f64) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                context: "inverse of non-square matrix",
                expected: self.rows,
                got: self.cols,
            });
        }
        let real = self.real_embed();
        let sv = real
            .iter()
            .all(|v| v.is_finite())
            .then(|| real.clone().try_svd(false, false, f64::EPSILON, MAX_DECOMPOSITION_ITERS))
            .flatten()
            .ok_or(Error::SingularInnovation { condition: f64::NAN })?
            .singular_values;
        let (smax, smin) = (sv.max(), sv.min());
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if condition.is_nan() || condition > max_condition {
            return Err(Error::SingularInnovation { condition });
        }
        let inv = real
            .try_inverse()
            .ok_or(Error::SingularInnovation { condition })?;
        // The image is closed under inversion; extraction only strips rounding.
        Self::real_extract(&inv, f64::INFINITY)
    }

    /// Smallest eigenvalue of the (symmetric) real embedding of a Hermitian
    /// matrix; NaN when the entries are not finite.
    pub fn min_embedded_eigenvalue(&self) -> f64 {
        let real = self.real_embed();
        let sym = (&real + real.transpose()) * 0.5;
        if !sym.iter().all(|v| v.is_finite()) {
            return f64::NAN;
        }
        sym.try_symmetric_eigen(f64::EPSILON, MAX_DECOMPOSITION_ITERS)
            .map_or(f64::NAN, |e| e.eigenvalues.min())
    }
}

impl<S> Index<(usize, usize)> for Mat<S> {
    type Output = S;
    fn index(&self, (r, c): (usize, usize)) -> &S {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl<S> IndexMut<(usize, usize)> for Mat<S> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut S {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

impl<S: Scalar> Mul for &Mat<S> {
    type Output = Mat<S>;
    /// Panics on dimension mismatch; see [`Mat::try_mul`].
    fn mul(self, rhs: Self) -> Mat<S> {
        self.try_mul(rhs).expect("matrix product dimensions")
    }
}

impl<S: Scalar> Add for &Mat<S> {
    type Output = Mat<S>;
    fn add(self, rhs: Self) -> Mat<S> {
        self.try_add(rhs).expect("matrix sum dimensions")
    }
}

impl<S: Scalar> Sub for &Mat<S> {
    type Output = Mat<S>;
    fn sub(self, rhs: Self) -> Mat<S> {
        self.try_sub(rhs).expect("matrix difference dimensions")
    }
}
