//! Quaternion arithmetic.
//!
//! `q = r + i·xi + j·xj + k·xk` with the Hamilton product rules
//! `ij = k, jk = i, ki = j, i² = j² = k² = ijk = −1`.

pub mod hr;

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A quaternion with one real and three imaginary components.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub r: f64,
    pub xi: f64,
    pub xj: f64,
    pub xk: f64,
}

/// One of the three imaginary basis elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    I,
    J,
    K,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::I, Axis::J, Axis::K];

    pub fn unit(self) -> Quaternion {
        match self {
            Axis::I => Quaternion::I,
            Axis::J => Quaternion::J,
            Axis::K => Quaternion::K,
        }
    }
}

/// Polar form `|q| (cos θ + ξ sin θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polar {
    pub magnitude: f64,
    /// Unit pure quaternion.
    pub axis: Quaternion,
    /// Angle in `[0, π]`.
    pub angle: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(r: f64, xi: f64, xj: f64, xk: f64) -> Self {
        Self { r, xi, xj, xk }
    }

    #[inline]
    pub const fn real(r: f64) -> Self {
        Self::new(r, 0.0, 0.0, 0.0)
    }

    #[inline]
    pub const fn pure(xi: f64, xj: f64, xk: f64) -> Self {
        Self::new(0.0, xi, xj, xk)
    }

    #[inline]
    pub fn from_array(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.r, self.xi, self.xj, self.xk]
    }

    /// `(q_r, q_i, q_j, q_k)`.
    #[inline]
    pub fn components(self) -> (f64, f64, f64, f64) {
        (self.r, self.xi, self.xj, self.xk)
    }

    /// Real part as a quaternion.
    #[inline]
    pub fn re(self) -> Quaternion {
        Self::real(self.r)
    }

    /// Imaginary (pure) part.
    #[inline]
    pub fn im(self) -> Quaternion {
        Self::pure(self.xi, self.xj, self.xk)
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.r, -self.xi, -self.xj, -self.xk)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.r * self.r + self.xi * self.xi + self.xj * self.xj + self.xk * self.xk
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Norm of the imaginary part.
    #[inline]
    pub fn im_norm(self) -> f64 {
        (self.xi * self.xi + self.xj * self.xj + self.xk * self.xk).sqrt()
    }

    pub fn is_pure(self) -> bool {
        self.r == 0.0
    }

    pub fn is_finite(self) -> bool {
        self.r.is_finite() && self.xi.is_finite() && self.xj.is_finite() && self.xk.is_finite()
    }

    /// Multiplicative inverse `q* / |q|²`. Non-finite for `q = 0`.
    #[inline]
    pub fn inverse(self) -> Self {
        self.conj() / self.norm_sqr()
    }

    /// Euclidean inner product of the imaginary parts.
    #[inline]
    pub fn dot_im(self, other: Self) -> f64 {
        self.xi * other.xi + self.xj * other.xj + self.xk * other.xk
    }

    /// Cross product of the imaginary parts, as a pure quaternion.
    #[inline]
    pub fn cross_im(self, other: Self) -> Self {
        Self::pure(
            self.xj * other.xk - self.xk * other.xj,
            self.xk * other.xi - self.xi * other.xk,
            self.xi * other.xj - self.xj * other.xi,
        )
    }

    /// Involution about a basis axis, `η q η⁻¹`: keeps the real part and the
    /// `η` component, negates the other two imaginary components.
    #[inline]
    pub fn involution(self, axis: Axis) -> Self {
        match axis {
            Axis::I => Self::new(self.r, self.xi, -self.xj, -self.xk),
            Axis::J => Self::new(self.r, -self.xi, self.xj, -self.xk),
            Axis::K => Self::new(self.r, -self.xi, -self.xj, self.xk),
        }
    }

    /// General involution `η q η⁻¹` about any non-zero `η`.
    pub fn rotate_by(self, eta: Quaternion) -> Self {
        eta * self * eta.inverse()
    }

    /// Real components recovered from the four involutions `q, q^i, q^j, q^k`.
    pub fn components_via_involutions(self) -> (f64, f64, f64, f64) {
        let (qi, qj, qk) = (
            self.involution(Axis::I),
            self.involution(Axis::J),
            self.involution(Axis::K),
        );
        let r = (self + qi + qj + qk) / 4.0;
        // 1/(4η) = −η/4 for a basis axis η
        let i = -Self::I * (self + qi - qj - qk) / 4.0;
        let j = -Self::J * (self - qi + qj - qk) / 4.0;
        let k = -Self::K * (self - qi - qj + qk) / 4.0;
        (r.r, i.r, j.r, k.r)
    }

    /// Conjugate expressed through involutions, `½(q^i + q^j + q^k − q)`.
    pub fn conj_via_involutions(self) -> Self {
        (self.involution(Axis::I) + self.involution(Axis::J) + self.involution(Axis::K) - self)
            / 2.0
    }

    /// Polar form. Fails for quaternions without an imaginary part, whose
    /// axis is undefined.
    pub fn polar(self) -> Result<Polar> {
        let v = self.im_norm();
        if v == 0.0 {
            return Err(Error::DegenerateAxis);
        }
        Ok(Polar {
            magnitude: self.norm(),
            axis: self.im() / v,
            angle: v.atan2(self.r),
        })
    }

    /// Quaternion exponential `e^p (cos |v| + v̂ sin |v|)` for `q = p + v`.
    pub fn exp(self) -> Self {
        let scale = self.r.exp();
        let v = self.im_norm();
        if v == 0.0 {
            return Self::real(scale);
        }
        let (s, c) = v.sin_cos();
        Self::real(c * scale) + self.im() * (scale * s / v)
    }

    /// Principal logarithm `ln|q| + ξθ`, `θ ∈ [0, π]`.
    ///
    /// A negative real argument has no distinguished axis and is rejected.
    pub fn ln(self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroArgument);
        }
        let v = self.im_norm();
        if v == 0.0 {
            if self.r > 0.0 {
                return Ok(Self::real(n.ln()));
            }
            return Err(Error::DegenerateAxis);
        }
        let theta = v.atan2(self.r);
        Ok(Self::real(n.ln()) + self.im() * (theta / v))
    }

    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        (self - other).norm() <= tol
    }
}

/// Free-function form of [`Quaternion::exp`].
pub fn qexp(q: Quaternion) -> Quaternion {
    q.exp()
}

/// Free-function form of [`Quaternion::ln`].
pub fn qln(q: Quaternion) -> Result<Quaternion> {
    q.ln()
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.r + o.r, self.xi + o.xi, self.xj + o.xj, self.xk + o.xk)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.r - o.r, self.xi - o.xi, self.xj - o.xj, self.xk - o.xk)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.r, -self.xi, -self.xj, -self.xk)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    /// `q₁q₂ = r₁r₂ + r₁v₂ + r₂v₁ + v₁×v₂ − ⟨v₁, v₂⟩`.
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.r * o.r - self.xi * o.xi - self.xj * o.xj - self.xk * o.xk,
            self.r * o.xi + self.xi * o.r + self.xj * o.xk - self.xk * o.xj,
            self.r * o.xj - self.xi * o.xk + self.xj * o.r + self.xk * o.xi,
            self.r * o.xk + self.xi * o.xj - self.xj * o.xi + self.xk * o.r,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.r * s, self.xi * s, self.xj * s, self.xk * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        Self::new(self.r / s, self.xi / s, self.xj / s, self.xk / s)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl Sum for Quaternion {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, Add::add)
    }
}

impl From<f64> for Quaternion {
    fn from(r: f64) -> Self {
        Self::real(r)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{:+}i{:+}j{:+}k",
            self.r, self.xi, self.xj, self.xk
        )
    }
}
