//! HR-calculus derivatives of quaternion functions.
//!
//! The derivative of `f(q)` with respect to `q` combines the four real
//! partials,
//!
//! ```text
//! ∂f/∂q = ¼ (∂f/∂q_r − ∂f/∂q_i·i − ∂f/∂q_j·j − ∂f/∂q_k·k)     (RightUnits)
//! ∂f/∂q = ¼ (∂f/∂q_r − i·∂f/∂q_i − j·∂f/∂q_j − k·∂f/∂q_k)     (LeftUnits)
//! ```
//!
//! The two placements of the imaginary units agree on real-valued
//! combinations such as `∂q*/∂q = −½` but differ for products with a
//! quaternion constant. The estimators use [`HrConvention::RightUnits`]:
//! under it a left-constant product `a·q` has derivative `a`, which acts as a
//! left-multiplying Jacobian entry exactly like the linearisation
//! `δ(a·q) = a·δq`.

use super::Quaternion;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HrConvention {
    LeftUnits,
    RightUnits,
}

/// Elementary products with a constant `a`, each with a closed-form
/// HR derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HrRule {
    /// `f(q) = q·a`
    RightConstant(Quaternion),
    /// `f(q) = a·q`
    LeftConstant(Quaternion),
    /// `f(q) = a·q*`
    ConjugateLeftConstant(Quaternion),
}

impl HrRule {
    pub fn eval(self, q: Quaternion) -> Quaternion {
        match self {
            HrRule::RightConstant(a) => q * a,
            HrRule::LeftConstant(a) => a * q,
            HrRule::ConjugateLeftConstant(a) => a * q.conj(),
        }
    }

    /// Closed-form derivative under the chosen convention.
    pub fn derivative(self, convention: HrConvention) -> Quaternion {
        use HrConvention::*;
        match (self, convention) {
            (HrRule::RightConstant(a), LeftUnits) => a,
            (HrRule::RightConstant(a), RightUnits) => a.re(),
            (HrRule::LeftConstant(a), LeftUnits) => a.re(),
            (HrRule::LeftConstant(a), RightUnits) => a,
            (HrRule::ConjugateLeftConstant(a), LeftUnits) => -a.conj() / 2.0,
            (HrRule::ConjugateLeftConstant(a), RightUnits) => -a / 2.0,
        }
    }
}

/// Real partials `(∂f/∂q_r, ∂f/∂q_i, ∂f/∂q_j, ∂f/∂q_k)` by central differences.
///
/// Exact up to rounding for affine `f` with any step.
pub fn real_partials<F>(f: F, q: Quaternion, step: f64) -> [Quaternion; 4]
where
    F: Fn(Quaternion) -> Quaternion,
{
    let basis = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
    basis.map(|e| (f(q + e * step) - f(q - e * step)) / (2.0 * step))
}

/// HR derivative assembled from finite-difference real partials.
pub fn hr_derivative_fd<F>(f: F, q: Quaternion, step: f64, convention: HrConvention) -> Quaternion
where
    F: Fn(Quaternion) -> Quaternion,
{
    let [dr, di, dj, dk] = real_partials(f, q, step);
    let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
    let sum = match convention {
        HrConvention::LeftUnits => dr - i * di - j * dj - k * dk,
        HrConvention::RightUnits => dr - di * i - dj * j - dk * k,
    };
    sum / 4.0
}
