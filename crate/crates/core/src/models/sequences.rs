//! Closed-form positive and negative sequence quaternions from known
//! scenario parameters.
//!
//! With `q = Γ_I cos θ + Γ_Q sin θ` and `γ = Γ_Q × Γ_I / |Γ_Q × Γ_I|`,
//! `q = c⁺ e^{γθ} + c⁻ e^{−γθ}` where `c^± = (Γ_I ∓ Γ_Q × γ)/2`.

use crate::error::{Error, Result};
use crate::quaternion::Quaternion;
use crate::signal::{TruthSample, PHASE_OFFSETS};

/// In-phase and quadrature envelopes `(Γ_I, Γ_Q)`.
pub fn envelopes(amplitudes: [f64; 3], phases: [f64; 3]) -> (Quaternion, Quaternion) {
    let shifted: [f64; 3] = std::array::from_fn(|x| phases[x] + PHASE_OFFSETS[x]);
    let gi: [f64; 3] = std::array::from_fn(|x| amplitudes[x] * shifted[x].sin());
    let gq: [f64; 3] = std::array::from_fn(|x| amplitudes[x] * shifted[x].cos());
    (
        Quaternion::pure(gi[0], gi[1], gi[2]),
        Quaternion::pure(gq[0], gq[1], gq[2]),
    )
}

/// Unit normal `Γ_Q × Γ_I / |Γ_Q × Γ_I|` to the plane traced by `q`.
pub fn sequence_axis(gamma_i: Quaternion, gamma_q: Quaternion) -> Result<Quaternion> {
    let n = gamma_q.cross_im(gamma_i);
    let scale = gamma_i.norm() * gamma_q.norm();
    if n.norm() <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::UndefinedAxis);
    }
    Ok(n / n.norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceCoefficients {
    pub gamma: Quaternion,
    pub c_pos: Quaternion,
    pub c_neg: Quaternion,
}

impl SequenceCoefficients {
    pub fn new(amplitudes: [f64; 3], phases: [f64; 3]) -> Result<Self> {
        let (gi, gq) = envelopes(amplitudes, phases);
        let gamma = sequence_axis(gi, gq)?;
        let rot = gq.cross_im(gamma);
        Ok(Self {
            gamma,
            c_pos: (gi - rot) * 0.5,
            c_neg: (gi + rot) * 0.5,
        })
    }

    /// `(q⁺, q⁻)` at accumulated phase `theta`.
    pub fn at(&self, theta: f64) -> (Quaternion, Quaternion) {
        let e = (self.gamma * theta).exp();
        (self.c_pos * e, self.c_neg * e.conj())
    }

    /// `|q⁺|² − |q⁻|²`, equal to `|Γ_Q × Γ_I|`.
    pub fn sequence_imbalance(&self) -> f64 {
        self.c_pos.norm_sqr() - self.c_neg.norm_sqr()
    }
}

/// Ground-truth `(q⁺, q⁻)` for every sample.
pub fn decompose_sequences(truth: &[TruthSample]) -> Result<Vec<(Quaternion, Quaternion)>> {
    let mut cache: Option<([f64; 3], [f64; 3], SequenceCoefficients)> = None;
    truth
        .iter()
        .map(|s| {
            let coeffs = match cache {
                Some((a, p, c)) if a == s.amplitudes && p == s.phases => c,
                _ => {
                    let c = SequenceCoefficients::new(s.amplitudes, s.phases)?;
                    cache = Some((s.amplitudes, s.phases, c));
                    c
                }
            };
            Ok(coeffs.at(s.theta))
        })
        .collect()
}
