//! Per-phase voltage phasors relative to phase a, recovered from the raw
//! quaternion signal and the Q-SS state.
//!
//! With `φ_a = 0`, low-pass filtering `2 q v_a` leaves `V_a Γ_Q`, whose
//! i-component is `V_a²`. The plane normal `Γ_Q × Γ_I` has j and k
//! components `−V_a Γ_I,c` and `V_a Γ_I,b`.
//!
//! The rotation axis of the Q-SS state is not identifiable: any unit `γ`
//! admits sequence quaternions reproducing the signal, and
//! `|q⁺|² − |q⁻|² = ⟨Γ_Q × Γ_I, γ⟩`. The normal is therefore taken from the
//! quadrature signal `(q⁺ − q⁻)γ = dq/dθ`, which does not depend on `γ`:
//! `Γ_Q × Γ_I = Im((q⁺ − q⁻)γ) × (q⁺ + q⁻)`. When `γ` is the plane normal
//! this reduces to `(|q⁺|² − |q⁻|²) γ`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::models::QssState;
use crate::quaternion::Quaternion;
use crate::signal::{ThreePhaseFrame, PHASE_OFFSETS};

/// Normalizations below this are rejected.
pub const MIN_NORMALIZATION: f64 = 1e-12;

/// Cascade of identical first-order smoothers `y ← (1 − α) y + α u`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowPassFilter {
    alpha: f64,
    y: Vec<Quaternion>,
}

impl LowPassFilter {
    pub const DEFAULT_CUTOFF_HZ: f64 = 10.0;
    pub const DEFAULT_STAGES: usize = 2;

    pub fn new(alpha: f64, stages: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) || stages == 0 {
            return Err(Error::InvalidSpec(format!(
                "low-pass filter needs alpha in (0, 1] and at least one stage, got alpha = {alpha}, stages = {stages}"
            )));
        }
        Ok(Self {
            alpha,
            y: vec![Quaternion::ZERO; stages],
        })
    }

    /// `α = 1 − e^{−2π f_c / f_s}`.
    pub fn from_cutoff(cutoff_hz: f64, fs: f64, stages: usize) -> Result<Self> {
        Self::new(1.0 - (-TAU * cutoff_hz / fs).exp(), stages)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn stages(&self) -> usize {
        self.y.len()
    }

    pub fn output(&self) -> Quaternion {
        *self.y.last().unwrap()
    }

    pub fn step(&mut self, u: Quaternion) -> Quaternion {
        let mut input = u;
        for y in &mut self.y {
            *y = *y * (1.0 - self.alpha) + input * self.alpha;
            input = *y;
        }
        input
    }

    /// `|H(e^{jω})|` at `freq_hz`.
    pub fn magnitude_response(&self, freq_hz: f64, fs: f64) -> f64 {
        let w = TAU * freq_hz / fs;
        let b = 1.0 - self.alpha;
        let denom = (1.0 - 2.0 * b * w.cos() + b * b).sqrt();
        (self.alpha / denom).powi(self.y.len() as i32)
    }
}

/// [`LowPassFilter::step`] as a free function.
pub fn lpf_step(filter: &mut LowPassFilter, u: Quaternion) -> Quaternion {
    filter.step(u)
}

/// `Γ̂_Q = h / √Im_i(h)` for the filtered product `h = LPF(2 q v_a)`.
pub fn gamma_q_estimate(h_lpf: Quaternion) -> Result<Quaternion> {
    let norm = normalization(h_lpf)?;
    Ok(h_lpf / norm)
}

fn normalization(h_lpf: Quaternion) -> Result<f64> {
    if h_lpf.xi.is_nan() || h_lpf.xi <= MIN_NORMALIZATION {
        return Err(Error::InvalidNormalization(h_lpf.xi));
    }
    Ok(h_lpf.xi.sqrt())
}

/// Plane normal `Γ_Q × Γ_I` from the sequence states and the rotation axis
/// `gamma_hat` (need not be unit).
///
/// Swapping the roles of `q⁺` and `q⁻` together with the sign of the axis
/// leaves the result unchanged.
pub fn sequence_normal(q_pos: Quaternion, q_neg: Quaternion, gamma_hat: Quaternion) -> Result<Quaternion> {
    let n = gamma_hat.im_norm();
    if n < MIN_NORMALIZATION {
        return Err(Error::DegenerateAxis);
    }
    let quadrature = ((q_pos - q_neg) * (gamma_hat.im() / n)).im();
    Ok(quadrature.cross_im(q_pos + q_neg))
}

/// `Γ̂_I` from a plane normal and the filtered product `h`.
pub fn gamma_i_from_normal(normal: Quaternion, h_lpf: Quaternion) -> Result<Quaternion> {
    let norm = normalization(h_lpf)?;
    Ok(Quaternion::pure(0.0, normal.xk, -normal.xj) / norm)
}

/// `Γ̂_I` from the sequence states, the estimated rotation axis and the
/// filtered product `h`. Its i-component is zero because `φ_a = 0`.
pub fn gamma_i_estimate(
    q_pos: Quaternion,
    q_neg: Quaternion,
    gamma_hat: Quaternion,
    h_lpf: Quaternion,
) -> Result<Quaternion> {
    gamma_i_from_normal(sequence_normal(q_pos, q_neg, gamma_hat)?, h_lpf)
}

fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Phasor components and polar form for phases a, b and c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasorSet {
    /// Components of `Γ_Q`.
    pub re: [f64; 3],
    /// Components of `Γ_I`.
    pub im: [f64; 3],
    pub amplitude: [f64; 3],
    /// Phase shift relative to phase a, radians in `(−π, π]`.
    pub angle: [f64; 3],
}

impl PhasorSet {
    /// Instantaneous voltages at accumulated phase `theta`.
    pub fn voltages(&self, theta: f64) -> [f64; 3] {
        std::array::from_fn(|x| {
            self.amplitude[x] * (theta + self.angle[x] + PHASE_OFFSETS[x]).sin()
        })
    }
}

/// Polar phasors from the envelopes.
pub fn phasors(gamma_q: Quaternion, gamma_i: Quaternion) -> PhasorSet {
    let re = [gamma_q.xi, gamma_q.xj, gamma_q.xk];
    let im = [0.0, gamma_i.xj, gamma_i.xk];
    let mut amplitude = [re[0], 0.0, 0.0];
    let mut angle = [0.0; 3];
    for x in 1..3 {
        amplitude[x] = re[x].hypot(im[x]);
        angle[x] = wrap_angle(im[x].atan2(re[x]) - PHASE_OFFSETS[x]);
    }
    PhasorSet { re, im, amplitude, angle }
}

/// Accumulated phase `θ` that best explains `q ≈ Γ_I cos θ + Γ_Q sin θ` in
/// the least-squares sense.
pub fn phase_estimate(q: Quaternion, gamma_i: Quaternion, gamma_q: Quaternion) -> f64 {
    let (a, b, c) = (gamma_i.dot_im(gamma_i), gamma_i.dot_im(gamma_q), gamma_q.dot_im(gamma_q));
    let (u, v) = (gamma_i.dot_im(q), gamma_q.dot_im(q));
    let det = a * c - b * b;
    let (cos, sin) = if det.abs() > MIN_NORMALIZATION {
        ((c * u - b * v) / det, (a * v - b * u) / det)
    } else {
        (u, v)
    };
    sin.atan2(cos)
}

/// One step of phasor recovery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasorEstimate {
    pub gamma_q: Quaternion,
    pub gamma_i: Quaternion,
    pub phasors: PhasorSet,
    /// Reconstructed `(v_a, v_b, v_c)`.
    pub reconstruction: [f64; 3],
}

/// Streams phasor estimates alongside a Q-SS estimator. The plane normal
/// is smoothed by a copy of the product filter.
#[derive(Debug, Clone)]
pub struct PhasorTracker {
    lpf: LowPassFilter,
    normal_lpf: LowPassFilter,
}

impl PhasorTracker {
    pub fn new(lpf: LowPassFilter) -> Self {
        Self {
            normal_lpf: lpf.clone(),
            lpf,
        }
    }

    /// Default 10 Hz two-stage filter at sampling rate `fs`.
    pub fn with_defaults(fs: f64) -> Result<Self> {
        Ok(Self::new(LowPassFilter::from_cutoff(
            LowPassFilter::DEFAULT_CUTOFF_HZ,
            fs,
            LowPassFilter::DEFAULT_STAGES,
        )?))
    }

    pub fn filter(&self) -> &LowPassFilter {
        &self.lpf
    }

    /// Feeds `frame` and the Q-SS state after the same frame. The filters
    /// always advance; errors report that no estimate is available yet.
    pub fn step(&mut self, frame: &ThreePhaseFrame, qss: &QssState) -> Result<PhasorEstimate> {
        let q = frame.to_quaternion();
        let h = self.lpf.step(q * (2.0 * frame.va));
        let normal = self
            .normal_lpf
            .step(sequence_normal(qss.q_pos, qss.q_neg, qss.phi).unwrap_or(Quaternion::ZERO));
        let gamma_q = gamma_q_estimate(h)?;
        let gamma_i = gamma_i_from_normal(normal, h)?;
        let phasors = phasors(gamma_q, gamma_i);
        let theta = phase_estimate(qss.q_pos + qss.q_neg, gamma_i, gamma_q);
        Ok(PhasorEstimate {
            gamma_q,
            gamma_i,
            phasors,
            reconstruction: phasors.voltages(theta),
        })
    }
}
