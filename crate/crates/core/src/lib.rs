//! Three-phase grid frequency estimation with complex and quaternion
//! Kalman filters.
//!
//! * [`quaternion`]: Hamilton quaternions, involutions, polar forms and
//!   HR-calculus derivative rules.
//! * [`complex`]: Clarke transform and augmented complex vectors.
//! * [`matrix`]: dense matrices over ℂ and ℍ with real-embedding numerics.
//! * [`ekf`]: the generic extended Kalman recursion.
//! * [`models`]: L-SS, WL-SS and Q-SS state-space models and estimators.
//! * [`phasor`]: voltage phasors relative to phase a.
//! * [`signal`]: scenario synthesis, noise and CSV I/O.

pub mod complex;
pub mod ekf;
pub mod error;
pub mod matrix;
pub mod models;
pub mod phasor;
pub mod quaternion;
pub mod signal;

pub use complex::{AugCplxVec, Cplx};
pub use ekf::{EstimatorState, StateModel};
pub use error::{Error, Result};
pub use matrix::{CplxMatrix, Mat, QuatMatrix, Scalar};
pub use models::{build_estimator, EstimatorKind, FrequencyEstimator, Tuning};
pub use phasor::{LowPassFilter, PhasorSet, PhasorTracker};
pub use quaternion::hr::HrConvention;
pub use quaternion::{Axis, Quaternion};
pub use signal::{ScenarioSpec, ThreePhaseFrame};
