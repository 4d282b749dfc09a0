//! Fixed numerical tolerances used across the crate.
//!
//! These are deliberately not user-tunable so that results are reproducible
//! bit-for-bit across runs with the same inputs.

/// Comparison tolerance for floating-point assertions and invariant checks.
pub const CMP_TOL: f64 = 1e-10;

/// Target accuracy of scalar root solves (curvature inversion, bound
/// inversion).
pub const SOLVE_TOL: f64 = 1e-12;

/// Default Newton tolerance on the max curvature residual of a graph solve.
pub const NEWTON_TOL: f64 = 1e-9;

/// Chart step used when differentiating the Kulkarni-Pinkall foot-point map.
pub const FOOT_STEP: f64 = 1e-5;
