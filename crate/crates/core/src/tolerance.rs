//! Numerical thresholds. Every problem in this crate is at most 8x8, so double
//! precision leaves several digits of headroom below each of these.

/// Normalization, unitarity and hermiticity checks.
pub const EPS_NORM: f64 = 1e-12;
/// Eigenvalue positivity and Bloch-length checks.
pub const EPS_EIG: f64 = 1e-10;
/// Matrix/angle reconstruction checks.
pub const EPS_MATCH: f64 = 1e-10;

/// Amplitudes with modulus below this are treated as exactly zero.
pub const ZERO_AMPLITUDE: f64 = 1e-14;

/// `sin(theta/2)` or `cos(theta/2)` below this is a ZYZ gimbal point.
pub const GIMBAL: f64 = 1e-12;

/// `|lambda0 - lambda1|` below this marks a maximally entangled pair.
pub const MAXIMAL_GAP: f64 = 1e-9;

/// Along trajectories the degeneracy band is entered below this gap ...
pub const TRAJECTORY_MAXIMAL_ENTER: f64 = 1e-6;
/// ... and left only above this one.
pub const TRAJECTORY_MAXIMAL_EXIT: f64 = 1e-5;

/// Residual `|001>,|010>,|011>` weight tolerated after the rank-1 reduction.
pub const GSD_CLEANUP: f64 = 1e-9;

/// Coefficients of the determinant quadratic below this count as zero.
pub const QUADRATIC_ZERO: f64 = 1e-12;

/// Generalized Schmidt coefficients below this are set to exactly zero.
pub const GSD_LAMBDA_ZERO: f64 = 1e-12;

/// Second singular value below this marks a product cut in rank tests.
pub const RANK_ONE: f64 = 1e-9;

/// Tolerance on `|z| - 1` when accepting an inverse-reconstruction root.
pub const INVERT_UNIMODULAR: f64 = 1e-6;
