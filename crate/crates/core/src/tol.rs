//! Numerical tolerances shared across the crate.

/// Allowed `max |M - M*|` (relative to `1 + max |M_ij|`) before an input is
/// rejected as non-Hermitian.
pub const HERMITIAN: f64 = 1e-9;

/// Negative eigenvalues of a nominally PSD matrix with magnitude up to this
/// (relative to `max(1, max |λ|)`) are clipped to zero; larger ones are errors.
pub const PSD_CLIP: f64 = 1e-10;

/// Singular values below `RANK * σ_max` are treated as zero.
pub const RANK: f64 = 1e-12;

/// Jacobi sweeps stop once `‖offdiag‖_F < JACOBI * ‖diag‖_F`.
pub const JACOBI: f64 = 1e-14;

/// Minimum Choi eigenvalue accepted as completely positive.
pub const CP: f64 = -1e-10;
