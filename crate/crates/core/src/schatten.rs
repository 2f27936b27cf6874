//! Schatten norms and trace-power functionals.

use core::fmt;

use crate::eig::hermitian_eig;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::svd::{clip_psd_spectrum, singular_values};
use crate::tol;

/// Schatten exponent `q ∈ [1, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SchattenExponent {
    Finite(f64),
    Infinity,
}

impl SchattenExponent {
    /// Accepts any `q ≥ 1`; `f64::INFINITY` maps to [`SchattenExponent::Infinity`].
    pub fn new(q: f64) -> Result<Self> {
        if q == f64::INFINITY {
            Ok(Self::Infinity)
        } else if q >= 1.0 && q.is_finite() {
            Ok(Self::Finite(q))
        } else {
            Err(Error::InvalidExponent(q))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Self::Finite(q) => q,
            Self::Infinity => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Self::Infinity)
    }

    /// Hölder conjugate `q*` with `1/q + 1/q* = 1`.
    pub fn conjugate(self) -> Self {
        match self {
            Self::Infinity => Self::Finite(1.0),
            Self::Finite(1.0) => Self::Infinity,
            Self::Finite(q) => Self::Finite(q / (q - 1.0)),
        }
    }
}

impl fmt::Display for SchattenExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(q) => write!(f, "{q}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

impl TryFrom<f64> for SchattenExponent {
    type Error = Error;

    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

/// `(Σ σ_i^q)^{1/q}` over a list of non-negative values (descending or not).
///
/// Values below `tol::RANK · max` are dropped and the sum is rescaled by the
/// maximum to avoid overflow at large `q`.
pub fn norm_of_values(values: &[f64], q: SchattenExponent) -> f64 {
    let max = values.iter().fold(0.0_f64, |m, &s| m.max(s.abs()));
    if max == 0.0 {
        return 0.0;
    }
    match q {
        SchattenExponent::Infinity => max,
        SchattenExponent::Finite(q) => {
            let cut = tol::RANK * max;
            let sum: f64 = values
                .iter()
                .map(|s| s.abs())
                .filter(|&s| s > cut)
                .map(|s| (s / max).powf(q))
                .sum();
            max * sum.powf(1.0 / q)
        }
    }
}

/// `Σ σ_i^q` for finite `q`, with the same small-value cut as [`norm_of_values`].
pub fn power_sum_of_values(values: &[f64], q: f64) -> f64 {
    let max = values.iter().fold(0.0_f64, |m, &s| m.max(s.abs()));
    if max == 0.0 {
        return 0.0;
    }
    let cut = tol::RANK * max;
    values
        .iter()
        .map(|s| s.abs())
        .filter(|&s| s > cut)
        .map(|s| s.powf(q))
        .sum()
}

/// Schatten q-norm `‖A‖_q = (Tr |A|^q)^{1/q}`; `q = ∞` gives the largest
/// singular value.
pub fn schatten_norm(a: &ComplexMatrix, q: SchattenExponent) -> Result<f64> {
    Ok(norm_of_values(&singular_values(a)?, q))
}

/// `Tr X^q` for PSD `X`; roundoff negativity is clipped.
pub fn trace_power(x: &ComplexMatrix, q: f64) -> Result<f64> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(Error::InvalidExponent(q));
    }
    let mut e = hermitian_eig(x)?;
    clip_psd_spectrum(&mut e.eigenvalues)?;
    Ok(power_sum_of_values(&e.eigenvalues, q))
}

/// `Tr |X|^q = Σ |λ_i|^q` for Hermitian `X`, with no positivity requirement.
pub fn trace_abs_power(x: &ComplexMatrix, q: f64) -> Result<f64> {
    let e = hermitian_eig(x)?;
    Ok(power_sum_of_values(&e.eigenvalues, q))
}
