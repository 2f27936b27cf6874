//! Hermitian doubling of a general operator and the residual checks showing
//! that the p→q norm of a completely positive map does not grow when
//! non-Hermitian inputs are admitted.
//!
//! For a square `A` the doubled operator is `Q = [[0, A], [A*, 0]]`. With
//! `U` the polar unitary of `A`, `|Q| = (U|A|U*) ⊕ |A|`. Applying `Φ ⊗ 1₂`
//! block-wise, the chain checked by [`verify_proof_chain`] is
//!
//! ```text
//! 2 Tr|Φ(A)|^q = ‖(Φ⊗1₂)(Q)‖_q^q
//!              ≤ ‖(Φ⊗1₂)(|Q|)‖_q^q = Tr Φ(U|A|U*)^q + Tr Φ(|A|)^q
//!              ≤ 2 ‖Φ‖_{p→q}^q          (for ‖A‖_p = 1)
//! ```
//!
//! where the first inequality is the Amosov–Holevo bound
//! `‖Ω(X)‖_q ≤ ‖Ω(|X|)‖_q` for completely positive `Ω` and Hermitian `X`.

use crate::channel::{Extended2, LinearMap};
use crate::eig::hermitian_eig;
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::schatten::{schatten_norm, trace_abs_power, SchattenExponent};
use crate::svd::{matrix_abs, polar_unitary};
use crate::tol;

/// Relative tolerance for the two trace identities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Elementwise tolerance for the block formula of `|Q|`.
pub const ABS_BLOCK_TOL: f64 = 1e-10;
/// Allowed negativity of inequality margins.
pub const MARGIN_TOL: f64 = 1e-10;
/// Tolerance on `‖A‖_p = ‖|A|‖_p = ‖U|A|U*‖_p = 1` after normalisation.
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// `Q = [[0, A], [A*, 0]]` together with `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubledOperator {
    pub base: ComplexMatrix,
    pub assembled: ComplexMatrix,
}

pub fn build_doubled(a: &ComplexMatrix) -> Result<DoubledOperator> {
    let d = a.ensure_square()?;
    let zero = ComplexMatrix::zeros(d, d);
    let assembled = ComplexMatrix::block2x2(&zero, a, &a.adjoint(), &zero)?;
    Ok(DoubledOperator {
        base: a.clone(),
        assembled,
    })
}

/// `|Q|` from the block formula `(U|A|U*) ⊕ |A|`.
pub fn abs_doubled(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let abs = matrix_abs(a)?;
    let u = polar_unitary(a)?;
    let rotated = &(&u * &abs) * &u.adjoint();
    Ok(rotated.direct_sum(&abs))
}

/// Two evaluations of the same quantity by independent routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TracePair {
    pub computed: f64,
    pub reference: f64,
}

impl TracePair {
    pub fn relative_gap(&self) -> f64 {
        let scale = self.computed.abs().max(self.reference.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.computed - self.reference).abs() / scale
        }
    }
}

fn finite_q(q: f64) -> Result<f64> {
    SchattenExponent::new(q)?;
    if q.is_finite() {
        Ok(q)
    } else {
        Err(Error::InvalidExponent(q))
    }
}

/// `(‖(Φ⊗1₂)(Q)‖_q^q, 2 Tr|Φ(A)|^q)`.
pub fn doubled_output_trace<M: LinearMap>(map: &M, a: &ComplexMatrix, q: f64) -> Result<TracePair> {
    let q = finite_q(q)?;
    a.ensure_shape(map.input_dim(), map.input_dim())?;
    let doubled = build_doubled(a)?;
    let out = Extended2(map).apply(&doubled.assembled)?;
    let computed = schatten_norm(&out, SchattenExponent::Finite(q))?.powf(q);
    let reference = 2.0 * schatten_norm(&map.apply(a)?, SchattenExponent::Finite(q))?.powf(q);
    Ok(TracePair { computed, reference })
}

/// Result of [`doubled_abs_output_trace`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AbsOutputSplit {
    /// `‖(Φ⊗1₂)(|Q|)‖_q^q` against `Tr Φ(U|A|U*)^q + Tr Φ(|A|)^q`.
    pub pair: TracePair,
    pub rotated_term: f64,
    pub abs_term: f64,
    /// Smallest eigenvalue of `(Φ⊗1₂)(|Q|)`; non-negative for CP maps.
    pub min_eigenvalue: f64,
}

/// `‖(Φ⊗1₂)(|Q|)‖_q^q` and its block split. The trace terms are evaluated as
/// `Σ |λ_i|^q`, which equals `Tr X^q` whenever the map is positive; check
/// `min_eigenvalue` before relying on that.
pub fn doubled_abs_output_trace<M: LinearMap>(map: &M, a: &ComplexMatrix, q: f64) -> Result<AbsOutputSplit> {
    let q = finite_q(q)?;
    a.ensure_shape(map.input_dim(), map.input_dim())?;
    let abs_q = abs_doubled(a)?;
    let out = Extended2(map).apply(&abs_q)?;
    let computed = schatten_norm(&out, SchattenExponent::Finite(q))?.powf(q);
    let min_eigenvalue = hermitian_eig(&out)?.min_eigenvalue();

    let d = a.rows();
    let rotated = abs_q.block(0, 0, d, d);
    let abs = abs_q.block(d, d, d, d);
    let rotated_term = trace_abs_power(&map.apply(&rotated)?, q)?;
    let abs_term = trace_abs_power(&map.apply(&abs)?, q)?;
    Ok(AbsOutputSplit {
        pair: TracePair {
            computed,
            reference: rotated_term + abs_term,
        },
        rotated_term,
        abs_term,
        min_eigenvalue,
    })
}

/// `‖Ω(|X|)‖_q − ‖Ω(X)‖_q` for Hermitian `X`; non-negative for CP `Ω`.
pub fn amosov_holevo_check<M: LinearMap>(omega: &M, x: &ComplexMatrix, q: SchattenExponent) -> Result<f64> {
    x.ensure_square()?;
    let deviation = x.hermitian_deviation();
    if deviation > tol::HERMITIAN * (1.0 + x.max_abs()) {
        return Err(Error::NotHermitian { deviation });
    }
    let e = hermitian_eig(x)?;
    let scale = e.eigenvalues.iter().fold(1.0_f64, |m, l| m.max(l.abs()));
    let abs = if e.min_eigenvalue() >= -tol::PSD_CLIP * scale {
        x.clone()
    } else {
        e.reconstruct_with(f64::abs)
    };
    let lhs = schatten_norm(&omega.apply(x)?, q)?;
    let rhs = schatten_norm(&omega.apply(&abs)?, q)?;
    Ok(rhs - lhs)
}

/// Pass/fail per step of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainSteps {
    pub doubling_identity: bool,
    pub abs_block: bool,
    pub abs_output_split: bool,
    pub positivity: bool,
    pub amosov_holevo: bool,
    pub unit_norm: bool,
    pub final_bound: bool,
}

impl ChainSteps {
    pub fn all(&self) -> bool {
        self.doubling_identity
            && self.abs_block
            && self.abs_output_split
            && self.positivity
            && self.amosov_holevo
            && self.unit_norm
            && self.final_bound
    }
}

/// Residuals and margins of every link in the chain for one `(Φ, A, p, q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProofChainReport {
    pub p: SchattenExponent,
    pub q: f64,
    /// `‖A‖_p` before normalisation.
    pub input_norm: f64,
    pub norm_pq_ref: f64,
    /// Step (i): `‖(Φ⊗1₂)(Q)‖_q^q` against `2 Tr|Φ(A)|^q`.
    pub lhs_doubling_identity: TracePair,
    /// Step (ii): `max |abs_doubled(A) − |Q||`.
    pub abs_block_residual: f64,
    /// `‖(Φ⊗1₂)(|Q|)‖_q^q` against `Tr Φ(U|A|U*)^q + Tr Φ(|A|)^q`.
    pub abs_output_split: TracePair,
    pub positivity_margin: f64,
    /// Step (iii): `‖(Φ⊗1₂)(|Q|)‖_q − ‖(Φ⊗1₂)(Q)‖_q`.
    pub ah_margin: f64,
    /// `Tr Φ(U|A|U*)^q + Tr Φ(|A|)^q − 2 Tr|Φ(A)|^q`.
    pub chain_slack: f64,
    pub unit_norm_residual: f64,
    /// Step (iv): `min(ref^q − Tr Φ(U|A|U*)^q, ref^q − Tr Φ(|A|)^q)`.
    pub final_margin: f64,
    /// `ref − ‖Φ(A)‖_q / ‖A‖_p`.
    pub bound_margin: f64,
    pub steps: ChainSteps,
}

impl ProofChainReport {
    pub fn passed(&self) -> bool {
        self.steps.all()
    }
}

/// Normalizes `A` to unit p-norm and evaluates every identity and inequality
/// of the doubling argument. `norm_pq_ref` is the Hermitian p→q norm of the
/// map (solver output or a closed form).
pub fn verify_proof_chain<M: LinearMap>(
    map: &M,
    a: &ComplexMatrix,
    p: SchattenExponent,
    q: f64,
    norm_pq_ref: f64,
) -> Result<ProofChainReport> {
    let q = finite_q(q)?;
    let qe = SchattenExponent::Finite(q);
    if !(norm_pq_ref >= 0.0) || !norm_pq_ref.is_finite() {
        return Err(Error::InvalidParameter {
            name: "norm_pq_ref",
            value: norm_pq_ref,
        });
    }
    a.ensure_shape(map.input_dim(), map.input_dim())?;
    let input_norm = schatten_norm(a, p)?;
    if input_norm == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let a = a.scale_real(1.0 / input_norm);

    let lhs = doubled_output_trace(map, &a, q)?;

    let doubled = build_doubled(&a)?;
    let abs_q = abs_doubled(&a)?;
    let abs_block_residual = (&abs_q - &matrix_abs(&doubled.assembled)?).max_abs();

    let split = doubled_abs_output_trace(map, &a, q)?;
    let ah_margin = amosov_holevo_check(&Extended2(map), &doubled.assembled, qe)?;
    let chain_slack = split.pair.reference - lhs.reference;

    let d = a.rows();
    let unit_norm_residual = [
        schatten_norm(&a, p)?,
        schatten_norm(&abs_q.block(0, 0, d, d), p)?,
        schatten_norm(&abs_q.block(d, d, d, d), p)?,
    ]
    .iter()
    .fold(0.0_f64, |m, n| m.max((n - 1.0).abs()));

    let ref_q = norm_pq_ref.powf(q);
    let final_margin = (ref_q - split.rotated_term).min(ref_q - split.abs_term);
    let bound_margin = norm_pq_ref - schatten_norm(&map.apply(&a)?, qe)?;

    let scale = 1.0 + ref_q.max(lhs.reference);
    let steps = ChainSteps {
        doubling_identity: lhs.relative_gap() <= IDENTITY_TOL,
        abs_block: abs_block_residual <= ABS_BLOCK_TOL,
        abs_output_split: split.pair.relative_gap() <= IDENTITY_TOL,
        positivity: split.min_eigenvalue >= -MARGIN_TOL,
        amosov_holevo: ah_margin >= -MARGIN_TOL && chain_slack >= -MARGIN_TOL * scale,
        unit_norm: unit_norm_residual <= UNIT_NORM_TOL,
        final_bound: final_margin >= -MARGIN_TOL * scale && bound_margin >= -MARGIN_TOL * (1.0 + norm_pq_ref),
    };
    Ok(ProofChainReport {
        p,
        q,
        input_norm,
        norm_pq_ref,
        lhs_doubling_identity: lhs,
        abs_block_residual,
        abs_output_split: split.pair,
        positivity_margin: split.min_eigenvalue,
        ah_margin,
        chain_slack,
        unit_norm_residual,
        final_margin,
        bound_margin,
        steps,
    })
}
