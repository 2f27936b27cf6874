//! Schatten p→q norms and maximal output purity of completely positive maps.
//!
//! With default features disabled the crate is `no_std` and only needs
//! `alloc`. It provides:
//!
//! - [`matrix`], [`eig`], [`svd`]: dense complex linear algebra at small
//!   dimension (cyclic Jacobi eigensolver, one-sided Jacobi SVD, matrix
//!   absolute value, polar unitary, fractional powers of PSD matrices).
//! - [`schatten`]: Schatten q-norms and trace-power functionals.
//! - [`channel`]: completely positive maps in Kraus form, Choi certificates,
//!   the `Φ ⊗ 1₂` extension and a handful of channel families.
//! - [`doubling`]: the Hermitian doubling `Q = [[0, A], [A*, 0]]` of a general
//!   operator and the residual checks tying the Hermitian and general p→q
//!   norms together.
//! - [`solver`]: multi-start ascent for `max ‖Φ(A)‖_q / ‖A‖_p` over Hermitian,
//!   general and density-matrix inputs, plus a sampling oracle.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > y)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod channel;
pub mod doubling;
pub mod eig;
pub mod error;
pub mod matrix;
pub mod random;
pub mod schatten;
pub mod solver;
pub mod svd;
pub mod tol;

pub use channel::{Channel, ChannelFamily, ChannelSpec, CpCertificate, KrausMap, LinearMap, TransposeMap};
pub use doubling::{DoubledOperator, ProofChainReport};
pub use eig::{hermitian_eig, HermitianEigen};
pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, C64};
pub use schatten::{schatten_norm, trace_power, SchattenExponent};
pub use solver::{norm_pq, InputClass, NormEstimate, SolverOptions};
pub use svd::{matrix_abs, polar_unitary, psd_power, svd, Svd};
