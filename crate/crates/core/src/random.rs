//! Seeded random matrices for multi-start initialisation and test instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{ComplexMatrix, C64};
use crate::svd::polar_unitary;

pub type SolverRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SolverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with independent standard normal real and imaginary parts.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn gaussian_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    gaussian_matrix(rng, n, n)
        .hermitian_part()
        .expect("square by construction")
}

/// Wishart-type PSD matrix `G G*` with `rank` columns in `G`.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, rank.max(1));
    &g * &g.adjoint()
}

/// Unit-trace PSD matrix.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let p = random_psd(rng, n, rank);
    let t = p.trace().re;
    p.scale_real(1.0 / t)
}

/// Haar-distributed unitary via the polar factor of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    polar_unitary(&gaussian_matrix(rng, n, n)).expect("square by construction")
}

/// Rank-deficient square matrix `G₁ G₂*` with inner dimension `rank`.
pub fn random_low_rank<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> ComplexMatrix {
    let a = gaussian_matrix(rng, n, rank.max(1));
    let b = gaussian_matrix(rng, rank.max(1), n);
    &a * &b
}
