//! Singular value decomposition and the functions built on it: matrix absolute
//! value, polar unitary, and powers of PSD matrices.

use alloc::vec::Vec;

use crate::eig::{hermitian_eig, jacobi_rotation, rotate_columns};
#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ZERO};
use crate::tol;

const MAX_SWEEPS: usize = 100;
const ORTHO_TOL: f64 = 1e-15;

/// `A = left · diag(values) · right*`, singular values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub left: ComplexMatrix,
    pub values: Vec<f64>,
    pub right: ComplexMatrix,
}

impl Svd {
    pub fn max_value(&self) -> f64 {
        self.values[0]
    }

    /// Number of singular values above `tol::RANK · σ_max`.
    pub fn rank(&self) -> usize {
        let cut = tol::RANK * self.max_value();
        self.values.iter().filter(|&&s| s > cut && s > 0.0).count()
    }

    /// `left · diag(f(σ)) · right*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let (u, v) = (&self.left, &self.right);
        let n = u.rows();
        let w: Vec<f64> = self.values.iter().map(|&s| f(s)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| u[(i, k)] * v[(j, k)].conj() * w[k]).sum())
    }
}

fn column_norm_sqr(m: &ComplexMatrix, j: usize) -> f64 {
    (0..m.rows()).map(|i| m[(i, j)].norm_sqr()).sum()
}

fn column_inner(m: &ComplexMatrix, i: usize, j: usize) -> C64 {
    (0..m.rows()).map(|k| m[(k, i)].conj() * m[(k, j)]).sum()
}

/// Orthonormalizes `v` against `basis` (two Gram–Schmidt passes); returns the
/// residual norm before normalisation.
fn orthonormalize(v: &mut [C64], basis: &[Vec<C64>]) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let proj: C64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
            for (y, x) in v.iter_mut().zip(b) {
                *y -= proj * x;
            }
        }
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
    norm
}

/// SVD of a square matrix by one-sided (Hestenes) Jacobi.
///
/// Left singular vectors for singular values below `tol::RANK · σ_max` are
/// completed from the standard basis by Gram–Schmidt; this fixes the
/// completion used by [`polar_unitary`] on singular input.
pub fn svd(a: &ComplexMatrix) -> Result<Svd> {
    let n = a.ensure_square()?;
    let mut u = a.clone();
    let mut v = ComplexMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = column_norm_sqr(&u, p);
                let beta = column_norm_sqr(&u, q);
                let gamma = column_inner(&u, p, q);
                if gamma.norm() <= ORTHO_TOL * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let g = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut u, p, q, &g);
                rotate_columns(&mut v, p, q, &g);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| column_norm_sqr(&u, j).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let values: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let cut = tol::RANK * values[0];

    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(n);
    for &k in &order {
        if norms[k] > cut && norms[k] > 0.0 {
            let mut col: Vec<C64> = u.column(k).iter().map(|z| z / norms[k]).collect();
            orthonormalize(&mut col, &basis);
            basis.push(col);
        }
    }
    while basis.len() < n {
        let best = (0..n)
            .map(|e| {
                let mut col = alloc::vec![ZERO; n];
                col[e] = C64::new(1.0, 0.0);
                let r = orthonormalize(&mut col, &basis);
                (r, col)
            })
            .max_by(|x, y| x.0.total_cmp(&y.0))
            .expect("n >= 1");
        basis.push(best.1);
    }

    let left = ComplexMatrix::from_fn(n, n, |i, j| basis[j][i]);
    let right = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(Svd { left, values, right })
}

/// Singular values of a square matrix, descending.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(svd(a)?.values)
}

/// `|A| = (A* A)^{1/2}`.
pub fn matrix_abs(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let s = svd(a)?;
    let right = &s.right;
    let n = right.rows();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| right[(i, k)] * right[(j, k)].conj() * s.values[k]).sum()
    }))
}

/// Unitary `U = V W*` from `A = V Σ W*`, so that `A = U |A|` and
/// `(A A*)^{1/2} = U |A| U*`.
pub fn polar_unitary(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let s = svd(a)?;
    Ok(&s.left * &s.right.adjoint())
}

/// Eigenvalues of a nominally PSD Hermitian matrix, with roundoff negativity
/// clipped to zero.
pub(crate) fn clip_psd_spectrum(eigenvalues: &mut [f64]) -> Result<()> {
    let scale = eigenvalues.iter().fold(1.0_f64, |m, l| m.max(l.abs()));
    for l in eigenvalues.iter_mut() {
        if *l < 0.0 {
            if *l < -tol::PSD_CLIP * scale {
                return Err(Error::NotPositive { min_eigenvalue: *l });
            }
            *l = 0.0;
        }
    }
    Ok(())
}

/// `P^t` for PSD `P`, computed spectrally.
pub fn psd_power(p: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !(t >= 0.0) {
        return Err(Error::NegativePower(t));
    }
    let mut e = hermitian_eig(p)?;
    clip_psd_spectrum(&mut e.eigenvalues)?;
    Ok(e.reconstruct_with(|l| l.powf(t)))
}
