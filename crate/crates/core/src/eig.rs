//! Cyclic Jacobi eigendecomposition of Hermitian matrices.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::tol;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues (descending) with orthonormal eigenvectors stored as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V · diag(f(λ)) · V*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        let weights: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| v[(i, k)] * v[(j, k)].conj() * weights[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}

/// Unitary 2×2 rotation `G = [[g00, g01], [g10, g11]]` such that
/// `G* [[app, apq], [conj(apq), aqq]] G` is diagonal.
pub(crate) fn jacobi_rotation(app: f64, aqq: f64, apq: C64) -> [C64; 4] {
    let r = apq.norm();
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    // G = diag(1, conj(phase)) · [[c, s], [-s, c]]
    let ph = phase.conj();
    [C64::new(c, 0.0), C64::new(s, 0.0), ph * -s, ph * c]
}

/// `M ← M · G` on columns `p`, `q`.
pub(crate) fn rotate_columns(m: &mut ComplexMatrix, p: usize, q: usize, g: &[C64; 4]) {
    for k in 0..m.rows() {
        let (x, y) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = x * g[0] + y * g[2];
        m[(k, q)] = x * g[1] + y * g[3];
    }
}

/// `M ← G* · M` on rows `p`, `q`.
fn rotate_rows(m: &mut ComplexMatrix, p: usize, q: usize, g: &[C64; 4]) {
    for k in 0..m.cols() {
        let (x, y) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = g[0].conj() * x + g[2].conj() * y;
        m[(q, k)] = g[1].conj() * x + g[3].conj() * y;
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized as `(M + M*)/2` after checking that
/// `max |M - M*| ≤ tol::HERMITIAN · (1 + max |M_ij|)`. Eigenvalues come back in
/// descending order; ties keep their first-occurrence order.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = m.ensure_square()?;
    let deviation = m.hermitian_deviation();
    if deviation > tol::HERMITIAN * (1.0 + m.max_abs()) {
        return Err(Error::NotHermitian { deviation });
    }
    let mut a = m.hermitian_part()?;
    let mut v = ComplexMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let (mut off, mut diag) = (0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    diag += a[(i, i)].norm_sqr();
                } else {
                    off += a[(i, j)].norm_sqr();
                }
            }
        }
        if off == 0.0 || off.sqrt() < tol::JACOBI * diag.sqrt() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.norm() == 0.0 {
                    continue;
                }
                let g = jacobi_rotation(a[(p, p)].re, a[(q, q)].re, apq);
                rotate_columns(&mut a, p, q, &g);
                rotate_rows(&mut a, p, q, &g);
                rotate_columns(&mut v, p, q, &g);
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep first occurrence
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}
