use nalgebra::DMatrix;

use super::matrix::{ComplexMatrix, Unitary, C64};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 10_000;

/// Spectral decomposition `A = V diag(λ) V*` with `λ` sorted descending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns.
    pub eigenvectors: Unitary,
}

/// Eigendecomposition of a Hermitian matrix.
///
/// `tol_herm` is the absolute bound on `‖A − A*‖_max`; the input is
/// symmetrized before the solve.
pub fn hermitian_eigendecompose(a: &ComplexMatrix, tol_herm: f64) -> Result<HermitianEigen> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            a.n_rows(),
            a.n_cols()
        )));
    }
    let deviation = a.hermitian_deviation();
    if !(deviation <= tol_herm) {
        return Err(Error::NotHermitian {
            deviation,
            tolerance: tol_herm,
        });
    }
    let (values, vectors) = raw_eigh(a.inner())?;
    // Eigenvectors from the symmetric QR iteration are orthonormal to rounding.
    let eigenvectors = Unitary::with_tolerance(ComplexMatrix::from_inner(vectors), 1e-9)?;
    Ok(HermitianEigen {
        eigenvalues: values,
        eigenvectors,
    })
}

/// Symmetrize, solve and sort descending. No Hermitian check.
pub(crate) fn raw_eigh(a: &DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let sym = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, MAX_SWEEPS)
        .ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}
