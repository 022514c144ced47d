use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
pub use nalgebra::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// Dense complex matrix stored row-major in its logical layout.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{}", self.n_rows(), self.n_cols())?;
        for i in 0..self.n_rows() {
            let row: Vec<String> = (0..self.n_cols())
                .map(|j| {
                    let z = self.0[(i, j)];
                    if z.im == 0.0 {
                        format!("{:.6}", z.re)
                    } else {
                        format!("{:.6}{:+.6}i", z.re, z.im)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl ComplexMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(n_rows, n_cols))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(DMatrix::identity(n, n))
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        ComplexMatrix(DMatrix::from_fn(n_rows, n_cols, f))
    }

    /// Builds a matrix from row-major complex entries.
    pub fn from_row_major(n_rows: usize, n_cols: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                n_rows,
                n_cols
            )));
        }
        Ok(ComplexMatrix(DMatrix::from_row_slice(n_rows, n_cols, entries)))
    }

    /// Builds a real matrix from rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged rows");
        Self::from_fn(n_rows, n_cols, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_real(m: &DMatrix<f64>) -> Self {
        ComplexMatrix(m.map(|x| C64::new(x, 0.0)))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Permutation matrix `P` with `P[i][perm[i]] = 1`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        Self::from_fn(n, n, |i, j| {
            if perm[i] == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Block-diagonal direct sum of square or rectangular blocks.
    pub fn block_diagonal(blocks: &[ComplexMatrix]) -> Self {
        let rows: usize = blocks.iter().map(|b| b.n_rows()).sum();
        let cols: usize = blocks.iter().map(|b| b.n_cols()).sum();
        let mut out = DMatrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            out.view_mut((r0, c0), (b.n_rows(), b.n_cols())).copy_from(&b.0);
            r0 += b.n_rows();
            c0 += b.n_cols();
        }
        ComplexMatrix(out)
    }

    pub fn n_rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows() == self.n_cols()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.0[(i, j)] = value;
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn from_inner(m: DMatrix<C64>) -> Self {
        ComplexMatrix(m)
    }

    /// Row-major entries.
    pub fn row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.n_rows() * self.n_cols());
        for i in 0..self.n_rows() {
            for j in 0..self.n_cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix(self.0.transpose())
    }

    pub fn scale(&self, s: f64) -> Self {
        ComplexMatrix(self.0.map(|z| z * s))
    }

    /// `‖A‖_max`, the largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    /// `‖A − B‖_max`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape());
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).norm()))
    }

    /// `‖A − A*‖_max`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    /// `‖U*U − I‖_max`.
    pub fn unitary_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let g = self.adjoint() * self;
        g.max_abs_diff(&ComplexMatrix::identity(self.n_rows()))
    }

    /// Largest off-diagonal modulus.
    pub fn off_diagonal_max(&self) -> f64 {
        let mut m = 0.0_f64;
        for i in 0..self.n_rows() {
            for j in 0..self.n_cols() {
                if i != j {
                    m = m.max(self.0[(i, j)].norm());
                }
            }
        }
        m
    }

    /// Real parts of the diagonal.
    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.n_rows().min(self.n_cols()))
            .map(|i| self.0[(i, i)].re)
            .collect()
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    /// `W* M W`.
    pub fn conjugate_by(&self, w: &ComplexMatrix) -> ComplexMatrix {
        w.adjoint() * self * w
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * &rhs.0)
    }
}

impl Mul<ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0 * rhs.0)
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Square matrix checked to be unitary at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(ComplexMatrix);

impl Unitary {
    pub const DEFAULT_TOLERANCE: f64 = 1e-10;

    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, Self::DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        let deviation = matrix.unitary_deviation();
        if !(deviation <= tol) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Unitary(matrix))
    }

    pub fn identity(n: usize) -> Self {
        Unitary(ComplexMatrix::identity(n))
    }

    pub fn permutation(perm: &[usize]) -> Self {
        Unitary(ComplexMatrix::permutation(perm))
    }

    pub fn dim(&self) -> usize {
        self.0.n_rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary(self.0.adjoint())
    }

    /// Products of unitaries stay unitary up to rounding.
    pub fn compose(&self, other: &Unitary) -> Unitary {
        Unitary(&self.0 * &other.0)
    }

    pub fn direct_sum(blocks: &[&Unitary]) -> Unitary {
        let mats: Vec<ComplexMatrix> = blocks.iter().map(|u| u.0.clone()).collect();
        Unitary(ComplexMatrix::block_diagonal(&mats))
    }
}

/// Product of several matrices, left to right.
pub fn product(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut it = factors.iter();
    let first = (*it.next().expect("empty product")).clone();
    it.fold(first, |acc, m| acc * *m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_convention() {
        let p = ComplexMatrix::permutation(&[1, 2, 0]);
        assert_eq!(p.get(0, 1).re, 1.0);
        assert_eq!(p.get(2, 0).re, 1.0);
        assert!(Unitary::new(p).is_ok());
    }

    #[test]
    fn block_diagonal_shapes() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::diagonal(&[3.0]);
        let d = ComplexMatrix::block_diagonal(&[a, b]);
        assert_eq!(d.n_rows(), 3);
        assert_eq!(d.real_diagonal(), vec![1.0, 1.0, 3.0]);
        assert_eq!(d.off_diagonal_max(), 0.0);
    }

    #[test]
    fn rejects_non_unitary() {
        let m = ComplexMatrix::diagonal(&[1.0, 2.0]);
        assert!(matches!(Unitary::new(m), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn row_major_roundtrip() {
        let entries: Vec<C64> = (0..6).map(|k| C64::new(k as f64, -(k as f64))).collect();
        let m = ComplexMatrix::from_row_major(2, 3, &entries).unwrap();
        assert_eq!(m.get(1, 0), C64::new(3.0, -3.0));
        assert_eq!(m.row_major(), entries);
        assert!(ComplexMatrix::from_row_major(2, 2, &entries).is_err());
    }
}
