use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, Unitary};

/// Square matrix with non-negative entries and unit row and column sums.
#[derive(Debug, Clone, PartialEq)]
pub struct DoublyStochastic(DMatrix<f64>);

impl DoublyStochastic {
    pub const NEGATIVE_SLACK: f64 = 1e-10;
    pub const SUM_SLACK: f64 = 1e-9;

    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let n = entries.nrows();
        if n == 0 || entries.ncols() != n {
            return Err(Error::InvalidDoublyStochastic(format!(
                "shape {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        for ((i, j), x) in (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).zip(entries.iter()) {
            if !x.is_finite() || *x < -Self::NEGATIVE_SLACK {
                return Err(Error::InvalidDoublyStochastic(format!(
                    "entry ({i}, {j}) is {x}"
                )));
            }
        }
        for i in 0..n {
            let r: f64 = entries.row(i).sum();
            let c: f64 = entries.column(i).sum();
            if (r - 1.0).abs() > Self::SUM_SLACK {
                return Err(Error::InvalidDoublyStochastic(format!("row {i} sums to {r}")));
            }
            if (c - 1.0).abs() > Self::SUM_SLACK {
                return Err(Error::InvalidDoublyStochastic(format!("column {i} sums to {c}")));
            }
        }
        Ok(DoublyStochastic(entries))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidDoublyStochastic("matrix is not square".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        DoublyStochastic(DMatrix::identity(n, n))
    }

    /// `J_n / n`.
    pub fn flat(n: usize) -> Self {
        DoublyStochastic(DMatrix::from_element(n, n, 1.0 / n as f64))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| self.0.row(i).iter().copied().collect())
            .collect()
    }

    /// Frobenius distance.
    pub fn frobenius_distance(&self, other: &DoublyStochastic) -> f64 {
        (&self.0 - &other.0).norm()
    }

    /// Applies a row permutation and a column permutation:
    /// `out[i][j] = self[rows[i]][cols[j]]`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Self {
        let n = self.n();
        DoublyStochastic(DMatrix::from_fn(n, n, |i, j| self.0[(rows[i], cols[j])]))
    }
}

/// Permutation matrix `P` with `P[i][perm[i]] = 1`, so `(P v)_i = v[perm[i]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationMatrix(Vec<usize>);

impl PermutationMatrix {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidPermutation(format!("{perm:?} is not a bijection")));
            }
            seen[p] = true;
        }
        Ok(PermutationMatrix(perm))
    }

    pub fn identity(n: usize) -> Self {
        PermutationMatrix((0..n).collect())
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.0
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| if self.0[i] == j { 1.0 } else { 0.0 })
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::permutation(&self.0)
    }

    pub fn to_unitary(&self) -> Unitary {
        Unitary::permutation(&self.0)
    }

    /// `Pᵀ`, the inverse permutation.
    pub fn transpose(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        PermutationMatrix(inv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_sums() {
        assert!(DoublyStochastic::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).is_ok());
        assert!(DoublyStochastic::from_rows(&[vec![0.6, 0.5], vec![0.4, 0.5]]).is_err());
        assert!(DoublyStochastic::from_rows(&[vec![1.5, -0.5], vec![-0.5, 1.5]]).is_err());
        assert!(DoublyStochastic::from_rows(&[vec![1.0, 0.0]]).is_err());
    }

    #[test]
    fn permutation_transpose_inverts() {
        let p = PermutationMatrix::new(vec![2, 0, 1]).unwrap();
        let prod = p.to_matrix() * p.transpose().to_matrix();
        assert_eq!(prod, DMatrix::identity(3, 3));
        assert!(PermutationMatrix::new(vec![0, 0, 1]).is_err());
    }
}
