use std::cmp::Ordering;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eigen::raw_eigh;
use super::matrix::{ComplexMatrix, Unitary, C64};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

const SPLIT_ATTEMPTS: usize = 16;
/// Eigenvalues of the random combination closer than this (relative) are
/// treated as one cluster and refined recursively.
const CLUSTER_REL: f64 = 1e-6;
/// Separation used once the coarse threshold has failed on every attempt.
const FINE_CLUSTER_REL: f64 = 1e-12;

/// Pairwise-commuting Hermitian matrices of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianFamily {
    n: usize,
    members: Vec<ComplexMatrix>,
}

impl AbelianFamily {
    pub fn new(members: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerances(members, &Tolerances::default())
    }

    pub fn with_tolerances(members: Vec<ComplexMatrix>, tol: &Tolerances) -> Result<Self> {
        let n = match members.first() {
            Some(m) => m.n_rows(),
            None => return Err(Error::DimensionMismatch("empty family".into())),
        };
        for (k, a) in members.iter().enumerate() {
            if a.n_rows() != n || a.n_cols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "member {k} is {}x{}, expected {n}x{n}",
                    a.n_rows(),
                    a.n_cols()
                )));
            }
        }
        let scale = 1.0 + members.iter().map(ComplexMatrix::max_abs).fold(0.0, f64::max);
        for a in &members {
            let deviation = a.hermitian_deviation();
            if !(deviation <= tol.hermitian * scale) {
                return Err(Error::NotHermitian {
                    deviation,
                    tolerance: tol.hermitian * scale,
                });
            }
        }
        for j in 0..members.len() {
            for k in (j + 1)..members.len() {
                let ab = &members[j] * &members[k];
                let ba = &members[k] * &members[j];
                let deviation = ab.max_abs_diff(&ba);
                if !(deviation <= tol.commute * scale) {
                    return Err(Error::NotCommuting {
                        first: j,
                        second: k,
                        deviation,
                    });
                }
            }
        }
        Ok(AbelianFamily { n, members })
    }

    /// `A_j = U* diag(column j of lambda) U`.
    pub fn from_eigen(lambda: &DMatrix<f64>, diagonalizer: &Unitary) -> Result<Self> {
        let u = diagonalizer.matrix();
        if u.n_rows() != lambda.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "diagonalizer of size {} for {} eigenvalue rows",
                u.n_rows(),
                lambda.nrows()
            )));
        }
        let members = (0..lambda.ncols())
            .map(|j| {
                let col: Vec<f64> = lambda.column(j).iter().copied().collect();
                ComplexMatrix::diagonal(&col).conjugate_by(u)
            })
            .collect();
        Self::new(members)
    }

    /// Family of diagonal matrices, one per column of `lambda`.
    pub fn diagonal(lambda: &DMatrix<f64>) -> Self {
        let members = (0..lambda.ncols())
            .map(|j| {
                let col: Vec<f64> = lambda.column(j).iter().copied().collect();
                ComplexMatrix::diagonal(&col)
            })
            .collect();
        AbelianFamily {
            n: lambda.nrows(),
            members,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[ComplexMatrix] {
        &self.members
    }

    pub fn max_abs(&self) -> f64 {
        self.members.iter().map(ComplexMatrix::max_abs).fold(0.0, f64::max)
    }

    /// Direct sum of families with equal length.
    pub fn direct_sum(blocks: &[&AbelianFamily]) -> Result<Self> {
        let m = blocks.first().ok_or(Error::EmptyBlocks)?.m();
        if blocks.iter().any(|b| b.m() != m) {
            return Err(Error::DimensionMismatch("blocks differ in family length".into()));
        }
        let members = (0..m)
            .map(|j| {
                let parts: Vec<ComplexMatrix> =
                    blocks.iter().map(|b| b.members[j].clone()).collect();
                ComplexMatrix::block_diagonal(&parts)
            })
            .collect();
        Ok(AbelianFamily {
            n: blocks.iter().map(|b| b.n).sum(),
            members,
        })
    }
}

/// Joint eigenvalues (`n×m`, one column per member) and the unitary `U`
/// with `U A_j U*` diagonal for every member.
#[derive(Debug, Clone)]
pub struct EigenColumns {
    pub lambda: DMatrix<f64>,
    pub diagonalizer: Unitary,
}

impl EigenColumns {
    pub fn n(&self) -> usize {
        self.lambda.nrows()
    }

    pub fn m(&self) -> usize {
        self.lambda.ncols()
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.lambda.row(i).iter().copied().collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.lambda.column(j).iter().copied().collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.lambda.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
    }
}

/// Simultaneously diagonalizes a commuting Hermitian family.
pub fn joint_diagonalize(family: &AbelianFamily, seed: u64) -> Result<EigenColumns> {
    joint_diagonalize_with(family, seed, &Tolerances::default())
}

/// Diagonalizes a seeded random real combination of the members and refines
/// recursively inside clusters where the combination is degenerate. Rows of
/// the result are in lexicographically descending order.
pub fn joint_diagonalize_with(
    family: &AbelianFamily,
    seed: u64,
    tol: &Tolerances,
) -> Result<EigenColumns> {
    let n = family.n();
    let scale = family.max_abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members: Vec<DMatrix<C64>> = family.members.iter().map(|a| a.inner().clone()).collect();
    let basis = DMatrix::<C64>::identity(n, n);
    let columns = refine(&members, basis, scale, &mut rng)?;

    // U has the conjugated common eigenvectors as rows.
    let mut q = DMatrix::<C64>::zeros(n, n);
    for (c, v) in columns.iter().enumerate() {
        q.set_column(c, v);
    }
    let u = ComplexMatrix::from_inner(q.adjoint());

    let m = family.m();
    let tol_diag = tol.diagonal * (1.0 + scale);
    let mut lambda = DMatrix::<f64>::zeros(n, m);
    for (j, a) in family.members.iter().enumerate() {
        let d = &(&u * a) * &u.adjoint();
        let off = d.off_diagonal_max();
        if off > tol_diag {
            return Err(Error::DegenerateSplitFailure { dimension: n });
        }
        for i in 0..n {
            lambda[(i, j)] = d.get(i, i).re;
        }
    }

    let quantum = 1e-9 * (1.0 + scale);
    let order = canonical_row_order(&lambda, quantum);
    let lambda_sorted = DMatrix::from_fn(n, m, |i, j| lambda[(order[i], j)]);
    let u_sorted = ComplexMatrix::from_fn(n, n, |i, j| u.get(order[i], j));
    let diagonalizer = Unitary::with_tolerance(u_sorted, 1e-9)?;
    Ok(EigenColumns {
        lambda: lambda_sorted,
        diagonalizer,
    })
}

/// Row permutation sorting rows lexicographically descending after snapping
/// entries to multiples of `quantum`.
pub fn canonical_row_order(lambda: &DMatrix<f64>, quantum: f64) -> Vec<usize> {
    let keys: Vec<Vec<i64>> = (0..lambda.nrows())
        .map(|i| {
            lambda
                .row(i)
                .iter()
                .map(|x| (x / quantum).round() as i64)
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..lambda.nrows()).collect();
    order.sort_by(|&a, &b| match keys[b].cmp(&keys[a]) {
        Ordering::Equal => a.cmp(&b),
        o => o,
    });
    order
}

/// Returns orthonormal columns (in the ambient space) spanning joint
/// eigenspaces of the restricted members.
fn refine(
    members: &[DMatrix<C64>],
    basis: DMatrix<C64>,
    scale: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<nalgebra::DVector<C64>>> {
    let s = basis.ncols();
    if s == 1 || members.is_empty() || is_scalar_family(members, scale) {
        return Ok((0..s).map(|c| basis.column(c).into_owned()).collect());
    }
    for attempt in 0..=SPLIT_ATTEMPTS {
        let coeffs: Vec<f64> = (0..members.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut h = DMatrix::<C64>::zeros(s, s);
        for (c, a) in coeffs.iter().zip(members) {
            h += a * C64::new(*c, 0.0);
        }
        let (values, vectors) = raw_eigh(&h)?;
        let rel = if attempt < SPLIT_ATTEMPTS { CLUSTER_REL } else { FINE_CLUSTER_REL };
        let spread = rel * (1.0 + scale);
        let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
        for i in 1..s {
            if values[i - 1] - values[i] > spread {
                clusters.push(vec![i]);
            } else {
                clusters.last_mut().unwrap().push(i);
            }
        }
        if clusters.len() == 1 {
            continue;
        }
        let mut out = Vec::with_capacity(s);
        for cluster in clusters {
            let local = DMatrix::from_fn(s, cluster.len(), |r, c| vectors[(r, cluster[c])]);
            let restricted: Vec<DMatrix<C64>> = members
                .iter()
                .map(|a| local.adjoint() * a * &local)
                .collect();
            out.extend(refine(&restricted, &basis * &local, scale, rng)?);
        }
        return Ok(out);
    }
    Err(Error::DegenerateSplitFailure { dimension: s })
}

fn is_scalar_family(members: &[DMatrix<C64>], scale: f64) -> bool {
    let tol = 1e-9 * (1.0 + scale);
    members.iter().all(|a| {
        let s = a.nrows();
        let mean = a.trace() / C64::new(s as f64, 0.0);
        (0..s).all(|i| (0..s).all(|j| {
            let target = if i == j { mean } else { C64::new(0.0, 0.0) };
            (a[(i, j)] - target).norm() <= tol
        }))
    })
}
