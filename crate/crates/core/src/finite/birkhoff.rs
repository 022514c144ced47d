//! Birkhoff–von Neumann decomposition of doubly stochastic matrices.

use nalgebra::DMatrix;

use super::ds::{DoublyStochastic, PermutationMatrix};
use super::prob::ProbabilityVector;
use crate::error::{Error, Result};

/// Residual entries at or below this are treated as zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;

/// Mass left unextracted beyond this is reported as a failure.
const LEFTOVER_SLACK: f64 = 1e-9;

/// One term `t · P` of a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct BirkhoffTerm {
    pub weight: f64,
    pub permutation: PermutationMatrix,
}

/// Greedy extraction in order: at each step the perfect matching on the
/// positive support of the residual with the largest minimum entry.
///
/// The residual is updated as `R ← R − t P`; the entries of each extracted
/// `P` are strictly positive in `R` at the time of extraction.
pub fn birkhoff_greedy(x: &DoublyStochastic) -> Result<Vec<BirkhoffTerm>> {
    let n = x.n();
    let mut residual = x.entries().clone();
    let mut terms = Vec::new();
    let mut extracted = 0.0;
    // Every step zeroes at least one entry.
    for _ in 0..n * n {
        if 1.0 - extracted <= LEFTOVER_SLACK {
            break;
        }
        let Some(perm) = bottleneck_matching(&residual) else {
            break;
        };
        let t = (0..n).map(|i| residual[(i, perm[i])]).fold(f64::INFINITY, f64::min);
        for (i, &p) in perm.iter().enumerate() {
            residual[(i, p)] -= t;
        }
        extracted += t;
        terms.push(BirkhoffTerm {
            weight: t,
            permutation: PermutationMatrix::new(perm)?,
        });
    }
    let remaining = 1.0 - extracted;
    if remaining > LEFTOVER_SLACK {
        return Err(Error::NoPerfectMatching { remaining });
    }
    Ok(terms)
}

/// Decomposes `X = Σ tᵢ Pᵢ` with at most `n² − 2n + 2` terms and weights
/// forming a probability vector.
pub fn birkhoff_decompose(x: &DoublyStochastic) -> Result<Vec<BirkhoffTerm>> {
    let n = x.n();
    let mut terms = birkhoff_greedy(x)?;
    let bound = n * n + 2 - 2 * n;
    while terms.len() > bound && reduce_once(&mut terms) {}
    let weights = ProbabilityVector::normalized(terms.iter().map(|t| t.weight).collect())?;
    for (term, w) in terms.iter_mut().zip(weights.weights()) {
        term.weight = *w;
    }
    Ok(terms)
}

/// `Σ tᵢ Pᵢ`.
pub fn reconstruct(terms: &[BirkhoffTerm], n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(n, n);
    for term in terms {
        for (i, &p) in term.permutation.perm().iter().enumerate() {
            out[(i, p)] += term.weight;
        }
    }
    out
}

/// Perfect matching `i ↦ perm[i]` on entries above [`ZERO_THRESHOLD`]
/// maximizing the smallest matched entry.
fn bottleneck_matching(r: &DMatrix<f64>) -> Option<Vec<usize>> {
    let n = r.nrows();
    let mut levels: Vec<f64> = r.iter().copied().filter(|&v| v > ZERO_THRESHOLD).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut best = perfect_matching(r, *levels.first()?)?;
    let (mut lo, mut hi) = (0, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        match perfect_matching(r, levels[mid]) {
            Some(m) => {
                best = m;
                lo = mid;
            }
            None => hi = mid - 1,
        }
    }
    debug_assert_eq!(best.len(), n);
    Some(best)
}

/// Kuhn's augmenting-path matching on entries `≥ threshold`.
fn perfect_matching(r: &DMatrix<f64>, threshold: f64) -> Option<Vec<usize>> {
    let n = r.nrows();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];
    for row in 0..n {
        let mut visited = vec![false; n];
        if !augment(r, threshold, row, &mut visited, &mut col_owner) {
            return None;
        }
    }
    let mut perm = vec![0; n];
    for (c, owner) in col_owner.iter().enumerate() {
        perm[owner.expect("perfect matching covers every column")] = c;
    }
    Some(perm)
}

fn augment(
    r: &DMatrix<f64>,
    threshold: f64,
    row: usize,
    visited: &mut [bool],
    col_owner: &mut [Option<usize>],
) -> bool {
    for c in 0..r.ncols() {
        if visited[c] || r[(row, c)] < threshold {
            continue;
        }
        visited[c] = true;
        let free = match col_owner[c] {
            None => true,
            Some(other) => augment(r, threshold, other, visited, col_owner),
        };
        if free {
            col_owner[c] = Some(row);
            return true;
        }
    }
    false
}

/// Carathéodory step: finds an affine dependence among the permutation
/// matrices and shifts weight along it until one term vanishes.
fn reduce_once(terms: &mut Vec<BirkhoffTerm>) -> bool {
    let n = terms[0].permutation.n();
    let k = terms.len();
    let rows = n * n + 1;
    let mut a = DMatrix::<f64>::zeros(rows, k);
    for (c, term) in terms.iter().enumerate() {
        for (i, &p) in term.permutation.perm().iter().enumerate() {
            a[(i * n + p, c)] = 1.0;
        }
        a[(n * n, c)] = 1.0;
    }
    let Some(c) = null_vector(a) else {
        return false;
    };
    let (idx, alpha) = terms
        .iter()
        .zip(&c)
        .enumerate()
        .filter(|(_, (_, &ci))| ci > 1e-12)
        .map(|(i, (t, &ci))| (i, t.weight / ci))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("a null vector with zero sum has a positive entry");
    for (term, ci) in terms.iter_mut().zip(&c) {
        term.weight = (term.weight - alpha * ci).max(0.0);
    }
    terms[idx].weight = 0.0;
    terms.retain(|t| t.weight > 0.0);
    true
}

/// A nonzero solution of `A c = 0` by Gauss–Jordan elimination, if the
/// columns are dependent.
fn null_vector(mut a: DMatrix<f64>) -> Option<Vec<f64>> {
    let (rows, cols) = a.shape();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, val) = (r..rows)
            .map(|i| (i, a[(i, c)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))?;
        if val < 1e-9 {
            continue;
        }
        a.swap_rows(r, best);
        let p = a[(r, c)];
        for j in 0..cols {
            a[(r, j)] /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = a[(i, c)];
                if f != 0.0 {
                    for j in 0..cols {
                        a[(i, j)] -= f * a[(r, j)];
                    }
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    let free = (0..cols).find(|c| !pivot_cols.contains(c))?;
    let mut v = vec![0.0; cols];
    v[free] = 1.0;
    for (row, &pc) in pivot_cols.iter().enumerate() {
        v[pc] = -a[(row, free)];
    }
    Some(v)
}
