//! Hyperplane-max test functions and a sampled falsifier for tracial
//! majorization.

use std::collections::HashSet;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{joint_diagonalize_with, trace_of_rows, AbelianFamily};
use crate::tolerance::Tolerances;

/// Trace gap required before a test function counts as a refutation.
pub const REFUTATION_MARGIN: f64 = 1e-9;

/// Points in the uniform offset grid for single-coordinate test functions.
const OFFSET_GRID: usize = 21;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub coefficients: Vec<f64>,
    pub offset: f64,
}

impl AffinePiece {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + self.offset
    }
}

/// `g(x) = max{0, maxᵢ (aᵢ · x + bᵢ)}`; with no pieces `g = 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct HyperplaneMaxFunction {
    pub pieces: Vec<AffinePiece>,
}

impl HyperplaneMaxFunction {
    pub fn new(pieces: Vec<AffinePiece>) -> Self {
        HyperplaneMaxFunction { pieces }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.pieces.iter().map(|p| p.eval(x)).fold(0.0, f64::max)
    }

    /// `max{0, x₁, …, x_m}`.
    pub fn positive_part_of_max(m: usize) -> Self {
        let pieces = (0..m)
            .map(|j| {
                let mut a = vec![0.0; m];
                a[j] = 1.0;
                AffinePiece {
                    coefficients: a,
                    offset: 0.0,
                }
            })
            .collect();
        HyperplaneMaxFunction { pieces }
    }

    /// `max{0, s · x_j + b}`.
    pub fn hinge(m: usize, j: usize, sign: f64, offset: f64) -> Self {
        let mut a = vec![0.0; m];
        a[j] = sign;
        HyperplaneMaxFunction {
            pieces: vec![AffinePiece {
                coefficients: a,
                offset,
            }],
        }
    }

    /// Normalized trace of `g` over the joint eigenvalue rows.
    pub fn trace_on(&self, lambda: &DMatrix<f64>) -> f64 {
        trace_of_rows(lambda, |x| self.eval(x))
    }
}

/// Joint-diagonalizes both families and runs [`refute_on_eigenvalues`].
pub fn tracial_refuter(
    a: &AbelianFamily,
    b: &AbelianFamily,
    trials: usize,
    seed: u64,
) -> Result<Option<HyperplaneMaxFunction>> {
    if a.n() != b.n() || a.m() != b.m() {
        return Err(Error::DimensionMismatch(format!(
            "families of shape (n={}, m={}) and (n={}, m={})",
            a.n(),
            a.m(),
            b.n(),
            b.m()
        )));
    }
    let tol = Tolerances::default();
    let la = joint_diagonalize_with(a, seed, &tol)?.lambda;
    let lb = joint_diagonalize_with(b, seed.wrapping_add(1), &tol)?.lambda;
    Ok(refute_on_eigenvalues(&la, &lb, trials, seed))
}

/// Searches for `g` with `tr g(A) > tr g(B) + 10⁻⁹`.
///
/// Tries `max{0, x₁, …, x_m}`, then hinges `max{0, ±x_j + b}` with kinks at
/// every joint eigenvalue and on a uniform grid, then `trials` random
/// functions with 1 to `m + 2` pieces.
pub fn refute_on_eigenvalues(
    lambda_a: &DMatrix<f64>,
    lambda_b: &DMatrix<f64>,
    trials: usize,
    seed: u64,
) -> Option<HyperplaneMaxFunction> {
    let m = lambda_a.ncols();
    let refutes = |g: &HyperplaneMaxFunction| {
        g.trace_on(lambda_a) > g.trace_on(lambda_b) + REFUTATION_MARGIN
    };

    let g = HyperplaneMaxFunction::positive_part_of_max(m);
    if refutes(&g) {
        return Some(g);
    }

    let scale = lambda_a
        .iter()
        .chain(lambda_b.iter())
        .fold(0.0_f64, |s, v| s.max(v.abs()));
    for j in 0..m {
        let mut values: Vec<f64> = lambda_a.column(j).iter().chain(lambda_b.column(j).iter()).copied().collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for sign in [1.0, -1.0] {
            // Kink of max{0, s·x + b} sits at x = −b/s.
            let mut offsets: Vec<f64> = values.iter().map(|v| -sign * v).collect();
            offsets.sort_by(|x, y| y.total_cmp(x));
            offsets.extend((0..OFFSET_GRID).map(|k| {
                scale * (2.0 * k as f64 / (OFFSET_GRID - 1) as f64 - 1.0)
            }));
            for b in offsets {
                let g = HyperplaneMaxFunction::hinge(m, j, sign, b);
                if refutes(&g) {
                    return Some(g);
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let count = rng.random_range(1..=m + 2);
        let pieces = (0..count)
            .map(|_| {
                let coefficients: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..=1.0)).collect();
                let reach = (1.0 + scale) * coefficients.iter().map(|a| a.abs()).sum::<f64>().max(1.0);
                let offset = rng.random_range(-reach..=reach);
                AffinePiece {
                    coefficients,
                    offset,
                }
            })
            .collect();
        let g = HyperplaneMaxFunction::new(pieces);
        if refutes(&g) {
            return Some(g);
        }
    }
    None
}

/// Hyperplane-max approximant of a nonnegative convex `f` on a box.
///
/// Takes supporting hyperplanes `f(p) + s(p)·(x − p)` at the nodes of a grid
/// fine enough that `f − ε ≤ g ≤ f` on the box, given that `f` is
/// `lipschitz`-Lipschitz in the Euclidean norm and `|s(p)| ≤ lipschitz`.
pub fn supporting_hyperplane_approximant(
    f: impl Fn(&[f64]) -> f64,
    subgradient: impl Fn(&[f64]) -> Vec<f64>,
    lipschitz: f64,
    lower: &[f64],
    upper: &[f64],
    epsilon: f64,
) -> Result<HyperplaneMaxFunction> {
    let m = lower.len();
    if m == 0 || upper.len() != m || lower.iter().zip(upper).any(|(l, u)| !(l <= u)) {
        return Err(Error::InvalidGrid("box bounds must satisfy lower ≤ upper".into()));
    }
    if !(epsilon > 0.0) || !(lipschitz >= 0.0) {
        return Err(Error::InvalidGrid("epsilon must be positive".into()));
    }
    let h = epsilon / (lipschitz.max(f64::MIN_POSITIVE) * (m as f64).sqrt());
    let counts: Vec<usize> = lower
        .iter()
        .zip(upper)
        .map(|(l, u)| ((u - l) / h).ceil().max(1.0) as usize + 1)
        .collect();
    let total = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
    if !matches!(total, Some(t) if t <= 2_000_000) {
        return Err(Error::InvalidGrid("approximation grid is too large".into()));
    }

    let mut seen = HashSet::new();
    let mut pieces = Vec::new();
    let mut idx = vec![0usize; m];
    let mut p = vec![0.0; m];
    loop {
        for k in 0..m {
            let t = idx[k] as f64 / (counts[k] - 1) as f64;
            p[k] = lower[k] + t * (upper[k] - lower[k]);
        }
        let s = subgradient(&p);
        let offset = f(&p) - s.iter().zip(&p).map(|(a, v)| a * v).sum::<f64>();
        let key: Vec<i64> = s
            .iter()
            .chain(std::iter::once(&offset))
            .map(|v| (v * 1e12).round() as i64)
            .collect();
        if seen.insert(key) {
            pieces.push(AffinePiece {
                coefficients: s,
                offset,
            });
        }
        let mut k = 0;
        loop {
            if k == m {
                return Ok(HyperplaneMaxFunction::new(pieces));
            }
            idx[k] += 1;
            if idx[k] < counts[k] {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;

    fn single(v: &[f64]) -> AbelianFamily {
        AbelianFamily::new(vec![ComplexMatrix::diagonal(v)]).unwrap()
    }

    #[test]
    fn equal_families_are_not_refuted() {
        let a = single(&[0.3, -1.2, 2.0]);
        assert_eq!(tracial_refuter(&a, &a, 200, 5).unwrap(), None);
    }

    #[test]
    fn reversed_pair_is_refuted_by_shifted_hinge() {
        let g = tracial_refuter(&single(&[2.0, 0.0]), &single(&[1.0, 1.0]), 100, 0)
            .unwrap()
            .expect("refutation");
        assert_eq!(g, HyperplaneMaxFunction::hinge(1, 0, 1.0, -1.0));
        let la = DMatrix::from_column_slice(2, 1, &[2.0, 0.0]);
        let lb = DMatrix::from_column_slice(2, 1, &[1.0, 1.0]);
        assert_eq!(g.trace_on(&la), 0.5);
        assert_eq!(g.trace_on(&lb), 0.0);
    }

    #[test]
    fn majorized_pair_survives_sampling() {
        assert_eq!(
            tracial_refuter(&single(&[1.0, 1.0]), &single(&[2.0, 0.0]), 1000, 3).unwrap(),
            None
        );
    }

    #[test]
    fn zero_function_evaluates_to_zero() {
        assert_eq!(HyperplaneMaxFunction::default().eval(&[3.0, -2.0]), 0.0);
    }

    #[test]
    fn approximant_of_absolute_value() {
        let g = supporting_hyperplane_approximant(
            |x| x[0].abs(),
            |x| vec![if x[0] > 0.0 { 1.0 } else if x[0] < 0.0 { -1.0 } else { 0.0 }],
            1.0,
            &[-1.0],
            &[2.0],
            0.1,
        )
        .unwrap();
        for k in 0..=300 {
            let x = -1.0 + 0.01 * k as f64;
            let v = g.eval(&[x]);
            assert!(v <= x.abs() + 1e-12 && v >= x.abs() - 0.1);
        }
    }
}
