//! Doubly stochastic witnesses `X Λ_B ≈ Λ_A` and the finite-dimensional
//! majorization decision.

use nalgebra::DMatrix;

use super::ds::DoublyStochastic;
use super::lp::{LinearProgram, LpOutcome};
use crate::error::{Error, Result};
use crate::linalg::{joint_diagonalize_with, AbelianFamily, EigenColumns};
use crate::tolerance::Tolerances;

/// Frank–Wolfe iterations spent pulling the witness toward a reference.
pub const REFINEMENT_ITERATIONS: usize = 200;

/// `‖X Λ_B − Λ_A‖_max`.
pub fn fit_residual(x: &DMatrix<f64>, lambda_a: &DMatrix<f64>, lambda_b: &DMatrix<f64>) -> f64 {
    let diff = x * lambda_b - lambda_a;
    diff.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
}

/// Searches for `X ∈ DS_n` with `‖X Λ_B − Λ_A‖_max ≤ feas_tol`.
///
/// The LP minimizes the fitting residual `r`; when `r* ≤ feas_tol` the
/// witness is taken from the residual-optimal face `{r ≤ r* + η}` and, if a
/// reference is supplied, moved to the point of that face nearest to it in
/// Frobenius norm. `feas_tol` defaults to `10⁻⁸ (1 + ‖Λ_B‖_max)`.
pub fn find_ds_witness(
    lambda_a: &DMatrix<f64>,
    lambda_b: &DMatrix<f64>,
    reference: Option<&DoublyStochastic>,
    feas_tol: Option<f64>,
) -> Result<Option<DoublyStochastic>> {
    let n = lambda_b.nrows();
    let m = lambda_b.ncols();
    if lambda_a.nrows() != n || lambda_a.ncols() != m {
        return Err(Error::DimensionMismatch(format!(
            "eigenvalue matrices {}x{} and {}x{}",
            lambda_a.nrows(),
            lambda_a.ncols(),
            n,
            m
        )));
    }
    if let Some(r) = reference {
        if r.n() != n {
            return Err(Error::DimensionMismatch(format!(
                "reference of size {} for n = {n}",
                r.n()
            )));
        }
    }
    if n == 0 {
        return Err(Error::DimensionMismatch("empty eigenvalue matrix".into()));
    }
    let scale = max_abs(lambda_b).max(max_abs(lambda_a));
    let feas_tol = feas_tol.unwrap_or_else(|| Tolerances::default().feasibility_for(max_abs(lambda_b)));

    let (x0, r_star) = match minimize_residual(lambda_a, lambda_b)? {
        Some(v) => v,
        None => return Ok(None),
    };
    if r_star > feas_tol {
        return Ok(None);
    }
    let eta = 1e-12 * (1.0 + scale);
    let rho = r_star.max((r_star + eta).min(feas_tol));

    let x = match reference {
        Some(r) => {
            let face = Face {
                lambda_a,
                lambda_b,
                rho,
            };
            if face.contains(r.entries()) {
                r.entries().clone()
            } else {
                face.nearest_point(x0, r.entries(), REFINEMENT_ITERATIONS)?
            }
        }
        None => x0,
    };
    Ok(Some(DoublyStochastic::new(x.map(|v| v.max(0.0)))?))
}

/// Row sums and all but one column sum; the last column sum is implied.
fn marginal_rows(lp: &mut LinearProgram, n: usize, n_vars: usize) {
    for i in 0..n {
        let mut row = vec![0.0; n_vars];
        let mut col = vec![0.0; n_vars];
        for k in 0..n {
            row[i * n + k] = 1.0;
            col[k * n + i] = 1.0;
        }
        lp.add_eq(row, 1.0);
        if i + 1 < n {
            lp.add_eq(col, 1.0);
        }
    }
}

/// Coefficients of `(X Λ_B)_{ij}` in the flattened `X`.
fn fit_coefficients(lambda_b: &DMatrix<f64>, i: usize, j: usize, n_vars: usize) -> Vec<f64> {
    let n = lambda_b.nrows();
    let mut row = vec![0.0; n_vars];
    for k in 0..n {
        row[i * n + k] = lambda_b[(k, j)];
    }
    row
}

fn unflatten(x: &[f64], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, k| x[i * n + k])
}

/// LP: minimize `r` over `X ∈ DS_n`, `|X Λ_B − Λ_A| ≤ r` entrywise.
fn minimize_residual(
    lambda_a: &DMatrix<f64>,
    lambda_b: &DMatrix<f64>,
) -> Result<Option<(DMatrix<f64>, f64)>> {
    let n = lambda_b.nrows();
    let m = lambda_b.ncols();
    let n_vars = n * n + 1;
    let r_idx = n * n;
    let mut lp = LinearProgram::new(n_vars);
    marginal_rows(&mut lp, n, n_vars);
    for i in 0..n {
        for j in 0..m {
            let mut up = fit_coefficients(lambda_b, i, j, n_vars);
            let mut down: Vec<f64> = up.iter().map(|v| -v).collect();
            up[r_idx] = -1.0;
            down[r_idx] = -1.0;
            lp.add_le(up, lambda_a[(i, j)]);
            lp.add_le(down, -lambda_a[(i, j)]);
        }
    }
    let mut c = vec![0.0; n_vars];
    c[r_idx] = 1.0;
    lp.set_objective(c);
    match lp.solve()? {
        LpOutcome::Optimal { x, .. } => {
            let xm = unflatten(&x[..n * n], n);
            // Report the residual actually attained by the extracted point.
            let r = fit_residual(&xm, lambda_a, lambda_b);
            Ok(Some((xm, r)))
        }
        LpOutcome::Infeasible { .. } => Ok(None),
        LpOutcome::Unbounded => Err(Error::SolverFailure("residual LP is unbounded".into())),
    }
}

/// The polytope `{X ∈ DS_n : |X Λ_B − Λ_A| ≤ ρ}`.
struct Face<'a> {
    lambda_a: &'a DMatrix<f64>,
    lambda_b: &'a DMatrix<f64>,
    rho: f64,
}

impl Face<'_> {
    fn contains(&self, x: &DMatrix<f64>) -> bool {
        fit_residual(x, self.lambda_a, self.lambda_b) <= self.rho
    }

    fn linear_minimizer(&self, gradient: &DMatrix<f64>) -> Result<Option<DMatrix<f64>>> {
        let n = self.lambda_b.nrows();
        let m = self.lambda_b.ncols();
        let n_vars = n * n;
        let mut lp = LinearProgram::new(n_vars);
        marginal_rows(&mut lp, n, n_vars);
        for i in 0..n {
            for j in 0..m {
                let up = fit_coefficients(self.lambda_b, i, j, n_vars);
                let down: Vec<f64> = up.iter().map(|v| -v).collect();
                lp.add_le(up, self.lambda_a[(i, j)] + self.rho);
                lp.add_le(down, -self.lambda_a[(i, j)] + self.rho);
            }
        }
        lp.set_objective((0..n_vars).map(|p| gradient[(p / n, p % n)]).collect());
        match lp.solve()? {
            LpOutcome::Optimal { x, .. } => Ok(Some(unflatten(&x, n))),
            _ => Ok(None),
        }
    }

    /// Away-step Frank–Wolfe for `min ‖X − R‖_F²` over the face, started at
    /// a vertex. Every iterate is a convex combination of face vertices.
    fn nearest_point(
        &self,
        start: DMatrix<f64>,
        reference: &DMatrix<f64>,
        iterations: usize,
    ) -> Result<DMatrix<f64>> {
        let mut x = start.clone();
        let mut active: Vec<(DMatrix<f64>, f64)> = vec![(start, 1.0)];
        let dot = |a: &DMatrix<f64>, b: &DMatrix<f64>| a.dot(b);
        for _ in 0..iterations {
            let grad = &x - reference;
            let Some(s) = self.linear_minimizer(&grad)? else {
                break;
            };
            let fw_gap = dot(&grad, &(&x - &s));
            let (away_idx, away_gap) = active
                .iter()
                .enumerate()
                .map(|(k, (v, _))| (k, dot(&grad, &(v - &x))))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .expect("active set is never empty");
            if fw_gap.max(away_gap) <= 1e-14 {
                break;
            }
            if fw_gap >= away_gap {
                let d = &s - &x;
                let dd = dot(&d, &d);
                if dd == 0.0 {
                    break;
                }
                let gamma = (-dot(&grad, &d) / dd).clamp(0.0, 1.0);
                x += &d * gamma;
                if gamma >= 1.0 {
                    active = vec![(s, 1.0)];
                } else {
                    for (_, w) in active.iter_mut() {
                        *w *= 1.0 - gamma;
                    }
                    match active.iter_mut().find(|(v, _)| max_abs(&(v - &s)) < 1e-12) {
                        Some((_, w)) => *w += gamma,
                        None => active.push((s, gamma)),
                    }
                }
            } else {
                let alpha = active[away_idx].1;
                if alpha >= 1.0 {
                    break;
                }
                let d = &x - &active[away_idx].0;
                let dd = dot(&d, &d);
                if dd == 0.0 {
                    break;
                }
                let gamma_max = alpha / (1.0 - alpha);
                let gamma = (-dot(&grad, &d) / dd).clamp(0.0, gamma_max);
                x += &d * gamma;
                for (_, w) in active.iter_mut() {
                    *w *= 1.0 + gamma;
                }
                active[away_idx].1 -= gamma;
                if gamma >= gamma_max || active[away_idx].1 <= 1e-15 {
                    active.remove(away_idx);
                }
            }
        }
        Ok(x)
    }
}

/// Outcome of [`decide_joint_majorization`].
#[derive(Debug, Clone)]
pub struct Decision {
    pub majorized: bool,
    pub witness: Option<DoublyStochastic>,
    pub eigen_a: EigenColumns,
    pub eigen_b: EigenColumns,
}

/// Decides `A ≺ B` by joint diagonalization and an LP witness search.
///
/// A witness exists iff `A` lies in the convex hull of the joint unitary
/// orbit of `B`, iff `A` is tracially majorized by `B`. The returned witness
/// is the one nearest to `reference` (the identity when absent).
pub fn decide_joint_majorization(
    a: &AbelianFamily,
    b: &AbelianFamily,
    seed: u64,
    tol: &Tolerances,
) -> Result<Decision> {
    decide_with_reference(a, b, seed, tol, None)
}

pub fn decide_with_reference(
    a: &AbelianFamily,
    b: &AbelianFamily,
    seed: u64,
    tol: &Tolerances,
    reference: Option<&DoublyStochastic>,
) -> Result<Decision> {
    if a.n() != b.n() || a.m() != b.m() {
        return Err(Error::DimensionMismatch(format!(
            "families of shape (n={}, m={}) and (n={}, m={})",
            a.n(),
            a.m(),
            b.n(),
            b.m()
        )));
    }
    let eigen_a = joint_diagonalize_with(a, seed, tol)?;
    let eigen_b = joint_diagonalize_with(b, seed.wrapping_add(1), tol)?;
    let identity = DoublyStochastic::identity(a.n());
    let reference = reference.unwrap_or(&identity);
    let feas = tol.feasibility_for(eigen_b.max_abs());
    let witness = find_ds_witness(&eigen_a.lambda, &eigen_b.lambda, Some(reference), Some(feas))?;
    Ok(Decision {
        majorized: witness.is_some(),
        witness,
        eigen_a,
        eigen_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(v.len(), 1, v)
    }

    #[test]
    fn identical_columns_give_identity() {
        let l = DMatrix::from_row_slice(3, 2, &[3.0, 1.0, 2.0, 5.0, 0.0, -1.0]);
        let i3 = DoublyStochastic::identity(3);
        let x = find_ds_witness(&l, &l, Some(&i3), None).unwrap().unwrap();
        assert!(x.frobenius_distance(&i3) < 1e-12);
    }

    #[test]
    fn averaging_two_point_spectrum() {
        // X (2, 0)ᵀ = (1, 1)ᵀ forces X = J₂/2.
        let x = find_ds_witness(&col(&[1.0, 1.0]), &col(&[2.0, 0.0]), None, None)
            .unwrap()
            .unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((x.get(i, j) - 0.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reversed_pair_is_infeasible() {
        let x = find_ds_witness(&col(&[2.0, 0.0]), &col(&[1.0, 1.0]), None, None).unwrap();
        assert!(x.is_none());
    }

    #[test]
    fn cyclic_field_pair_at_half() {
        let (s, c) = (0.5_f64.sin(), 0.5_f64.cos());
        let (s2, c2) = (s * s, c * c);
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let a = DMatrix::from_row_slice(3, 2, &[s2, c2, 0.0, s2, c2, 0.0]);
        let x = find_ds_witness(&a, &b, None, None).unwrap().unwrap();
        assert!(fit_residual(x.entries(), &a, &b) < 1e-9);
        // The witness is unique here: the first two columns are fixed by A.
        let expected = DMatrix::from_row_slice(3, 3, &[s2, c2, 0.0, 0.0, s2, c2, c2, 0.0, s2]);
        assert!((x.entries() - expected).abs().max() < 1e-9);
    }

    #[test]
    fn reference_selects_nearest_witness() {
        // Every DS_2 matrix fixes the constant vector; the nearest to the
        // swap is the swap itself.
        let l = col(&[0.0, 0.0]);
        let swap = DoublyStochastic::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let x = find_ds_witness(&l, &l, Some(&swap), None).unwrap().unwrap();
        assert!(x.frobenius_distance(&swap) < 1e-12);
        let half = DoublyStochastic::flat(2);
        let x = find_ds_witness(&l, &l, Some(&half), None).unwrap().unwrap();
        assert!(x.frobenius_distance(&half) < 1e-12);
    }

    #[test]
    fn mismatched_shapes_error() {
        let err = find_ds_witness(&col(&[1.0, 1.0]), &col(&[1.0, 1.0, 1.0]), None, None);
        assert!(matches!(err, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn decide_single_operator_pairs() {
        let a = AbelianFamily::new(vec![crate::linalg::ComplexMatrix::diagonal(&[1.0, 1.0])]).unwrap();
        let b = AbelianFamily::new(vec![crate::linalg::ComplexMatrix::diagonal(&[2.0, 0.0])]).unwrap();
        let tol = Tolerances::default();
        assert!(decide_joint_majorization(&a, &b, 0, &tol).unwrap().majorized);
        assert!(!decide_joint_majorization(&b, &a, 0, &tol).unwrap().majorized);
        assert!(decide_joint_majorization(&a, &a, 0, &tol).unwrap().majorized);
    }
}
