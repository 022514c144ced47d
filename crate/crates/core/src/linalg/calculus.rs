use super::joint::{joint_diagonalize_with, AbelianFamily, EigenColumns};
use super::matrix::ComplexMatrix;
use crate::error::Result;
use crate::tolerance::Tolerances;

/// `f(A_1, …, A_m) = U* diag(f(row_1), …, f(row_n)) U`.
pub fn apply_function(cols: &EigenColumns, f: impl Fn(&[f64]) -> f64) -> ComplexMatrix {
    let values: Vec<f64> = (0..cols.n()).map(|i| f(&cols.row(i))).collect();
    ComplexMatrix::diagonal(&values).conjugate_by(cols.diagonalizer.matrix())
}

/// Normalized trace `tr f(A_1, …, A_m) = (1/n) Σ_i f(row_i)`.
pub fn trace_of_function(cols: &EigenColumns, f: impl Fn(&[f64]) -> f64) -> f64 {
    trace_of_rows(&cols.lambda, f)
}

pub(crate) fn trace_of_rows(lambda: &nalgebra::DMatrix<f64>, f: impl Fn(&[f64]) -> f64) -> f64 {
    let n = lambda.nrows();
    if n == 0 {
        return 0.0;
    }
    let mut row = vec![0.0; lambda.ncols()];
    let mut total = 0.0;
    for i in 0..n {
        for (j, r) in row.iter_mut().enumerate() {
            *r = lambda[(i, j)];
        }
        total += f(&row);
    }
    total / n as f64
}

/// Functional calculus directly on a family.
pub fn apply_function_to_family(
    family: &AbelianFamily,
    f: impl Fn(&[f64]) -> f64,
    seed: u64,
) -> Result<ComplexMatrix> {
    let cols = joint_diagonalize_with(family, seed, &Tolerances::default())?;
    Ok(apply_function(&cols, f))
}

pub fn trace_of_function_on_family(
    family: &AbelianFamily,
    f: impl Fn(&[f64]) -> f64,
    seed: u64,
) -> Result<f64> {
    let cols = joint_diagonalize_with(family, seed, &Tolerances::default())?;
    Ok(trace_of_function(&cols, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_one_gives_identity() {
        let f = AbelianFamily::new(vec![ComplexMatrix::diagonal(&[3.0, -1.0, 2.0])]).unwrap();
        let m = apply_function_to_family(&f, |_| 1.0, 0).unwrap();
        assert!(m.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-14);
        assert!((trace_of_function_on_family(&f, |_| 1.0, 0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sum_of_coordinates() {
        let f = AbelianFamily::new(vec![
            ComplexMatrix::diagonal(&[1.0, 2.0]),
            ComplexMatrix::diagonal(&[3.0, 4.0]),
        ])
        .unwrap();
        let m = apply_function_to_family(&f, |x| x[0] + x[1], 0).unwrap();
        assert!(m.max_abs_diff(&ComplexMatrix::diagonal(&[4.0, 6.0])) < 1e-12);
        let t = trace_of_function_on_family(&f, |x| x[0] + x[1], 0).unwrap();
        assert!((t - 5.0).abs() < 1e-12);
    }

    #[test]
    fn hinge_on_diag_two_zero() {
        let f = AbelianFamily::new(vec![ComplexMatrix::diagonal(&[2.0, 0.0])]).unwrap();
        let hinge = |x: &[f64]| (x[0] - 1.0).max(0.0);
        let m = apply_function_to_family(&f, hinge, 0).unwrap();
        assert!(m.max_abs_diff(&ComplexMatrix::diagonal(&[1.0, 0.0])) < 1e-12);
        let t = trace_of_function_on_family(&f, hinge, 0).unwrap();
        assert!((t - 0.5).abs() < 1e-12);
    }
}
