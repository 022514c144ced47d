//! Per-point diagonalizations arranged so the eigenvalue rows follow
//! continuous branches along the grid.

use nalgebra::DMatrix;

use super::grid::MatrixField;
use crate::error::Result;
use crate::linalg::{joint_diagonalize_with, ComplexMatrix, EigenColumns, Unitary};
use crate::tolerance::Tolerances;

/// Diagonalizations of every grid point of `field`.
///
/// When every member at every point is diagonal, the natural frame is used:
/// `U = I` and the rows of `Λ` are the diagonal entries in index order.
/// Otherwise each point is jointly diagonalized and its rows are matched to
/// the previous point's by largest eigenvector overlap.
pub fn field_frames(field: &MatrixField, seed: u64, tol: &Tolerances) -> Result<Vec<EigenColumns>> {
    if is_diagonal_field(field, tol) {
        return Ok(field.families().iter().map(natural_frame).collect());
    }
    let mut out: Vec<EigenColumns> = Vec::with_capacity(field.len());
    for family in field.families() {
        let cur = joint_diagonalize_with(family, seed, tol)?;
        let aligned = match out.last() {
            Some(prev) => align_to(prev, cur)?,
            None => cur,
        };
        out.push(aligned);
    }
    Ok(out)
}

fn is_diagonal_field(field: &MatrixField, tol: &Tolerances) -> bool {
    let limit = tol.diagonal * (1.0 + field.max_abs());
    field
        .families()
        .iter()
        .flat_map(|f| f.members())
        .all(|a| a.off_diagonal_max() <= limit)
}

fn natural_frame(family: &crate::linalg::AbelianFamily) -> EigenColumns {
    let n = family.n();
    let lambda = DMatrix::from_fn(n, family.m(), |i, j| family.members()[j].get(i, i).re);
    EigenColumns {
        lambda,
        diagonalizer: Unitary::identity(n),
    }
}

/// Reorders the rows of `cur` to follow `prev`, greedily pairing the rows
/// (eigenvectors) with the largest overlap `|⟨u_i, v_j⟩|²`.
fn align_to(prev: &EigenColumns, cur: EigenColumns) -> Result<EigenColumns> {
    let n = cur.n();
    let overlap = prev.diagonalizer.matrix() * &cur.diagonalizer.matrix().adjoint();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for _ in 0..n {
        let mut best = (0, 0, -1.0);
        for i in (0..n).filter(|&i| perm[i] == usize::MAX) {
            for j in (0..n).filter(|&j| !used[j]) {
                let o = overlap.get(i, j).norm_sqr();
                if o > best.2 {
                    best = (i, j, o);
                }
            }
        }
        perm[best.0] = best.1;
        used[best.1] = true;
    }
    let lambda = DMatrix::from_fn(n, cur.m(), |i, j| cur.lambda[(perm[i], j)]);
    let u = cur.diagonalizer.matrix();
    let rows = ComplexMatrix::from_fn(n, n, |i, j| u.get(perm[i], j));
    Ok(EigenColumns {
        lambda,
        diagonalizer: Unitary::with_tolerance(rows, 1e-9)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpace;
    use crate::linalg::AbelianFamily;

    #[test]
    fn diagonal_fields_keep_index_order() {
        let space = GridSpace::line(vec![-1.0, 1.0]).unwrap();
        let field = MatrixField::from_fn(space, |p| {
            AbelianFamily::new(vec![ComplexMatrix::diagonal(&[p[0], -p[0]])])
        })
        .unwrap();
        let frames = field_frames(&field, 0, &Tolerances::default()).unwrap();
        assert_eq!(frames[0].column(0), vec![-1.0, 1.0]);
        assert_eq!(frames[1].column(0), vec![1.0, -1.0]);
    }

    #[test]
    fn rotated_branches_are_followed_through_a_crossing() {
        // R(φ)* diag(x, −x) R(φ) with a fixed rotation: eigenvalue branches
        // cross at x = 0 and the tracked rows must not swap.
        let (c, s) = (0.6, 0.8);
        let r = ComplexMatrix::from_real_rows(&[vec![c, -s], vec![s, c]]);
        let space = GridSpace::uniform(-1.0, 1.0, 0.25).unwrap();
        let field = MatrixField::from_fn(space, |p| {
            AbelianFamily::new(vec![ComplexMatrix::diagonal(&[p[0], -p[0]]).conjugate_by(&r)])
        })
        .unwrap();
        let frames = field_frames(&field, 3, &Tolerances::default()).unwrap();
        for (k, f) in frames.iter().enumerate() {
            let x = field.space().x(k);
            assert!((f.lambda[(0, 0)] + x).abs() < 1e-12, "row 0 follows −x");
            let d = ComplexMatrix::diagonal(&f.column(0)).conjugate_by(f.diagonalizer.matrix());
            assert!(d.max_abs_diff(&field.family(k).members()[0]) < 1e-12);
        }
    }
}
