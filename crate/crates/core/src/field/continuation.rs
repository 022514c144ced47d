use super::frames::field_frames;
use super::grid::{check_compatible, DSField, MatrixField};
use super::pointwise::witnesses_along;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Output of [`continuation_ds_probe`]. A large jump is numerical evidence,
/// not a proof, that no continuous witness field exists.
#[derive(Debug, Clone)]
pub struct ContinuationReport {
    pub ds_field: DSField,
    /// `‖X_{k+1} − X_k‖_F` for consecutive grid points.
    pub jumps: Vec<f64>,
    pub max_jump: f64,
    /// Grid indices `(k, k + 1)` of the largest jump.
    pub jump_location: (usize, usize),
}

/// Follows witnesses along a one-dimensional grid, each chosen nearest to the
/// previous one, and reports the jumps between consecutive witnesses.
pub fn continuation_ds_probe(
    a: &MatrixField,
    b: &MatrixField,
    seed: u64,
    tol: &Tolerances,
) -> Result<ContinuationReport> {
    check_compatible(a, b)?;
    if a.space().dim() != 1 {
        return Err(Error::InvalidGrid(format!(
            "the continuation probe needs a one-dimensional grid, got dimension {}",
            a.space().dim()
        )));
    }
    let ea = field_frames(a, seed, tol)?;
    let eb = field_frames(b, seed, tol)?;
    let found = witnesses_along(&ea, &eb, tol)?;
    let failures: Vec<usize> = found
        .iter()
        .enumerate()
        .filter(|(_, w)| w.is_none())
        .map(|(i, _)| i)
        .collect();
    if !failures.is_empty() {
        return Err(Error::NotPointwiseMajorized { points: failures });
    }
    let ds_field = DSField::new(a.space().clone(), found.into_iter().flatten().collect())?;
    let jumps = ds_field.increments();
    let (mut max_jump, mut at) = (0.0, 0);
    for (k, &j) in jumps.iter().enumerate() {
        if j > max_jump {
            max_jump = j;
            at = k;
        }
    }
    let jump_location = if jumps.is_empty() { (0, 0) } else { (at, at + 1) };
    Ok(ContinuationReport {
        ds_field,
        jumps,
        max_jump,
        jump_location,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpace;
    use crate::linalg::{AbelianFamily, ComplexMatrix};

    #[test]
    fn sign_flip_forces_a_jump_at_zero() {
        let space = GridSpace::uniform(-1.0, 1.0, 0.01).unwrap();
        let a = MatrixField::from_fn(space.clone(), |p| {
            AbelianFamily::new(vec![ComplexMatrix::diagonal(&[p[0], -p[0]])])
        })
        .unwrap();
        let b = MatrixField::from_fn(space, |p| {
            AbelianFamily::new(vec![ComplexMatrix::diagonal(&[p[0].abs(), -p[0].abs()])])
        })
        .unwrap();
        let report = continuation_ds_probe(&a, &b, 0, &Tolerances::default()).unwrap();
        assert!((report.max_jump - 2.0).abs() < 1e-6);
        assert_eq!(report.jump_location, (100, 101));
        assert_eq!(report.jumps.len(), 200);
    }

    #[test]
    fn plane_grids_are_rejected() {
        let space = GridSpace::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let a = MatrixField::from_fn(space, |_| {
            AbelianFamily::new(vec![ComplexMatrix::diagonal(&[1.0])])
        })
        .unwrap();
        assert!(matches!(
            continuation_ds_probe(&a, &a, 0, &Tolerances::default()),
            Err(Error::InvalidGrid(_))
        ));
    }
}
