use super::frames::field_frames;
use super::grid::{check_compatible, DSField, MatrixField, MixtureField};
use crate::error::{Error, Result};
use crate::finite::{fit_residual, ProbabilityVector};
use crate::linalg::{ComplexMatrix, EigenColumns, Unitary};
use crate::tolerance::Tolerances;

/// Exact two-term certificate for `n = 2` fields from a continuous witness
/// field `X`.
///
/// With `f = X₁₁ = cos²θ`, the rotations `[[c, s], [−s, c]]` and
/// `[[c, −s], [s, c]]` averaged with weights ½ realize `X` on every diagonal
/// matrix, and both depend continuously on `X`. The witness must be
/// expressed in `frames` when they are given, otherwise in the frames of
/// [`field_frames`].
pub fn exact_mixture_field_2x2(
    a: &MatrixField,
    b: &MatrixField,
    x: &DSField,
    frames: Option<(&[EigenColumns], &[EigenColumns])>,
    seed: u64,
    tol: &Tolerances,
) -> Result<MixtureField> {
    check_compatible(a, b)?;
    if a.n() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            actual: a.n(),
        });
    }
    if x.space() != a.space() {
        return Err(Error::SpaceMismatch);
    }
    if x.get(0).n() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            actual: x.get(0).n(),
        });
    }
    let (ea, eb) = match frames {
        Some((ea, eb)) => {
            if ea.len() != a.len() || eb.len() != b.len() {
                return Err(Error::DimensionMismatch(
                    "one diagonalization per grid point is required".into(),
                ));
            }
            (ea.to_vec(), eb.to_vec())
        }
        None => (field_frames(a, seed, tol)?, field_frames(b, seed, tol)?),
    };

    let len = a.len();
    let mut middles = Vec::with_capacity(len);
    for (p, xp) in x.matrices().iter().enumerate() {
        let residual = fit_residual(xp.entries(), &ea[p].lambda, &eb[p].lambda);
        if residual > tol.feasibility_for(eb[p].max_abs()) {
            return Err(Error::NotAWitness { point: p, residual });
        }
        let (w1, w2) = rotation_pair(xp.get(0, 0))?;
        middles.push(vec![w1, w2]);
    }
    MixtureField::new(
        a.space().clone(),
        ProbabilityVector::uniform(2),
        (0..len).map(|p| vec![p]).collect(),
        middles,
        eb.iter().map(|e| e.diagonalizer.adjoint()).collect(),
        ea.iter().map(|e| e.diagonalizer.clone()).collect(),
    )
}

/// `([[c, s], [−s, c]], [[c, −s], [s, c]])` with `c = √f`, `s = √(1 − f)`.
fn rotation_pair(f: f64) -> Result<(Unitary, Unitary)> {
    let theta = f.clamp(0.0, 1.0).sqrt().acos();
    let (s, c) = theta.sin_cos();
    let w1 = ComplexMatrix::from_real_rows(&[vec![c, s], vec![-s, c]]);
    let w2 = ComplexMatrix::from_real_rows(&[vec![c, -s], vec![s, c]]);
    Ok((Unitary::new(w1)?, Unitary::new(w2)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpace;
    use crate::finite::DoublyStochastic;
    use crate::linalg::AbelianFamily;

    #[test]
    fn rotations_average_to_the_witness() {
        let f: f64 = 0.3;
        let (w1, w2) = rotation_pair(f).unwrap();
        let d = ComplexMatrix::diagonal(&[2.0, -1.0]);
        let avg = &d.conjugate_by(w1.matrix()).scale(0.5) + &d.conjugate_by(w2.matrix()).scale(0.5);
        let expected = [f * 2.0 - (1.0 - f), (1.0 - f) * 2.0 - f];
        assert!(avg.max_abs_diff(&ComplexMatrix::diagonal(&expected)) < 1e-14);
    }

    #[test]
    fn certifies_a_supplied_witness_field() {
        let space = GridSpace::uniform(0.0, 1.0, 0.1).unwrap();
        let xs: Vec<DoublyStochastic> = space
            .points()
            .iter()
            .map(|p| {
                let f = 0.5 + 0.5 * p[0];
                DoublyStochastic::from_rows(&[vec![f, 1.0 - f], vec![1.0 - f, f]]).unwrap()
            })
            .collect();
        let x = DSField::new(space.clone(), xs).unwrap();
        let lb = [3.0, -1.0];
        let b = MatrixField::from_fn(space.clone(), |_| {
            AbelianFamily::new(vec![ComplexMatrix::diagonal(&lb)])
        })
        .unwrap();
        let a = MatrixField::from_fn(space, |p| {
            let f = 0.5 + 0.5 * p[0];
            AbelianFamily::new(vec![ComplexMatrix::diagonal(&[
                f * lb[0] + (1.0 - f) * lb[1],
                (1.0 - f) * lb[0] + f * lb[1],
            ])])
        })
        .unwrap();
        let tol = Tolerances::default();
        let mix = exact_mixture_field_2x2(&a, &b, &x, None, 0, &tol).unwrap();
        assert!(mix.max_residual(&a, &b).unwrap() < 1e-12);
        assert_eq!(mix.weights().weights(), &[0.5, 0.5]);
    }

    #[test]
    fn rejects_a_non_witness() {
        let space = GridSpace::line(vec![0.0]).unwrap();
        let b = MatrixField::from_fn(space.clone(), |_| {
            AbelianFamily::new(vec![ComplexMatrix::diagonal(&[1.0, 0.0])])
        })
        .unwrap();
        let x = DSField::new(space, vec![DoublyStochastic::flat(2)]).unwrap();
        assert!(matches!(
            exact_mixture_field_2x2(&b, &b, &x, None, 0, &Tolerances::default()),
            Err(Error::NotAWitness { point: 0, .. })
        ));
    }
}
