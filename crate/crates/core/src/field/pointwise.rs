use super::frames::field_frames;
use super::grid::{check_compatible, DSField, MatrixField};
use crate::error::Result;
use crate::finite::{find_ds_witness, refute_on_eigenvalues, DoublyStochastic, HyperplaneMaxFunction};
use crate::linalg::{joint_diagonalize_with, EigenColumns};
use crate::tolerance::Tolerances;

/// Outcome of [`pointwise_majorization_check`].
#[derive(Debug, Clone)]
pub struct PointwiseCheck {
    pub majorized: bool,
    /// Present only when every grid point has a witness.
    pub witnesses: Option<DSField>,
    /// Grid indices without a witness, in increasing order.
    pub failures: Vec<usize>,
}

/// Witness search at every grid point.
///
/// Points are visited in grid order; each search prefers the witness nearest
/// to the previous point's (the identity at the first point). Both fields are
/// expressed in the frames of [`field_frames`].
pub fn pointwise_majorization_check(
    a: &MatrixField,
    b: &MatrixField,
    seed: u64,
    tol: &Tolerances,
) -> Result<PointwiseCheck> {
    check_compatible(a, b)?;
    let ea = field_frames(a, seed, tol)?;
    let eb = field_frames(b, seed, tol)?;
    let found = witnesses_along(&ea, &eb, tol)?;
    let failures: Vec<usize> = found
        .iter()
        .enumerate()
        .filter(|(_, w)| w.is_none())
        .map(|(i, _)| i)
        .collect();
    let witnesses = if failures.is_empty() {
        Some(DSField::new(a.space().clone(), found.into_iter().flatten().collect())?)
    } else {
        None
    };
    Ok(PointwiseCheck {
        majorized: failures.is_empty(),
        witnesses,
        failures,
    })
}

/// Per-point witnesses for already diagonalized fields.
pub(crate) fn witnesses_along(
    ea: &[EigenColumns],
    eb: &[EigenColumns],
    tol: &Tolerances,
) -> Result<Vec<Option<DoublyStochastic>>> {
    let n = ea[0].n();
    let mut reference = DoublyStochastic::identity(n);
    let mut out = Vec::with_capacity(ea.len());
    for (fa, fb) in ea.iter().zip(eb) {
        let feas = tol.feasibility_for(fb.max_abs());
        let w = find_ds_witness(&fa.lambda, &fb.lambda, Some(&reference), Some(feas))?;
        if let Some(x) = &w {
            reference = x.clone();
        }
        out.push(w);
    }
    Ok(out)
}

/// First grid point (and test function) at which `tr g(A(x)) > tr g(B(x))`
/// is found by [`refute_on_eigenvalues`].
pub fn tracial_field_refuter(
    a: &MatrixField,
    b: &MatrixField,
    trials: usize,
    seed: u64,
) -> Result<Option<(usize, HyperplaneMaxFunction)>> {
    check_compatible(a, b)?;
    let tol = Tolerances::default();
    for (i, (fa, fb)) in a.families().iter().zip(b.families()).enumerate() {
        let la = joint_diagonalize_with(fa, seed, &tol)?.lambda;
        let lb = joint_diagonalize_with(fb, seed, &tol)?.lambda;
        if let Some(g) = refute_on_eigenvalues(&la, &lb, trials, seed) {
            return Ok(Some((i, g)));
        }
    }
    Ok(None)
}
