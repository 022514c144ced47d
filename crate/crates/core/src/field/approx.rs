use super::frames::field_frames;
use super::grid::{check_compatible, MatrixField, MixtureField};
use super::pointwise::witnesses_along;
use crate::error::{Error, Result};
use crate::finite::{birkhoff_decompose, merge_probability_vectors, BirkhoffTerm, ProbabilityVector};
use crate::linalg::{EigenColumns, Unitary};
use crate::tolerance::Tolerances;

/// Largest product-merge size accepted before falling back to rounding.
const MERGE_LIMIT: usize = 4096;

/// Output of [`approx_hull_membership`].
#[derive(Debug, Clone)]
pub struct ApproxCertificate {
    pub mixture: MixtureField,
    /// Measured `max_j max_x ‖A_j(x) − Σᵢ tᵢ Wᵢ(x)* B_j(x) Wᵢ(x)‖_max`.
    pub residual: f64,
    pub epsilon: f64,
}

impl ApproxCertificate {
    /// Guaranteed residual bound `4ε`.
    pub fn bound(&self) -> f64 {
        4.0 * self.epsilon
    }
}

/// Smallest `ε` accepted for fields whose `B` eigenvalues have max-norm `scale`.
pub fn epsilon_floor(scale: f64, tol: &Tolerances) -> f64 {
    1e3 * tol.feasibility_for(scale)
}

/// `ε`-approximate membership of `A` in the closed convex hull of the joint
/// unitary orbit of `B`, with one global weight vector and unitaries that are
/// constant on cells up to the per-point diagonalizers.
///
/// Grid points are grouped (in index order) into cells on which every
/// eigenvalue entry oscillates by less than `ε`. Each cell takes the Birkhoff
/// decomposition of the witness at its middle point. The per-cell weight
/// vectors are merged exactly when there are at most three cells, and
/// otherwise rounded to a common denominator `D ≥ ℓ_max ‖Λ_B‖ / ε`, with each
/// global term being a run of identical replicas. The measured residual is
/// at most `4ε`.
pub fn approx_hull_membership(
    a: &MatrixField,
    b: &MatrixField,
    epsilon: f64,
    seed: u64,
    tol: &Tolerances,
) -> Result<ApproxCertificate> {
    check_compatible(a, b)?;
    let ea = field_frames(a, seed, tol)?;
    let eb = field_frames(b, seed, tol)?;
    let scale = eb.iter().map(EigenColumns::max_abs).fold(0.0, f64::max);
    let floor = epsilon_floor(scale, tol);
    if !(epsilon > floor) || !epsilon.is_finite() {
        return Err(Error::EpsilonTooSmall { epsilon, floor });
    }
    let witnesses = witnesses_along(&ea, &eb, tol)?;
    let failures: Vec<usize> = witnesses
        .iter()
        .enumerate()
        .filter(|(_, w)| w.is_none())
        .map(|(i, _)| i)
        .collect();
    if !failures.is_empty() {
        return Err(Error::NotPointwiseMajorized { points: failures });
    }

    let cells = partition_cells(&ea, &eb, epsilon);
    let decompositions = cells
        .iter()
        .map(|cell| {
            let rep = cell[(cell.len() - 1) / 2];
            birkhoff_decompose(witnesses[rep].as_ref().expect("all points have witnesses"))
        })
        .collect::<Result<Vec<_>>>()?;
    let (weights, middles) = unify(&decompositions, scale, epsilon)?;

    let mixture = MixtureField::new(
        a.space().clone(),
        weights,
        cells,
        middles,
        eb.iter().map(|e| e.diagonalizer.adjoint()).collect(),
        ea.iter().map(|e| e.diagonalizer.clone()).collect(),
    )?;
    let residual = mixture.max_residual(a, b)?;
    Ok(ApproxCertificate {
        mixture,
        residual,
        epsilon,
    })
}

/// Greedy cells of consecutive grid indices on which every entry of `Λ_A`
/// and `Λ_B` stays within an interval shorter than `ε`.
fn partition_cells(ea: &[EigenColumns], eb: &[EigenColumns], epsilon: f64) -> Vec<Vec<usize>> {
    let mut cells: Vec<Vec<usize>> = Vec::new();
    let mut lo: Vec<f64> = Vec::new();
    let mut hi: Vec<f64> = Vec::new();
    for (p, (fa, fb)) in ea.iter().zip(eb).enumerate() {
        let entries: Vec<f64> = fa.lambda.iter().chain(fb.lambda.iter()).copied().collect();
        let fits = !cells.is_empty()
            && entries
                .iter()
                .enumerate()
                .all(|(k, v)| v.max(hi[k]) - v.min(lo[k]) < epsilon);
        if fits {
            for (k, v) in entries.iter().enumerate() {
                lo[k] = lo[k].min(*v);
                hi[k] = hi[k].max(*v);
            }
            cells.last_mut().expect("nonempty").push(p);
        } else {
            lo = entries.clone();
            hi = entries;
            cells.push(vec![p]);
        }
    }
    cells
}

type Unified = (ProbabilityVector, Vec<Vec<Unitary>>);

/// One global weight vector and, per cell, one middle unitary `Pᵀ` per weight.
fn unify(decompositions: &[Vec<BirkhoffTerm>], scale: f64, epsilon: f64) -> Result<Unified> {
    let ell = decompositions.iter().map(Vec::len).max().unwrap_or(1);
    let product = ell.checked_pow(decompositions.len() as u32);
    if decompositions.len() <= 3 && matches!(product, Some(p) if p <= MERGE_LIMIT) {
        merge_exact(decompositions, ell)
    } else {
        merge_rounded(decompositions, ell, scale, epsilon)
    }
}

fn middle(term: &BirkhoffTerm) -> Unitary {
    term.permutation.transpose().to_unitary()
}

fn merge_exact(decompositions: &[Vec<BirkhoffTerm>], ell: usize) -> Result<Unified> {
    let vectors = decompositions
        .iter()
        .map(|d| Ok(ProbabilityVector::new(d.iter().map(|t| t.weight).collect())?.padded(ell)))
        .collect::<Result<Vec<_>>>()?;
    let (merged, partitions) = merge_probability_vectors(&vectors)?;
    // owner[c][p] is the block of cell c containing merged index p.
    let total = merged.len();
    let mut owner = vec![vec![0usize; total]; decompositions.len()];
    for (c, blocks) in partitions.iter().enumerate() {
        for (i, block) in blocks.iter().enumerate() {
            for &p in block {
                owner[c][p] = i;
            }
        }
    }
    let kept: Vec<usize> = (0..total).filter(|&p| merged.weights()[p] > 0.0).collect();
    let weights = ProbabilityVector::normalized(kept.iter().map(|&p| merged.weights()[p]).collect())?;
    let middles = decompositions
        .iter()
        .enumerate()
        .map(|(c, terms)| kept.iter().map(|&p| middle(&terms[owner[c][p]])).collect())
        .collect();
    Ok((weights, middles))
}

fn merge_rounded(
    decompositions: &[Vec<BirkhoffTerm>],
    ell: usize,
    scale: f64,
    epsilon: f64,
) -> Result<Unified> {
    let denominator = ((ell as f64 * scale.max(f64::MIN_POSITIVE)) / epsilon).ceil().max(1.0) as u64;
    let cumulative: Vec<Vec<u64>> = decompositions
        .iter()
        .map(|terms| {
            let counts = round_to_denominator(&terms.iter().map(|t| t.weight).collect::<Vec<_>>(), denominator);
            let mut acc = 0;
            let mut cum = vec![0];
            for k in counts {
                acc += k;
                cum.push(acc);
            }
            cum
        })
        .collect();
    let mut breaks: Vec<u64> = cumulative.iter().flatten().copied().collect();
    breaks.sort_unstable();
    breaks.dedup();

    let d = denominator as f64;
    let weights = ProbabilityVector::normalized(breaks.windows(2).map(|w| (w[1] - w[0]) as f64 / d).collect())?;
    let middles = decompositions
        .iter()
        .zip(&cumulative)
        .map(|(terms, cum)| {
            breaks
                .windows(2)
                .map(|w| {
                    // The block of this cell whose replica range contains w[0].
                    let i = cum.partition_point(|&c| c <= w[0]) - 1;
                    middle(&terms[i])
                })
                .collect()
        })
        .collect();
    Ok((weights, middles))
}

/// Integer counts summing to `denominator` with `|kᵢ/D − tᵢ| < 1/D`, by
/// largest remainder (ties to the lower index).
fn round_to_denominator(weights: &[f64], denominator: u64) -> Vec<u64> {
    let d = denominator as f64;
    let mut counts: Vec<u64> = weights.iter().map(|t| (t * d).floor() as u64).collect();
    let assigned: u64 = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&i, &j| {
        let ri = weights[i] * d - counts[i] as f64;
        let rj = weights[j] * d - counts[j] as f64;
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    for &i in order.iter().take(denominator.saturating_sub(assigned) as usize) {
        counts[i] += 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridSpace;
    use crate::linalg::{AbelianFamily, ComplexMatrix};

    fn diag_field(space: &GridSpace, f: impl Fn(f64) -> Vec<f64>) -> MatrixField {
        MatrixField::from_fn(space.clone(), |p| {
            AbelianFamily::new(vec![ComplexMatrix::diagonal(&f(p[0]))])
        })
        .unwrap()
    }

    #[test]
    fn constant_equal_fields_need_one_term() {
        let space = GridSpace::uniform(0.0, 1.0, 0.1).unwrap();
        let a = diag_field(&space, |_| vec![1.0, -2.0, 0.5]);
        let cert = approx_hull_membership(&a, &a, 0.1, 0, &Tolerances::default()).unwrap();
        assert_eq!(cert.mixture.cells().len(), 1);
        assert_eq!(cert.mixture.weights().len(), 1);
        assert!(cert.residual <= 1e-8);
    }

    #[test]
    fn sign_flip_pair_is_approximated() {
        let space = GridSpace::uniform(-1.0, 1.0, 0.005).unwrap();
        let a = diag_field(&space, |x| vec![x, -x]);
        let b = diag_field(&space, |x| vec![x.abs(), -x.abs()]);
        for eps in [0.2, 0.1, 0.05, 0.02] {
            let cert = approx_hull_membership(&a, &b, eps, 0, &Tolerances::default()).unwrap();
            assert!(cert.residual <= cert.bound(), "eps {eps}: {}", cert.residual);
        }
    }

    #[test]
    fn rounding_keeps_the_total() {
        let counts = round_to_denominator(&[0.333, 0.333, 0.334], 10);
        assert_eq!(counts.iter().sum::<u64>(), 10);
        assert_eq!(counts, vec![3, 3, 4]);
        for (k, t) in round_to_denominator(&[0.1, 0.25, 0.65], 7).iter().zip([0.1, 0.25, 0.65]) {
            assert!((*k as f64 / 7.0 - t).abs() < 1.0 / 7.0);
        }
    }

    #[test]
    fn tiny_epsilon_is_rejected() {
        let space = GridSpace::line(vec![0.0]).unwrap();
        let a = diag_field(&space, |_| vec![1.0]);
        assert!(matches!(
            approx_hull_membership(&a, &a, 1e-9, 0, &Tolerances::default()),
            Err(Error::EpsilonTooSmall { .. })
        ));
    }
}
