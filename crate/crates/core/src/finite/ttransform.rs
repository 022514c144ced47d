//! T-transform chains for vector majorization and their expansion into
//! uniform mixtures of planar rotations.

use nalgebra::DMatrix;

use super::mixture::UnitaryMixture;
use super::prob::ProbabilityVector;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, EigenColumns, Unitary, C64};

/// `t · I + (1 − t) · swap(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTransform {
    i: usize,
    j: usize,
    t: f64,
}

impl TTransform {
    pub fn new(i: usize, j: usize, t: f64) -> Result<Self> {
        if i == j {
            return Err(Error::InvalidTTransform(format!("indices coincide at {i}")));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidTTransform(format!("t = {t} outside [0, 1]")));
        }
        Ok(TTransform { i, j, t })
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Rotation angle with `cos² θ = t`.
    pub fn angle(&self) -> f64 {
        self.t.sqrt().clamp(0.0, 1.0).acos()
    }

    pub fn matrix(&self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::identity(n, n);
        m[(self.i, self.i)] = self.t;
        m[(self.j, self.j)] = self.t;
        m[(self.i, self.j)] = 1.0 - self.t;
        m[(self.j, self.i)] = 1.0 - self.t;
        m
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        out[self.i] = self.t * v[self.i] + (1.0 - self.t) * v[self.j];
        out[self.j] = self.t * v[self.j] + (1.0 - self.t) * v[self.i];
        out
    }

    /// The two rotations averaging to this transform on diagonals:
    /// `diag(T c) = ½ (W₁* diag(c) W₁ + W₂* diag(c) W₂)`.
    pub fn rotations(&self, n: usize) -> [ComplexMatrix; 2] {
        let theta = self.angle();
        let (s, c) = theta.sin_cos();
        let build = |sign: f64| {
            let mut w = ComplexMatrix::identity(n);
            w.set(self.i, self.i, C64::new(c, 0.0));
            w.set(self.j, self.j, C64::new(c, 0.0));
            w.set(self.j, self.i, C64::new(sign * s, 0.0));
            w.set(self.i, self.j, C64::new(-sign * s, 0.0));
            w
        };
        [build(1.0), build(-1.0)]
    }
}

/// `a ≺ b` for real vectors: equal sums and dominated sorted partial sums,
/// all within `tol`.
pub fn vector_majorized(a: &[f64], b: &[f64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let sa = sorted_desc(a);
    let sb = sorted_desc(b);
    let (mut pa, mut pb) = (0.0, 0.0);
    for (x, y) in sa.iter().zip(&sb) {
        pa += x;
        pb += y;
        if pa > pb + tol {
            return false;
        }
    }
    (pa - pb).abs() <= tol
}

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Indices ordering `v` descending (stable).
fn descending_order(v: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&x, &y| v[y].total_cmp(&v[x]));
    order
}

/// Result of [`t_transform_chain`].
///
/// `steps` and `vectors` live in descending-sorted coordinates:
/// `vectors[0]` is `b` sorted, `vectors[k + 1] = steps[k] · vectors[k]`, and
/// the last vector is `a` sorted. The mixture acts in the original
/// coordinates: `diag(a) ≈ Σ 2^{1−n} Wᵢ* diag(b) Wᵢ`.
#[derive(Debug, Clone)]
pub struct TTransformChain {
    pub steps: Vec<TTransform>,
    pub vectors: Vec<Vec<f64>>,
    pub mixture: UnitaryMixture,
}

/// Builds a chain of at most `n − 1` T-transforms taking `b` to `a` and
/// expands it into `2^{n−1}` equally weighted products of rotations.
pub fn t_transform_chain(a: &[f64], b: &[f64]) -> Result<TTransformChain> {
    let n = a.len();
    if n == 0 || b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    let scale = a.iter().chain(b).fold(0.0_f64, |m, x| m.max(x.abs()));
    let check_tol = 1e-9 * (1.0 + scale);
    if !vector_majorized(a, b, check_tol) {
        return Err(Error::NotMajorized(format!("{a:?} is not majorized by {b:?}")));
    }
    let order_a = descending_order(a);
    let order_b = descending_order(b);
    let target: Vec<f64> = order_a.iter().map(|&i| a[i]).collect();
    let mut c: Vec<f64> = order_b.iter().map(|&i| b[i]).collect();
    let eq_tol = 1e-12 * (1.0 + scale);

    let mut steps = Vec::new();
    let mut vectors = vec![c.clone()];
    while steps.len() < n - 1 {
        let Some(j) = (0..n).rev().find(|&j| c[j] > target[j] + eq_tol) else {
            break;
        };
        let Some(k) = (j + 1..n).find(|&k| c[k] < target[k] - eq_tol) else {
            break;
        };
        let down = c[j] - target[j];
        let up = target[k] - c[k];
        let delta = down.min(up);
        let t = (1.0 - delta / (c[j] - c[k])).clamp(0.0, 1.0);
        if down <= up {
            c[j] = target[j];
            c[k] += delta;
        } else {
            c[k] = target[k];
            c[j] -= delta;
        }
        steps.push(TTransform::new(j, k, t)?);
        vectors.push(c.clone());
    }

    // Pad with identity steps so there are exactly n − 1 rotation pairs.
    let mut pairs: Vec<[ComplexMatrix; 2]> = steps.iter().map(|s| s.rotations(n)).collect();
    while pairs.len() < n - 1 {
        pairs.push([ComplexMatrix::identity(n), ComplexMatrix::identity(n)]);
    }
    let mut products = vec![ComplexMatrix::identity(n)];
    for pair in &pairs {
        products = products
            .iter()
            .flat_map(|r| pair.iter().map(move |w| r * w))
            .collect();
    }
    let q_a = ComplexMatrix::permutation(&order_a);
    let q_b_t = ComplexMatrix::permutation(&order_b).transpose();
    let unitaries = products
        .into_iter()
        .map(|r| Unitary::with_tolerance(&(&q_b_t * &r) * &q_a, 1e-9))
        .collect::<Result<Vec<_>>>()?;
    let count = unitaries.len();
    let mixture = UnitaryMixture::new(ProbabilityVector::uniform(count), unitaries)?;
    Ok(TTransformChain {
        steps,
        vectors,
        mixture,
    })
}

/// Chain for single-operator families given their diagonalizations; the
/// unitaries are conjugated to `V* W U`.
pub fn t_transform_mixture(eigen_a: &EigenColumns, eigen_b: &EigenColumns) -> Result<TTransformChain> {
    if eigen_a.m() != 1 || eigen_b.m() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "T-transform certificates need single operators, got m = {} and {}",
            eigen_a.m(),
            eigen_b.m()
        )));
    }
    let chain = t_transform_chain(&eigen_a.column(0), &eigen_b.column(0))?;
    let u = eigen_a.diagonalizer.matrix();
    let v_adj = eigen_b.diagonalizer.matrix().adjoint();
    let unitaries = chain
        .mixture
        .unitaries()
        .iter()
        .map(|w| Unitary::with_tolerance(&(&v_adj * w.matrix()) * u, 1e-8))
        .collect::<Result<Vec<_>>>()?;
    let mixture = UnitaryMixture::new(chain.mixture.weights().clone(), unitaries)?;
    Ok(TTransformChain { mixture, ..chain })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::AbelianFamily;

    fn diag_residual(chain: &TTransformChain, a: &[f64], b: &[f64]) -> f64 {
        let fa = AbelianFamily::new(vec![ComplexMatrix::diagonal(a)]).unwrap();
        let fb = AbelianFamily::new(vec![ComplexMatrix::diagonal(b)]).unwrap();
        chain.mixture.residual(&fa, &fb).unwrap()
    }

    #[test]
    fn two_point_averaging() {
        let chain = t_transform_chain(&[1.0, 1.0], &[2.0, 0.0]).unwrap();
        assert_eq!(chain.steps.len(), 1);
        let s = chain.steps[0];
        assert_eq!((s.i(), s.j()), (0, 1));
        assert!((s.t() - 0.5).abs() < 1e-15);
        assert!((s.angle() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(chain.mixture.len(), 2);
        assert!(diag_residual(&chain, &[1.0, 1.0], &[2.0, 0.0]) < 1e-15);
    }

    #[test]
    fn equal_vectors_give_identities() {
        let v = [3.0, -1.0, 0.5];
        let chain = t_transform_chain(&v, &v).unwrap();
        assert!(chain.steps.is_empty());
        assert_eq!(chain.mixture.len(), 4);
        for u in chain.mixture.unitaries() {
            let id = ComplexMatrix::identity(3);
            assert!(u.matrix().max_abs_diff(&id) < 1e-15);
        }
    }

    #[test]
    fn three_point_spreading() {
        let (a, b) = ([1.0, 1.0, 1.0], [3.0, 0.0, 0.0]);
        let chain = t_transform_chain(&a, &b).unwrap();
        assert!(chain.steps.len() <= 2);
        assert_eq!(chain.mixture.len(), 4);
        assert!(chain.mixture.weights().weights().iter().all(|&w| w == 0.25));
        assert!(diag_residual(&chain, &a, &b) <= 1e-8);
    }

    #[test]
    fn unsorted_inputs_are_lifted() {
        let (a, b) = ([0.5, 2.0, 1.5], [0.0, 1.0, 3.0]);
        let chain = t_transform_chain(&a, &b).unwrap();
        assert!(diag_residual(&chain, &a, &b) <= 1e-12);
    }

    #[test]
    fn rejects_non_majorized() {
        assert!(matches!(
            t_transform_chain(&[2.0, 0.0], &[1.0, 1.0]),
            Err(Error::NotMajorized(_))
        ));
    }

    #[test]
    fn rotation_pair_averages_to_t_transform() {
        let t = TTransform::new(0, 2, 0.3).unwrap();
        let c = [4.0, -1.0, 2.0];
        let d = ComplexMatrix::diagonal(&c);
        let [w1, w2] = t.rotations(3);
        let avg = &d.conjugate_by(&w1).scale(0.5) + &d.conjugate_by(&w2).scale(0.5);
        assert!(avg.max_abs_diff(&ComplexMatrix::diagonal(&t.apply(&c))) < 1e-14);
        let tc = t.matrix(3) * nalgebra::DVector::from_column_slice(&c);
        assert!(tc.iter().zip(t.apply(&c)).all(|(x, y)| (x - y).abs() < 1e-15));
    }

    #[test]
    fn partial_sum_test() {
        assert!(vector_majorized(&[1.0, 1.0], &[2.0, 0.0], 1e-12));
        assert!(!vector_majorized(&[2.0, 0.0], &[1.0, 1.0], 1e-12));
        assert!(!vector_majorized(&[1.0, 1.0], &[1.0, 0.0], 1e-12));
    }
}
