#![allow(dead_code)]

use majorize::linalg::{AbelianFamily, ComplexMatrix, Unitary, C64};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    let v: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Haar-ish unitary from the QR factor of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> Unitary {
    let g = DMatrix::from_fn(n, n, |_, _| C64::new(gaussian(rng), gaussian(rng)));
    let q = g.qr().q();
    Unitary::new(ComplexMatrix::from_inner(q)).expect("QR factor is unitary")
}

pub fn random_eigen(rng: &mut ChaCha8Rng, n: usize, m: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, m, |_, _| rng.random_range(-1.0..=1.0))
}

pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// Convex combination of up to `n + 1` random permutation matrices.
pub fn random_ds(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let k = rng.random_range(1..=n + 1);
    let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut x = DMatrix::zeros(n, n);
    for w in weights {
        for (i, j) in random_permutation(rng, n).into_iter().enumerate() {
            x[(i, j)] += w / total;
        }
    }
    x
}

/// `A_j = U* diag(column j) U`.
pub fn family(lambda: &DMatrix<f64>, u: &Unitary) -> AbelianFamily {
    AbelianFamily::from_eigen(lambda, u).expect("valid eigen data")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// `Λ_A = X Λ_B` for a random doubly stochastic `X`.
    Majorized,
    /// Independent eigenvalue data.
    Independent,
    /// A majorized pair pushed by a visible perturbation.
    Perturbed,
}

pub struct Pair {
    pub a: AbelianFamily,
    pub b: AbelianFamily,
    pub lambda_a: DMatrix<f64>,
    pub lambda_b: DMatrix<f64>,
}

pub fn random_pair(rng: &mut ChaCha8Rng, n: usize, m: usize, kind: PairKind) -> Pair {
    let lambda_b = random_eigen(rng, n, m);
    let lambda_a = match kind {
        PairKind::Majorized => random_ds(rng, n) * &lambda_b,
        PairKind::Independent => random_eigen(rng, n, m),
        PairKind::Perturbed => {
            let base = random_ds(rng, n) * &lambda_b;
            let size = rng.random_range(0.02..0.2);
            base.map(|v| v + size * rng.random_range(-1.0..=1.0))
        }
    };
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    Pair {
        a: family(&lambda_a, &u),
        b: family(&lambda_b, &v),
        lambda_a,
        lambda_b,
    }
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Affine minimizer `Σ μᵢ pᵢ` with `Σ μᵢ = 1` over the points indexed by `s`.
fn affine_minimizer(points: &[Vec<f64>], s: &[usize]) -> Vec<f64> {
    let k = s.len();
    let mut m = DMatrix::zeros(k + 1, k + 1);
    for a in 0..k {
        for b in 0..k {
            m[(a, b)] = dot(&points[s[a]], &points[s[b]]);
        }
        m[(a, k)] = 1.0;
        m[(k, a)] = 1.0;
    }
    let mut rhs = DVector::zeros(k + 1);
    rhs[k] = 1.0;
    let sol = m.svd(true, true).solve(&rhs, 1e-13).expect("SVD solve");
    sol.iter().take(k).copied().collect()
}

/// Wolfe's minimum-norm-point algorithm on the convex hull of `points`.
pub fn min_norm_point(points: &[Vec<f64>]) -> Vec<f64> {
    let scale = points.iter().map(|p| dot(p, p)).fold(0.0, f64::max).max(1e-300);
    let first = (0..points.len())
        .min_by(|&i, &j| dot(&points[i], &points[i]).total_cmp(&dot(&points[j], &points[j])))
        .expect("nonempty");
    let mut s = vec![first];
    let mut lam = vec![1.0];
    let mut x = points[first].clone();
    for _ in 0..10_000 {
        let (j, best) = (0..points.len())
            .map(|k| (k, dot(&x, &points[k])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if dot(&x, &x) - best <= 1e-15 * scale || s.contains(&j) {
            break;
        }
        s.push(j);
        lam.push(0.0);
        loop {
            let mu = affine_minimizer(points, &s);
            if mu.iter().all(|&v| v > 1e-15) {
                lam = mu;
                break;
            }
            let theta = lam
                .iter()
                .zip(&mu)
                .filter(|(_, &m)| m <= 1e-15)
                .map(|(&l, &m)| l / (l - m))
                .fold(1.0, f64::min);
            for (l, m) in lam.iter_mut().zip(&mu) {
                *l = theta * m + (1.0 - theta) * *l;
            }
            let keep: Vec<bool> = lam.iter().map(|&l| l > 1e-15).collect();
            s = s.iter().zip(&keep).filter(|(_, &k)| k).map(|(&i, _)| i).collect();
            lam = lam.iter().zip(&keep).filter(|(_, &k)| k).map(|(&l, _)| l).collect();
            let total: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|l| *l /= total);
        }
        x = vec![0.0; x.len()];
        for (&i, &l) in s.iter().zip(&lam) {
            for (xv, pv) in x.iter_mut().zip(&points[i]) {
                *xv += l * pv;
            }
        }
    }
    x
}

/// Euclidean distance from `target` to the hull of all row permutations of
/// `lambda_b`.
pub fn permutation_hull_distance(target: &DMatrix<f64>, lambda_b: &DMatrix<f64>) -> f64 {
    let (n, m) = lambda_b.shape();
    let points: Vec<Vec<f64>> = permutations(n)
        .into_iter()
        .map(|p| {
            let mut v = Vec::with_capacity(n * m);
            for (i, &pi) in p.iter().enumerate() {
                for j in 0..m {
                    v.push(lambda_b[(pi, j)] - target[(i, j)]);
                }
            }
            v
        })
        .collect();
    let x = min_norm_point(&points);
    dot(&x, &x).sqrt()
}

/// Oracle verdict: within `1e-7` of the permutation hull.
pub fn oracle_majorized(lambda_a: &DMatrix<f64>, lambda_b: &DMatrix<f64>) -> bool {
    permutation_hull_distance(lambda_a, lambda_b) <= 1e-7
}

/// Kind cycling used by seeded oracle runs.
pub fn kind_for(i: usize) -> PairKind {
    match i % 3 {
        0 => PairKind::Majorized,
        1 => PairKind::Independent,
        _ => PairKind::Perturbed,
    }
}
