mod common;

use common::*;
use majorize::finite::{
    birkhoff_decompose, birkhoff_greedy, combine_direct_sum, decide_joint_majorization,
    ds_as_diagonal_channel, merge_probability_vectors, mixture_from_ds, partition_sums, reconstruct,
    supporting_hyperplane_approximant, t_transform_chain, t_transform_mixture, tracial_refuter,
    unistochastic3_check, vector_majorized, DoublyStochastic, ProbabilityVector, UnitaryMixture,
};
use majorize::linalg::{
    apply_function, joint_diagonalize, trace_of_function, AbelianFamily, ComplexMatrix,
};
use majorize::Tolerances;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Majorized pair, its decision and the Birkhoff mixture.
fn certified(seed: u64, n: usize, m: usize) -> (Pair, UnitaryMixture) {
    let mut r = rng(seed);
    let pair = random_pair(&mut r, n, m, PairKind::Majorized);
    let d = decide_joint_majorization(&pair.a, &pair.b, seed, &Tolerances::default()).unwrap();
    let x = d.witness.as_ref().expect("majorized by construction");
    let mix = mixture_from_ds(x, &d.eigen_a, &d.eigen_b).unwrap();
    (pair, mix)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diagonalization_reconstructs(seed in any::<u64>(), n in 1usize..=6, m in 1usize..=4) {
        let mut r = rng(seed);
        let lambda = random_eigen(&mut r, n, m);
        let f = family(&lambda, &random_unitary(&mut r, n));
        let cols = joint_diagonalize(&f, seed).unwrap();
        let u = cols.diagonalizer.matrix();
        for (j, a) in f.members().iter().enumerate() {
            let rebuilt = ComplexMatrix::diagonal(&cols.column(j)).conjugate_by(u);
            prop_assert!(rebuilt.max_abs_diff(a) <= 1e-8);
        }
    }

    #[test]
    fn trace_is_conjugation_invariant(seed in any::<u64>(), n in 1usize..=5, m in 1usize..=3) {
        let mut r = rng(seed);
        let lambda = random_eigen(&mut r, n, m);
        let f = family(&lambda, &random_unitary(&mut r, n));
        let g = family(&lambda, &random_unitary(&mut r, n));
        let h = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt() + x[0].max(0.0);
        let tf = trace_of_function(&joint_diagonalize(&f, 1).unwrap(), h);
        let tg = trace_of_function(&joint_diagonalize(&g, 2).unwrap(), h);
        prop_assert!((tf - tg).abs() <= 1e-8);
    }

    #[test]
    fn coordinate_projection_returns_member(seed in any::<u64>(), n in 1usize..=5, m in 1usize..=3) {
        let mut r = rng(seed);
        let f = family(&random_eigen(&mut r, n, m), &random_unitary(&mut r, n));
        let cols = joint_diagonalize(&f, seed).unwrap();
        for j in 0..m {
            let back = apply_function(&cols, |x| x[j]);
            prop_assert!(back.max_abs_diff(&f.members()[j]) <= 1e-8);
        }
    }

    #[test]
    fn birkhoff_invariants(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let x = DoublyStochastic::new(random_ds(&mut r, n)).unwrap();
        let terms = birkhoff_decompose(&x).unwrap();
        prop_assert!(terms.len() <= n * n + 2 - 2 * n);
        prop_assert!((reconstruct(&terms, n) - x.entries()).abs().max() <= 1e-9);
        prop_assert!(ProbabilityVector::new(terms.iter().map(|t| t.weight).collect()).is_ok());

        let mut residual = x.entries().clone();
        for term in birkhoff_greedy(&x).unwrap() {
            for (i, &p) in term.permutation.perm().iter().enumerate() {
                prop_assert!(residual[(i, p)] > 0.0);
            }
            for (i, &p) in term.permutation.perm().iter().enumerate() {
                residual[(i, p)] -= term.weight;
            }
        }
    }

    #[test]
    fn birkhoff_certificates_are_sound(seed in any::<u64>(), n in 1usize..=5, m in 1usize..=3) {
        let (pair, mix) = certified(seed, n, m);
        prop_assert!(mix.residual(&pair.a, &pair.b).unwrap() <= 1e-6);
        prop_assert!(tracial_refuter(&pair.a, &pair.b, 200, seed).unwrap().is_none());
    }

    #[test]
    fn t_transform_chains(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let b: Vec<f64> = (0..n).map(|_| r.random_range(-1.0..=1.0)).collect();
        let x = random_ds(&mut r, n);
        let a: Vec<f64> = (0..n).map(|i| (0..n).map(|k| x[(i, k)] * b[k]).sum()).collect();
        let chain = t_transform_chain(&a, &b).unwrap();
        prop_assert!(chain.steps.len() <= n.saturating_sub(1));
        for w in chain.vectors.windows(2) {
            prop_assert!(vector_majorized(&w[1], &w[0], 1e-9));
        }
        prop_assert_eq!(chain.mixture.len(), 1 << (n - 1));
        let uniform = 1.0 / (1u64 << (n - 1)) as f64;
        prop_assert!(chain.mixture.weights().weights().iter().all(|&w| w == uniform));
        let spread = chain.mixture.apply(&ComplexMatrix::diagonal(&b));
        prop_assert!(spread.max_abs_diff(&ComplexMatrix::diagonal(&a)) <= 1e-6);
        let last = chain.vectors.last().unwrap();
        let target = sorted_desc(&a);
        prop_assert!(last.iter().zip(&target).all(|(u, v)| (u - v).abs() <= 1e-9));
    }

    #[test]
    fn t_transform_certificates(seed in any::<u64>(), n in 1usize..=5) {
        let mut r = rng(seed);
        let pair = random_pair(&mut r, n, 1, PairKind::Majorized);
        let d = decide_joint_majorization(&pair.a, &pair.b, seed, &Tolerances::default()).unwrap();
        let chain = t_transform_mixture(&d.eigen_a, &d.eigen_b).unwrap();
        prop_assert!(chain.mixture.residual(&pair.a, &pair.b).unwrap() <= 1e-6);
        prop_assert!(tracial_refuter(&pair.a, &pair.b, 200, seed).unwrap().is_none());
    }

    #[test]
    fn direct_sums_are_sound(seed in any::<u64>(), blocks in 1usize..=4) {
        let mut worst: f64 = 0.0;
        let mut mixtures = Vec::new();
        let mut a_blocks = Vec::new();
        let mut b_blocks = Vec::new();
        let m = 1 + (seed % 2) as usize;
        for k in 0..blocks {
            let n = 1 + ((seed >> (4 * k)) % 3) as usize;
            let (pair, mix) = certified(seed.wrapping_add(k as u64), n, m);
            worst = worst.max(mix.residual(&pair.a, &pair.b).unwrap());
            mixtures.push(mix);
            a_blocks.push(pair.a);
            b_blocks.push(pair.b);
        }
        let combined = combine_direct_sum(&mixtures).unwrap();
        let a = AbelianFamily::direct_sum(&a_blocks.iter().collect::<Vec<_>>()).unwrap();
        let b = AbelianFamily::direct_sum(&b_blocks.iter().collect::<Vec<_>>()).unwrap();
        let r = combined.residual(&a, &b).unwrap();
        prop_assert!(r <= worst + 1e-10 && r <= 1e-6);
        prop_assert!(decide_joint_majorization(&a, &b, seed, &Tolerances::default()).unwrap().majorized);
    }

    #[test]
    fn merged_partitions_reproduce_inputs(seed in any::<u64>(), k in 1usize..=4, ell in 1usize..=4) {
        let mut r = rng(seed);
        let vectors: Vec<ProbabilityVector> = (0..k)
            .map(|_| {
                let raw: Vec<f64> = (0..ell).map(|_| r.random_range(0.0..1.0)).collect();
                ProbabilityVector::normalized(raw).unwrap()
            })
            .collect();
        let (merged, parts) = merge_probability_vectors(&vectors).unwrap();
        prop_assert_eq!(merged.len(), ell.pow(k as u32));
        for (v, part) in vectors.iter().zip(&parts) {
            for (s, t) in partition_sums(merged.weights(), part).iter().zip(v.weights()) {
                prop_assert!((s - t).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn unistochastic_verdict_ignores_permutations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = DoublyStochastic::new(random_ds(&mut r, 3)).unwrap();
        let verdict = unistochastic3_check(&x).unwrap();
        let rows = random_permutation(&mut r, 3);
        let cols = random_permutation(&mut r, 3);
        prop_assert_eq!(unistochastic3_check(&x.permuted(&rows, &cols)).unwrap(), verdict);
    }

    #[test]
    fn diagonal_channel_is_unital_trace_preserving_positive(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let x = DoublyStochastic::new(random_ds(&mut r, n)).unwrap();
        let ones = ds_as_diagonal_channel(&x, &vec![1.0; n]).unwrap();
        prop_assert!(ones.iter().all(|v| (v - 1.0).abs() <= 1e-12));
        let d: Vec<f64> = (0..n).map(|_| r.random_range(0.0..2.0)).collect();
        let out = ds_as_diagonal_channel(&x, &d).unwrap();
        prop_assert!((out.iter().sum::<f64>() - d.iter().sum::<f64>()).abs() <= 1e-12);
        prop_assert!(out.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn probability_vectors_validate(raw in proptest::collection::vec(-0.5f64..1.0, 1..6)) {
        let total: f64 = raw.iter().sum();
        let ok = raw.iter().all(|&w| w >= -1e-12) && (total - 1.0).abs() <= 1e-10;
        prop_assert_eq!(ProbabilityVector::new(raw.clone()).is_ok(), ok);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn hyperplane_sandwich_of_l1_norm(seed in any::<u64>(), m in 1usize..=3) {
        let mut r = rng(seed);
        let lower: Vec<f64> = (0..m).map(|_| r.random_range(-2.0..0.5)).collect();
        let upper: Vec<f64> = lower.iter().map(|l| l + r.random_range(0.1..2.0)).collect();
        let f = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>();
        let sub = |x: &[f64]| x.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
        let g = supporting_hyperplane_approximant(f, sub, (m as f64).sqrt(), &lower, &upper, 0.1).unwrap();
        for _ in 0..10_000 {
            let x: Vec<f64> = lower.iter().zip(&upper).map(|(l, u)| r.random_range(*l..=*u)).collect();
            let (fx, gx) = (f(&x), g.eval(&x));
            prop_assert!(gx <= fx + 1e-12 && gx >= fx - 0.1 - 1e-12);
        }
    }
}

#[test]
fn doubly_stochastic_validation() {
    assert!(DoublyStochastic::new(DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5])).is_ok());
    assert!(DoublyStochastic::new(DMatrix::from_row_slice(2, 2, &[1.1, -0.1, -0.1, 1.1])).is_err());
    assert!(DoublyStochastic::new(DMatrix::from_row_slice(2, 2, &[0.6, 0.5, 0.4, 0.5])).is_err());
}
