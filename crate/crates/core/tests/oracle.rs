mod common;

use common::*;
use majorize::finite::decide_joint_majorization;
use majorize::Tolerances;
use nalgebra::DMatrix;
use rand::Rng;

#[test]
fn min_norm_point_of_a_segment() {
    // Segment from (1, 1) to (1, −1): nearest point to the origin is (1, 0).
    let x = min_norm_point(&[vec![1.0, 1.0], vec![1.0, -1.0]]);
    assert!((x[0] - 1.0).abs() < 1e-12 && x[1].abs() < 1e-12);
    let inside = min_norm_point(&[vec![1.0, 0.0], vec![-1.0, 1.0], vec![-1.0, -1.0]]);
    assert!(inside.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn oracle_on_hand_examples() {
    let b = DMatrix::from_column_slice(2, 1, &[2.0, 0.0]);
    assert!(oracle_majorized(&DMatrix::from_column_slice(2, 1, &[1.0, 1.0]), &b));
    assert!(!oracle_majorized(&b, &DMatrix::from_column_slice(2, 1, &[1.0, 1.0])));
    assert_eq!(permutations(4).len(), 24);
}

#[test]
fn decision_matches_the_permutation_hull() {
    let tol = Tolerances::default();
    let mut rng = rng(0x5eed);
    let mut positives = 0;
    for i in 0..500 {
        let n = rng.random_range(1..=4);
        let m = rng.random_range(1..=3);
        let pair = random_pair(&mut rng, n, m, kind_for(i));
        let expected = oracle_majorized(&pair.lambda_a, &pair.lambda_b);
        let decision = decide_joint_majorization(&pair.a, &pair.b, i as u64, &tol).unwrap();
        assert_eq!(decision.majorized, expected, "case {i}: n={n} m={m}");
        positives += usize::from(expected);
    }
    assert!(positives > 150 && positives < 450, "{positives} positive cases");
}
