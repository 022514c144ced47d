//! Merging several probability vectors into one whose block sums reproduce
//! each of them.

use std::ops::Mul;

use num_traits::{One, Zero};

use super::prob::ProbabilityVector;
use crate::error::{Error, Result};

/// For each input vector `j`, the partition `Y₁ ∪ … ∪ Y_ℓ` of merged
/// indices: `partitions[j][i]` lists the `p` with `Σ_{p ∈ Y_i} a_p = t⁽ʲ⁾ᵢ`.
pub type Partitions = Vec<Vec<Vec<usize>>>;

/// Product merge over any commutative ring of weights.
///
/// Index `p = i₁ ℓ^{k−1} + … + i_k` carries `a_p = t⁽¹⁾_{i₁} ⋯ t⁽ᵏ⁾_{i_k}`;
/// the last vector's index varies fastest.
pub fn merge_weights<T>(vectors: &[Vec<T>]) -> Result<(Vec<T>, Partitions)>
where
    T: Clone + Zero + One + Mul<Output = T>,
{
    let Some(first) = vectors.first() else {
        return Err(Error::EmptyBlocks);
    };
    let ell = first.len();
    if ell == 0 || vectors.iter().any(|v| v.len() != ell) {
        return Err(Error::LengthMismatch);
    }
    let k = vectors.len();
    let total = ell.checked_pow(k as u32).ok_or(Error::LengthMismatch)?;
    let mut merged = Vec::with_capacity(total);
    let mut partitions: Partitions = vec![vec![Vec::new(); ell]; k];
    let mut digits = vec![0usize; k];
    for p in 0..total {
        let mut a = T::one();
        for (j, &i) in digits.iter().enumerate() {
            a = a * vectors[j][i].clone();
            partitions[j][i].push(p);
        }
        merged.push(a);
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < ell {
                break;
            }
            *d = 0;
        }
    }
    Ok((merged, partitions))
}

/// [`merge_weights`] for probability vectors.
pub fn merge_probability_vectors(
    vectors: &[ProbabilityVector],
) -> Result<(ProbabilityVector, Partitions)> {
    let raw: Vec<Vec<f64>> = vectors.iter().map(|v| v.weights().to_vec()).collect();
    let (merged, partitions) = merge_weights(&raw)?;
    Ok((ProbabilityVector::new(merged)?, partitions))
}

/// `Σ_{p ∈ Y} a_p` for every block of a partition.
pub fn partition_sums<T>(merged: &[T], partition: &[Vec<usize>]) -> Vec<T>
where
    T: Clone + Zero,
{
    partition
        .iter()
        .map(|block| {
            block
                .iter()
                .fold(T::zero(), |acc, &p| acc + merged[p].clone())
        })
        .collect()
}
