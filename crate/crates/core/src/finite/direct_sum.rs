use super::merge::merge_probability_vectors;
use super::mixture::UnitaryMixture;
use super::prob::ProbabilityVector;
use crate::error::{Error, Result};
use crate::linalg::Unitary;

/// Combines per-block mixtures into one mixture on the direct sum.
///
/// Blocks are padded with zero-weight identities to a common length `ℓ`,
/// their weights merged, and each merged index `p` gets the block-diagonal
/// unitary `V_{1,i₁(p)} ⊕ … ⊕ V_{k,i_k(p)}`. Terms of weight zero are
/// dropped. Blocks with identical weight vectors are paired term by term.
pub fn combine_direct_sum(blocks: &[UnitaryMixture]) -> Result<UnitaryMixture> {
    let first = blocks.first().ok_or(Error::EmptyBlocks)?;
    if blocks.len() == 1 {
        return Ok(first.clone());
    }
    if blocks.iter().all(|b| b.weights() == first.weights()) {
        let unitaries = (0..first.len())
            .map(|q| {
                let parts: Vec<&Unitary> = blocks.iter().map(|b| &b.unitaries()[q]).collect();
                Unitary::direct_sum(&parts)
            })
            .collect();
        return UnitaryMixture::new(first.weights().clone(), unitaries);
    }

    let ell = blocks.iter().map(UnitaryMixture::len).max().unwrap_or(1);
    let padded: Vec<ProbabilityVector> = blocks.iter().map(|b| b.weights().padded(ell)).collect();
    let identities: Vec<Unitary> = blocks.iter().map(|b| Unitary::identity(b.dim())).collect();
    let (merged, partitions) = merge_probability_vectors(&padded)?;

    let mut choice = vec![vec![0usize; merged.len()]; blocks.len()];
    for (r, partition) in partitions.iter().enumerate() {
        for (i, cell) in partition.iter().enumerate() {
            for &p in cell {
                choice[r][p] = i;
            }
        }
    }
    let mut weights = Vec::new();
    let mut unitaries = Vec::new();
    for (p, &w) in merged.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let parts: Vec<&Unitary> = blocks
            .iter()
            .enumerate()
            .map(|(r, b)| b.unitaries().get(choice[r][p]).unwrap_or(&identities[r]))
            .collect();
        weights.push(w);
        unitaries.push(Unitary::direct_sum(&parts));
    }
    UnitaryMixture::new(ProbabilityVector::new(weights)?, unitaries)
}
