//! Joint majorization in a single matrix algebra and its certificates.

mod birkhoff;
mod channel;
mod direct_sum;
mod ds;
pub mod lp;
mod merge;
mod mixture;
mod prob;
mod tracial;
mod ttransform;
mod unistochastic;
mod witness;

pub use birkhoff::{birkhoff_decompose, birkhoff_greedy, reconstruct, BirkhoffTerm, ZERO_THRESHOLD};
pub use channel::ds_as_diagonal_channel;
pub use direct_sum::combine_direct_sum;
pub use ds::{DoublyStochastic, PermutationMatrix};
pub use merge::{merge_probability_vectors, merge_weights, partition_sums, Partitions};
pub use mixture::{mixture_from_ds, Certificate, Construction, UnitaryMixture};
pub use prob::ProbabilityVector;
pub use tracial::{
    refute_on_eigenvalues, supporting_hyperplane_approximant, tracial_refuter, AffinePiece,
    HyperplaneMaxFunction, REFUTATION_MARGIN,
};
pub use ttransform::{t_transform_chain, t_transform_mixture, vector_majorized, TTransform, TTransformChain};
pub use unistochastic::{chain_links, unistochastic3_check};
pub use witness::{
    decide_joint_majorization, decide_with_reference, find_ds_witness, fit_residual, Decision,
    REFINEMENT_ITERATIONS,
};
