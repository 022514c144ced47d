//! Abelian families sampled on a grid over a compact metric space.

mod approx;
mod continuation;
mod demo;
mod exact2x2;
mod frames;
mod grid;
mod pointwise;

pub use approx::{approx_hull_membership, epsilon_floor, ApproxCertificate};
pub use continuation::{continuation_ds_probe, ContinuationReport};
pub use demo::{
    cyclic_field_matrix, demo_counterexamples, demo_fields, ApproxSummary, Demo, DemoReport, DemoRow,
    JumpSummary, DEGENERACY_CUTOFF, DEMO_EPSILON,
};
pub use exact2x2::exact_mixture_field_2x2;
pub use frames::field_frames;
pub use grid::{DSField, GridSpace, MatrixField, MixtureField};
pub use pointwise::{pointwise_majorization_check, tracial_field_refuter, PointwiseCheck};
