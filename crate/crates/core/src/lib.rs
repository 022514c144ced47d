//! Joint majorization of commuting self-adjoint matrix tuples.
//!
//! The crate decides whether one abelian family `A = (A_1, …, A_m)` lies in
//! the convex hull of the joint unitary orbit of another family `B`, produces
//! explicit unitary-mixture certificates when it does, and extends both to
//! families sampled on a grid over a compact metric space.
//!
//! * [`linalg`]: dense complex matrices, Hermitian eigensolver, simultaneous
//!   diagonalization and functional calculus.
//! * [`finite`]: doubly stochastic witnesses, Birkhoff decomposition,
//!   certificates (Birkhoff, T-transform chains, direct sums) and tracial
//!   refutation.
//! * [`field`]: grid-sampled matrix fields: pointwise checks, the
//!   continuation probe, exact 2×2 certificates, ε-approximate certificates
//!   and the bundled counterexample demos.
//! * [`io`]: JSON encodings for families, fields and certificates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod finite;
pub mod io;
pub mod linalg;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
