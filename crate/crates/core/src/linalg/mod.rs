//! Dense complex linear algebra for desk-scale matrices.

mod calculus;
mod eigen;
mod joint;
mod matrix;

pub use calculus::{
    apply_function, apply_function_to_family, trace_of_function, trace_of_function_on_family,
};
pub(crate) use calculus::trace_of_rows;
pub use eigen::{hermitian_eigendecompose, HermitianEigen};
pub use joint::{
    canonical_row_order, joint_diagonalize, joint_diagonalize_with, AbelianFamily, EigenColumns,
};
pub use matrix::{product, Complex, ComplexMatrix, Unitary, C64};
pub use nalgebra::DMatrix;
