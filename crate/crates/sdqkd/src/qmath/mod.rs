//! Minimal dense complex linear algebra for Hilbert spaces of dimension 2–16:
//! matrices, labeled tensor products, partial traces, Hermitian/PSD checks,
//! and a self-contained Jacobi eigensolver.

mod label;
mod matrix;

pub use label::{
    apply_map_replacing, embed_operator, partial_trace, tensor, DensityOperator, HilbertLabel,
    PureState, Subsystem,
};
pub use matrix::{ComplexMatrix, ComplexVector, TOL_ALGEBRAIC, TOL_PSD};
