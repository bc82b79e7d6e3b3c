//! Quadratic spaces over prime fields, including characteristic 2.

pub mod field;
mod group;
pub mod isometry;
pub mod linalg;
mod space;

pub use group::{
    nontrivial_spinor_witness, so_order, so_order_exhaustive, stabilizer_generators,
    stabilizer_orbit,
};
pub use isometry::{
    dickson_invariant, eichler_transvection, enumerate_orthogonal_group, fixes, is_special,
    preserves_form, reflection, reflection_factorization, spinor_norm, witt_extension, FpIsometry,
    SpinorClass, DEFAULT_MAX_ELEMENTS,
};
pub use linalg::{FpMat, FpVec};
pub use space::{
    quadric_line_count, FpQuadSpace, ProjLine, Radicals, WittDecomposition, WittType,
    DEFAULT_MAX_POINTS,
};
