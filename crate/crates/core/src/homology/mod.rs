//! Degree-two integral homology of finite groups.

pub mod bar;
pub mod h2;
pub mod snf;

pub use bar::{bar_boundary_matrices, BarComplex};
pub use h2::{h2_gc, h2_group, H2Result};
pub use snf::{
    smith_normal_form, smith_normal_form_dense, smith_normal_form_with_transforms, IntegerMatrix,
    SnfResult,
};
