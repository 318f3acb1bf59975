//! Concrete Lie groups and algebras: products, inverses, brackets, `Ad`/`ad`, `exp`/`log`.

pub mod catalog;
pub mod config;
mod group;
pub(crate) mod matrix;
pub mod sampling;

pub use group::{
    quaternion_left_matrix, AlgebraElement, Constraint, Group, GroupElement, GroupSpec, Realization, Side,
    BASIS_CLOSURE_TOLERANCE, DEFAULT_GROUP_TOLERANCE,
};
#[allow(unused_imports)]
pub(crate) use group::{centered, wrap_unit};
