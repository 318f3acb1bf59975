//! Calculus of regular Lie groups on concrete matrix and abelian groups.

pub mod bundles;
pub mod constructions;
pub mod counterexamples;
pub mod curves;
pub mod error;
pub mod evolution;
pub mod expr;
pub mod lie;
pub mod lie_theory;

pub use curves::{AlgebraCurve, GroupPath, PathInBase};
pub use error::{Error, Result};
pub use evolution::{evolve, EvolutionResult, Scheme};
pub use lie::{AlgebraElement, Group, GroupElement, GroupSpec, Side};
