//! Evolution operators and their calculus.

mod calculus;
mod stepper;

pub use calculus::{
    cell_centres, dexp, dexp_fd, inverse_identity_residual, maurer_cartan_residual,
    reparameterization_residual, tangent_evol, tangent_evol_at, tangent_evol_fd, Dexp, TangentEvol,
};
pub use stepper::{
    evol_at, evolve, evolve_interval, evolve_with, EvolutionResult, EvolutionStats, Scheme, DRIFT_LIMIT,
};
