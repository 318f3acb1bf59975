//! Principal connections on trivial bundles `U x G` over boxes.

mod connection;
mod develop;
mod transport;

pub use connection::{BoxDomain, CoefficientFn, ConnectionChart, PARTIAL_STEP};
pub use develop::{develop, Development, FLATNESS_PROBES, FLATNESS_TOLERANCE};
pub use transport::{
    basepoint_invariance_residual, holonomy, holonomy_conjugation_residual, horizontality_residual,
    parallel_transport, small_loop_curvature, transport_equivariance_residual,
    transport_reparameterization_residual, HolonomyRecord, Transport, LOOP_CLOSURE_LIMIT,
};
