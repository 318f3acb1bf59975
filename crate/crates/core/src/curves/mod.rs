//! Algebra- and group-valued curves, quadrature and discrete logarithmic derivatives.

mod curve;
mod logderiv;
mod path;
mod quadrature;
mod spline;

pub use curve::{random_curve, AlgebraCurve, CurveFn, Smoothness};
pub use logderiv::{discrete_log_derivative, leibniz_residual, log_derivative_at};
pub(crate) use logderiv::increment;
pub use path::{GroupPath, PathInBase, VELOCITY_STEP};
pub use quadrature::{gauss_legendre_nodes, quadrature, quadrature_scalar, DEFAULT_PANELS};
pub use spline::CubicSpline;

/// Default number of uniform steps on `[0, 1]`.
pub const DEFAULT_STEPS: usize = 1024;
