//! Groups assembled from simpler ones, with evolutions computed factor by factor.

mod convolution;
mod extension;
mod semidirect;

pub use convolution::{
    conv_ad, conv_bracket, conv_evolve, conv_inv, conv_mul, conv_ode_residual, ConvEvolution, ConvField,
    ConvSlice, ConvolutionElement, FieldFn,
};
pub use extension::{
    evolve_extension, evolve_extension_chart, CocycleDerivativeFn, CocycleFn, ExtensionElement,
    ExtensionEvolution, ExtensionSpec, COCYCLE_STEP,
};
pub use semidirect::{
    evolve_semidirect, semidirect_group, tangent_group, ActionFn, ActionResidual, ActionTangentFn,
    SemidirectGroup, SemidirectSpec, ACTION_TANGENT_TOLERANCE, ACTION_TOLERANCE,
};
