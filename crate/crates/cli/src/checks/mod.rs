//! The registered suite checks, one module per suite.

pub mod bundles;
pub mod constructions;
pub mod counterexamples;
pub mod evolution;
pub mod lie_theory;

use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;
use regulie_core::curves::random_curve;
use regulie_core::lie::catalog;
use regulie_core::{Group, Result};

/// Catalog groups every per-group check runs on.
pub const CATALOG: &[&str] = &["so3", "su2", "se3", "sl2", "gl2plus", "heis3", "torus:2", "r:3"];

pub(crate) fn group(name: &str) -> Group {
    catalog::lookup(name).expect("catalog names are valid")
}

/// `t -> exp(a(t))` for a random smooth algebra curve `a`.
pub(crate) fn random_path(g: &Group, rng: &mut ChaCha8Rng) -> impl Fn(f64) -> Result<DMatrix<f64>> + Clone {
    let a = random_curve(g, rng, 1.0);
    let g = g.clone();
    move |t| Ok(g.exp(&a.eval(t)?)?.into_value())
}

/// Largest `|e[i] / e[i+1] - target|` over consecutive errors.
pub(crate) fn ratio_deviation(errs: &[f64], target: f64) -> f64 {
    errs.windows(2).map(|w| (w[0] / w[1] - target).abs()).fold(0.0, f64::max)
}

/// Smallest `log2(e[i] / e[i+1])` over consecutive errors.
pub(crate) fn min_order(errs: &[f64]) -> f64 {
    errs.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min)
}
