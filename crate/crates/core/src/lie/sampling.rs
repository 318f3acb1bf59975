//! Random algebra and group elements for property checks.

use nalgebra::DVector;
use rand::Rng;

use super::group::{AlgebraElement, GroupElement, GroupSpec};

/// Algebra element with uniformly random direction and norm at most `max_norm`.
pub fn random_algebra<R: Rng + ?Sized>(g: &GroupSpec, rng: &mut R, max_norm: f64) -> AlgebraElement {
    let d = g.alg_dim();
    let dir = loop {
        let v = DVector::from_iterator(d, (0..d).map(|_| rng.random_range(-1.0..1.0)));
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            break v / n;
        }
    };
    let r: f64 = rng.random_range(0.0..1.0);
    g.wrap_algebra(dir * (r * max_norm))
}

/// `exp` of a random algebra element of norm at most `max_norm`.
pub fn random_element<R: Rng + ?Sized>(g: &GroupSpec, rng: &mut R, max_norm: f64) -> GroupElement {
    let x = random_algebra(g, rng, max_norm);
    g.wrap(g.exp_raw(x.coeffs()))
}
