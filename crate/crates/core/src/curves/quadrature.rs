use nalgebra::DVector;

use crate::error::{Error, Result};

/// Default panel count for composite Gauss-Legendre rules.
pub const DEFAULT_PANELS: usize = 64;

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// Nodes and weights of the composite 8-point rule on `[a, b]`.
pub fn gauss_legendre_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(8 * panels);
    for p in 0..panels {
        let lo = a + width * p as f64;
        let mid = lo + 0.5 * width;
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
            out.push((mid + 0.5 * width * x, 0.5 * width * w));
        }
    }
    out
}

/// Composite Gauss-Legendre integral of a vector-valued function over `[a, b]`.
pub fn quadrature<F>(f: F, a: f64, b: f64, panels: usize) -> Result<DVector<f64>>
where
    F: Fn(f64) -> Result<DVector<f64>>,
{
    if !(a <= b) {
        return Err(Error::Domain(format!("quadrature bounds out of order: [{a}, {b}]")));
    }
    let mut acc: Option<DVector<f64>> = None;
    for (t, w) in gauss_legendre_nodes(a, b, panels) {
        let v = f(t)?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric(format!("non-finite integrand at t = {t}")));
        }
        match acc.as_mut() {
            Some(s) => s.axpy(w, &v, 1.0),
            None => acc = Some(v * w),
        }
    }
    Ok(acc.unwrap_or_else(|| DVector::zeros(0)))
}

pub fn quadrature_scalar<F>(f: F, a: f64, b: f64, panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let v = quadrature(|t| Ok(DVector::from_element(1, f(t))), a, b, panels)?;
    Ok(v[0])
}
