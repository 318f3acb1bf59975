use nalgebra::{DMatrix, DVector};

use super::curve::AlgebraCurve;
use super::path::GroupPath;
use crate::error::{Error, Result};
use crate::lie::{GroupSpec, Side};

fn step_error(e: Error, t0: f64, t1: f64) -> Error {
    match e {
        Error::Branch(reason) => Error::StepTooLarge { t0, t1, reason },
        other => other,
    }
}

/// `log(b a^-1)` (right) or `log(a^-1 b)` (left), the increment from `a` to `b`.
pub(crate) fn increment(
    g: &GroupSpec,
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    side: Side,
) -> Result<DVector<f64>> {
    let ai = g.inv_raw(a)?;
    let q = match side {
        Side::Right => g.mul_raw(b, &ai),
        Side::Left => g.mul_raw(&ai, b),
    };
    g.log_raw(&q)
}

/// Central-difference logarithmic derivative of a group-valued map at `t`.
pub fn log_derivative_at<F>(g: &GroupSpec, f: F, t: f64, h: f64, side: Side) -> Result<DVector<f64>>
where
    F: Fn(f64) -> Result<DMatrix<f64>>,
{
    let (a, b) = (f(t - h)?, f(t + h)?);
    let inc = increment(g, &a, &b, side).map_err(|e| step_error(e, t - h, t + h))?;
    Ok(inc / (2.0 * h))
}

/// Midpoint-staggered discrete logarithmic derivative of a sampled path,
/// returned as a not-a-knot spline through the interval midpoints.
pub fn discrete_log_derivative(p: &GroupPath, side: Side) -> Result<AlgebraCurve> {
    let g = p.owner();
    let (times, values) = (p.times(), p.values());
    let mut knots = Vec::with_capacity(times.len() - 1);
    let mut samples = Vec::with_capacity(times.len() - 1);
    for i in 0..times.len() - 1 {
        let h = times[i + 1] - times[i];
        let inc = increment(g, &values[i], &values[i + 1], side)
            .map_err(|e| step_error(e, times[i], times[i + 1]))?;
        knots.push(0.5 * (times[i] + times[i + 1]));
        samples.push(inc / h);
    }
    if knots.len() == 1 {
        // a single interval gives a constant
        let v = samples.pop().unwrap_or_default();
        return Ok(AlgebraCurve::new(g.clone(), move |_| v.clone()));
    }
    AlgebraCurve::from_samples(g.clone(), knots, samples)
}

/// Sup over `ts` of `|d^r(fg) - d^r f - Ad(f) d^r g|` with central differences of step `h`.
pub fn leibniz_residual<F, G>(group: &GroupSpec, f: F, g: G, ts: &[f64], h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<DMatrix<f64>>,
    G: Fn(f64) -> Result<DMatrix<f64>>,
{
    let fg = |t: f64| Ok(group.mul_raw(&f(t)?, &g(t)?));
    let mut worst = 0.0f64;
    for &t in ts {
        let lhs = log_derivative_at(group, fg, t, h, Side::Right)?;
        let df = log_derivative_at(group, &f, t, h, Side::Right)?;
        let dg = log_derivative_at(group, &g, t, h, Side::Right)?;
        let rhs = df + group.adjoint_raw(&f(t)?)? * dg;
        worst = worst.max((lhs - rhs).norm());
    }
    Ok(worst)
}
