use nalgebra::{DMatrix, DVector};

use super::stepper::{evol_at, evolve, evolve_interval, Scheme};
use crate::curves::{increment, quadrature, AlgebraCurve, DEFAULT_PANELS};
use crate::error::{Error, Result};
use crate::lie::{AlgebraElement, GroupElement, GroupSpec, Side};

/// `dist(evol^l(X), evol^r(-X)^-1)`.
pub fn inverse_identity_residual(x: &AlgebraCurve, steps: usize) -> Result<f64> {
    let g = x.owner();
    let left = evolve(x, Side::Left, steps)?.endpoint;
    let right = evolve(&x.scaled(-1.0), Side::Right, steps)?.endpoint;
    g.distance(&left, &g.inv(&right)?)
}

/// Sup over `ts` of `dist(Evol(X)(f(t)), Evol(f'.(X o f))(t) . Evol(X)(f(0)))`.
pub fn reparameterization_residual<F, D>(
    x: &AlgebraCurve,
    f: F,
    fprime: D,
    ts: &[f64],
    steps: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64 + Send + Sync + Clone + 'static,
    D: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let g = x.owner();
    let pulled = x.reparameterized(f.clone(), fprime);
    let base = evol_at(x, Side::Right, f(0.0), steps)?;
    let mut worst = 0.0f64;
    for &t in ts {
        let lhs = evol_at(x, Side::Right, f(t), steps)?;
        let rhs = g.mul(&evol_at(&pulled, Side::Right, t, steps)?, &base)?;
        worst = worst.max(g.distance(&lhs, &rhs)?);
    }
    Ok(worst)
}

/// Uniform `n x n` grid of cell centres in `[0, 1]^2`.
pub fn cell_centres(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64));
        }
    }
    out
}

/// Sup norm of the Maurer-Cartan defect of a two-parameter group map.
///
/// With `A`, `B` the logarithmic derivatives in `t` and `s`, the right defect is
/// `d_t B - d_s A - [A, B]` and the left one `d_t B - d_s A + [A, B]`; every
/// derivative is a central difference of step `h`, so only the four corners
/// `(t +- h, s +- h)` and the edge midpoints are evaluated.
pub fn maurer_cartan_residual<M>(
    g: &GroupSpec,
    map: M,
    side: Side,
    h: f64,
    points: &[(f64, f64)],
) -> Result<f64>
where
    M: Fn(f64, f64) -> Result<DMatrix<f64>>,
{
    let sign = match side {
        Side::Right => -1.0,
        Side::Left => 1.0,
    };
    let mut worst = 0.0f64;
    for &(t, s) in points {
        let c = |dt: f64, ds: f64| map(t + dt * h, s + ds * h);
        let (pp, pm, mp, mm) = (c(1.0, 1.0)?, c(1.0, -1.0)?, c(-1.0, 1.0)?, c(-1.0, -1.0)?);
        let (tp, tm, sp, sm) = (c(1.0, 0.0)?, c(-1.0, 0.0)?, c(0.0, 1.0)?, c(0.0, -1.0)?);
        let d = 2.0 * h;
        // A at (t, s +- h), B at (t +- h, s), A and B at (t, s)
        let a_sp = increment(g, &mp, &pp, side)? / d;
        let a_sm = increment(g, &mm, &pm, side)? / d;
        let b_tp = increment(g, &pm, &pp, side)? / d;
        let b_tm = increment(g, &mm, &mp, side)? / d;
        let a = increment(g, &tm, &tp, side)? / d;
        let b = increment(g, &sm, &sp, side)? / d;
        let dtb = (b_tp - b_tm) / d;
        let dsa = (a_sp - a_sm) / d;
        let f = dtb - dsa + g.bracket_raw(&a, &b)? * sign;
        worst = worst.max(f.norm());
    }
    Ok(worst)
}

/// Tangent of the evolution map at `X` in direction `Y`.
#[derive(Clone, Debug)]
pub struct TangentEvol {
    /// `Evol(X)(t)`.
    pub footpoint: GroupElement,
    /// `int_0^t Ad(Evol(X)(s)^-1) Y(s) ds`.
    pub left: AlgebraElement,
    /// `Ad(footpoint) . left`.
    pub right: AlgebraElement,
}

/// `T_X evol^r . Y` on `[0, 1]`.
pub fn tangent_evol(x: &AlgebraCurve, y: &AlgebraCurve, steps: usize) -> Result<TangentEvol> {
    tangent_evol_at(x, y, 1.0, steps)
}

/// `T_X (Evol^r(.)(t)) . Y`.
pub fn tangent_evol_at(x: &AlgebraCurve, y: &AlgebraCurve, t: f64, steps: usize) -> Result<TangentEvol> {
    let g = x.owner();
    if y.owner().name() != g.name() {
        return Err(Error::Domain("tangent direction lives in another algebra".into()));
    }
    if t == 0.0 {
        let zero = g.zero_algebra();
        return Ok(TangentEvol {
            footpoint: g.identity(),
            left: zero.clone(),
            right: zero,
        });
    }
    let run = if t == 1.0 {
        evolve(x, Side::Right, steps)?
    } else {
        evolve_interval(x, Side::Right, 0.0, t, steps, Scheme::CommutatorFree4)?
    };
    let integrand = |s: f64| -> Result<DVector<f64>> {
        let e = run.at_raw(s)?;
        Ok(g.adjoint_raw(&g.inv_raw(&e)?)? * y.coeffs_at(s)?)
    };
    let panels = ((DEFAULT_PANELS as f64 * t).ceil() as usize).max(4);
    let left = quadrature(integrand, 0.0, t, panels)?;
    let foot = run.endpoint.value().clone();
    let right = g.adjoint_raw(&foot)? * &left;
    Ok(TangentEvol {
        footpoint: run.endpoint,
        left: g.algebra(left)?,
        right: g.algebra(right)?,
    })
}

/// Central-difference oracle for the right-trivialized tangent of `Evol(.)(t)`:
/// `log(Evol(X + eps Y)(t) Evol(X - eps Y)(t)^-1) / (2 eps)`.
pub fn tangent_evol_fd(x: &AlgebraCurve, y: &AlgebraCurve, t: f64, eps: f64, steps: usize) -> Result<DVector<f64>> {
    let g = x.owner();
    let plus = evol_at(&x.plus(&y.scaled(eps))?, Side::Right, t, steps)?;
    let minus = evol_at(&x.plus(&y.scaled(-eps))?, Side::Right, t, steps)?;
    Ok(increment(g, minus.value(), plus.value(), Side::Right)? / (2.0 * eps))
}

/// Derivative of `exp` at `X` in direction `Y`.
#[derive(Clone, Debug)]
pub struct Dexp {
    /// Right-trivialized, `int_0^1 Ad(exp(tX)) Y dt`.
    pub integral: DVector<f64>,
    /// Right-trivialized, `sum_i ad(X)^i Y / (i+1)!`.
    pub series: DVector<f64>,
    /// Left-trivialized, `int_0^1 Ad(exp(-tX)) Y dt`.
    pub left: DVector<f64>,
    pub series_terms: usize,
}

const SERIES_GUARD: usize = 200;

pub fn dexp(g: &GroupSpec, x: &AlgebraElement, y: &AlgebraElement) -> Result<Dexp> {
    let (xc, yc) = (x.coeffs(), y.coeffs());
    g.algebra(xc.clone())?;
    let ad = g.ad(x)?;
    let integrand = |sign: f64| {
        move |t: f64| -> Result<DVector<f64>> { Ok(g.adjoint_raw(&g.exp_raw(&(xc * (sign * t))))? * yc) }
    };
    let integral = quadrature(integrand(1.0), 0.0, 1.0, DEFAULT_PANELS)?;
    let left = quadrature(integrand(-1.0), 0.0, 1.0, DEFAULT_PANELS)?;

    let mut term = yc.clone();
    let mut series = yc.clone();
    let mut terms = 1;
    loop {
        if terms > SERIES_GUARD {
            return Err(Error::Numeric(format!(
                "dexp series did not converge in {SERIES_GUARD} terms"
            )));
        }
        term = &ad * term / (terms as f64 + 1.0);
        if term.norm() < 1e-16 {
            break;
        }
        series += &term;
        terms += 1;
    }
    Ok(Dexp {
        integral,
        series,
        left,
        series_terms: terms,
    })
}

/// Central-difference oracle: `log(exp(X + eps Y) exp(X - eps Y)^-1) / (2 eps)`.
pub fn dexp_fd(g: &GroupSpec, x: &AlgebraElement, y: &AlgebraElement, eps: f64) -> Result<DVector<f64>> {
    let plus = g.exp_raw(&(x.coeffs() + y.coeffs() * eps));
    let minus = g.exp_raw(&(x.coeffs() - y.coeffs() * eps));
    Ok(increment(g, &minus, &plus, Side::Right)? / (2.0 * eps))
}
