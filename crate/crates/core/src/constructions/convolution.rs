//! The group of algebra-valued curves under `X * Y = X + Ad(Evol(X)) Y`, which
//! `Evol^r` maps isomorphically onto based paths.

use std::sync::Arc;

use nalgebra::DVector;

use crate::curves::{gauss_legendre_nodes, quadrature, AlgebraCurve};
use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolutionResult};
use crate::expr::Expr;
use crate::lie::{Group, Side};

/// A curve together with its right evolution `E_X`, kept for dense evaluation.
#[derive(Clone, Debug)]
pub struct ConvolutionElement {
    pub curve: AlgebraCurve,
    pub evol: Arc<EvolutionResult>,
    pub steps: usize,
}

impl ConvolutionElement {
    pub fn new(curve: AlgebraCurve, steps: usize) -> Result<Self> {
        let evol = Arc::new(evolve(&curve, Side::Right, steps)?);
        Ok(ConvolutionElement { curve, evol, steps })
    }

    pub fn owner(&self) -> &Group {
        self.curve.owner()
    }

    /// `Ad(E_X(t))` as a matrix on coefficients.
    fn ad_at(&self, t: f64) -> Result<nalgebra::DMatrix<f64>> {
        self.owner().adjoint_raw(&self.evol.at_raw(t)?)
    }

    fn ad_inv_at(&self, t: f64) -> Result<nalgebra::DMatrix<f64>> {
        let g = self.owner();
        g.adjoint_raw(&g.inv_raw(&self.evol.at_raw(t)?)?)
    }
}

fn same_owner(a: &AlgebraCurve, b: &AlgebraCurve) -> Result<()> {
    if a.owner().name() != b.owner().name() {
        return Err(Error::Domain("curves live in different algebras".into()));
    }
    Ok(())
}

/// `X * Y = X + Ad(E_X) Y`.
pub fn conv_mul(x: &ConvolutionElement, y: &ConvolutionElement) -> Result<ConvolutionElement> {
    same_owner(&x.curve, &y.curve)?;
    let (xa, yc) = (x.clone(), y.curve.clone());
    let curve = AlgebraCurve::try_new(x.owner().clone(), move |t| {
        Ok(xa.curve.coeffs_at(t)? + xa.ad_at(t)? * yc.coeffs_at(t)?)
    });
    ConvolutionElement::new(curve, x.steps.max(y.steps))
}

/// `X^-1 = -Ad(E_X^-1) X`.
pub fn conv_inv(x: &ConvolutionElement) -> Result<ConvolutionElement> {
    let xa = x.clone();
    let curve = AlgebraCurve::try_new(x.owner().clone(), move |t| {
        Ok(-(xa.ad_inv_at(t)? * xa.curve.coeffs_at(t)?))
    });
    ConvolutionElement::new(curve, x.steps)
}

/// Bracket of the convolution algebra: `[X, Y](t) = [int_0^t X, Y(t)] + [X(t), int_0^t Y]`.
pub fn conv_bracket(x: &AlgebraCurve, y: &AlgebraCurve) -> Result<AlgebraCurve> {
    same_owner(x, y)?;
    let (xc, yc) = (x.clone(), y.clone());
    let g = x.owner().clone();
    Ok(AlgebraCurve::try_new(x.owner().clone(), move |t| {
        let a = g.bracket_raw(&xc.integral(0.0, t)?, &yc.coeffs_at(t)?)?;
        let b = g.bracket_raw(&xc.coeffs_at(t)?, &yc.integral(0.0, t)?)?;
        Ok(a + b)
    }))
}

/// Adjoint action of the convolution group:
/// `(Ad(X) Y)(t) = Ad(E_X(t)) Y(t) - [Ad(E_X(t)) int_0^t Y, X(t)]`.
pub fn conv_ad(x: &ConvolutionElement, y: &AlgebraCurve) -> Result<AlgebraCurve> {
    same_owner(&x.curve, y)?;
    let (xa, yc) = (x.clone(), y.clone());
    Ok(AlgebraCurve::try_new(x.owner().clone(), move |t| {
        let ad = xa.ad_at(t)?;
        let moved = &ad * yc.integral(0.0, t)?;
        Ok(ad * yc.coeffs_at(t)? - xa.owner().bracket_raw(&moved, &xa.curve.coeffs_at(t)?)?)
    }))
}

/// `(t, s) -> X(t, s)`: evolution parameter `t`, curve parameter `s`.
pub type FieldFn = Arc<dyn Fn(f64, f64) -> Result<DVector<f64>> + Send + Sync>;

/// A curve of curves `t -> X(t, .)` in the convolution algebra.
#[derive(Clone)]
pub struct ConvField {
    owner: Group,
    eval: FieldFn,
}

impl std::fmt::Debug for ConvField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ConvField").field("owner", &self.owner.name()).finish()
    }
}

impl ConvField {
    pub fn new<F>(owner: Group, f: F) -> Self
    where
        F: Fn(f64, f64) -> Result<DVector<f64>> + Send + Sync + 'static,
    {
        ConvField {
            owner,
            eval: Arc::new(f),
        }
    }

    /// The same curve for every `t`.
    pub fn constant_in_t(x: &AlgebraCurve) -> Self {
        let xc = x.clone();
        Self::new(x.owner().clone(), move |_, s| xc.coeffs_at(s))
    }

    /// From an expression in `t`, `s` and basis symbols `e1, e2, ...`.
    pub fn from_expr(owner: Group, src: &str) -> Result<Self> {
        let e = Expr::parse(src)?;
        if let Some(v) = e.variables().into_iter().find(|v| v != "t" && v != "s") {
            return Err(Error::Parse {
                pos: 0,
                msg: format!("unknown variable {v}; fields use t and s"),
            });
        }
        let d = owner.alg_dim();
        if e.basis_extent() > d {
            return Err(Error::Domain(format!("{} has only {d} basis elements", owner.name())));
        }
        let field = Self::new(owner, move |t, s| e.eval_vector(&[("t", t), ("s", s)], d));
        field.at(0.5, 0.5)?;
        Ok(field)
    }

    pub fn owner(&self) -> &Group {
        &self.owner
    }

    pub fn at(&self, t: f64, s: f64) -> Result<DVector<f64>> {
        let v = (self.eval)(t, s)?;
        if v.len() != self.owner.alg_dim() || v.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numeric(format!("field value at ({t}, {s}) is unusable")));
        }
        Ok(v)
    }
}

/// Panels for `int_0^s X(t, u) du`.
const SLICE_PANELS: usize = 8;

/// The right evolution `G(t)` of a field in the convolution group, restricted to
/// one curve parameter `s`. With `Y^s(t) = int_0^s X(t, u) du` and
/// `E = Evol^r(Y^s)`, `G(t)(s) = Ad(E(t)) int_0^t Ad(E(r)^-1) X(r, s) dr`,
/// which solves `d/dt G = X + [Y^s, G]`, `G(0) = 0`.
#[derive(Clone, Debug)]
pub struct ConvSlice {
    pub s: f64,
    field: ConvField,
    evol: EvolutionResult,
    cumulative: Vec<DVector<f64>>,
}

impl ConvSlice {
    pub fn new(field: &ConvField, s: f64, steps: usize) -> Result<Self> {
        let f = field.clone();
        let ys = AlgebraCurve::try_new(field.owner.clone(), move |t| {
            if s == 0.0 {
                return Ok(DVector::zeros(f.owner.alg_dim()));
            }
            quadrature(|u| f.at(t, u), 0.0, s, SLICE_PANELS)
        });
        let evol = evolve(&ys, Side::Right, steps)?;
        let mut slice = ConvSlice {
            s,
            field: field.clone(),
            evol,
            cumulative: Vec::with_capacity(steps + 1),
        };
        let times = slice.evol.path.times().to_vec();
        let mut acc = DVector::zeros(field.owner.alg_dim());
        slice.cumulative.push(acc.clone());
        for w in times.windows(2) {
            acc += slice.local(w[0], w[1])?;
            slice.cumulative.push(acc.clone());
        }
        Ok(slice)
    }

    /// `int_a^b Ad(E(r)^-1) X(r, s) dr` by one Gauss panel.
    fn local(&self, a: f64, b: f64) -> Result<DVector<f64>> {
        let g = &self.field.owner;
        let mut acc = DVector::zeros(g.alg_dim());
        for (r, w) in gauss_legendre_nodes(a, b, 1) {
            let e = self.evol.at_raw(r)?;
            acc += g.adjoint_raw(&g.inv_raw(&e)?)? * self.field.at(r, self.s)? * w;
        }
        Ok(acc)
    }

    /// `G(t)(s)` in coefficients.
    pub fn at(&self, t: f64) -> Result<DVector<f64>> {
        let times = self.evol.path.times();
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Domain(format!("t = {t} outside [0, 1]")));
        }
        let i = times.partition_point(|&k| k <= t).saturating_sub(1).min(times.len() - 1);
        let mut integral = self.cumulative[i].clone();
        if t > times[i] {
            integral += self.local(times[i], t)?;
        }
        let g = &self.field.owner;
        Ok(g.adjoint_raw(&self.evol.at_raw(t)?)? * integral)
    }
}

/// Right evolution of `field` in the convolution group, sampled on `s_grid`.
#[derive(Clone, Debug)]
pub struct ConvEvolution {
    pub slices: Vec<ConvSlice>,
}

impl ConvEvolution {
    /// The curve `G(t)` interpolated through the slices.
    pub fn curve_at(&self, t: f64) -> Result<AlgebraCurve> {
        let owner = self.slices[0].field.owner.clone();
        let knots = self.slices.iter().map(|s| s.s).collect();
        let values = self.slices.iter().map(|s| s.at(t)).collect::<Result<Vec<_>>>()?;
        AlgebraCurve::from_samples(owner, knots, values)
    }
}

pub fn conv_evolve(field: &ConvField, s_grid: &[f64], steps: usize) -> Result<ConvEvolution> {
    if s_grid.is_empty() {
        return Err(Error::Domain("empty curve-parameter grid".into()));
    }
    let slices = s_grid
        .iter()
        .map(|&s| ConvSlice::new(field, s, steps))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvEvolution { slices })
}

/// Largest `|d/dt G - X - [Y^s, G]|` by central differences of step `h` at the
/// cell centres of an `n x n` grid in `(t, s)`.
pub fn conv_ode_residual(field: &ConvField, n: usize, h: f64, steps: usize) -> Result<f64> {
    let g = &field.owner;
    let mut worst = 0.0f64;
    for j in 0..n {
        let s = (j as f64 + 0.5) / n as f64;
        let slice = ConvSlice::new(field, s, steps)?;
        for i in 0..n {
            let t = (i as f64 + 0.5) / n as f64;
            let dg = (slice.at(t + h)? - slice.at(t - h)?) / (2.0 * h);
            let ys = quadrature(|u| field.at(t, u), 0.0, s, SLICE_PANELS)?;
            let rhs = field.at(t, s)? + g.bracket_raw(&ys, &slice.at(t)?)?;
            worst = worst.max((dg - rhs).norm());
        }
    }
    Ok(worst)
}
