use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::quadrature::{quadrature, DEFAULT_PANELS};
use super::spline::CubicSpline;
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::lie::{AlgebraElement, Group};

pub type CurveFn = Arc<dyn Fn(f64) -> Result<DVector<f64>> + Send + Sync>;

/// How an [`AlgebraCurve`] is represented.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    ClosedForm,
    SplineOfSamples,
}

/// A curve `[0, 1] -> g`, queryable at any `t`.
#[derive(Clone)]
pub struct AlgebraCurve {
    owner: Group,
    eval: CurveFn,
    hint: Smoothness,
}

impl fmt::Debug for AlgebraCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AlgebraCurve")
            .field("owner", &self.owner.name())
            .field("hint", &self.hint)
            .finish()
    }
}

impl AlgebraCurve {
    pub fn new<F>(owner: Group, f: F) -> Self
    where
        F: Fn(f64) -> DVector<f64> + Send + Sync + 'static,
    {
        Self::try_new(owner, move |t| Ok(f(t)))
    }

    pub fn try_new<F>(owner: Group, f: F) -> Self
    where
        F: Fn(f64) -> Result<DVector<f64>> + Send + Sync + 'static,
    {
        AlgebraCurve {
            owner,
            eval: Arc::new(f),
            hint: Smoothness::ClosedForm,
        }
    }

    pub fn zero(owner: Group) -> Self {
        let d = owner.alg_dim();
        Self::new(owner, move |_| DVector::zeros(d))
    }

    pub fn constant(owner: Group, x: &AlgebraElement) -> Self {
        let c = x.coeffs().clone();
        Self::new(owner, move |_| c.clone())
    }

    /// Parses a curve in the variable `t`, e.g. `sin(t)*e1 + 0.5*e3`.
    pub fn from_expr(owner: Group, src: &str) -> Result<Self> {
        let expr = Expr::parse(src)?;
        let d = owner.alg_dim();
        if expr.basis_extent() > d {
            return Err(Error::Domain(format!(
                "curve uses e{} but {} has dimension {d}",
                expr.basis_extent(),
                owner.name()
            )));
        }
        if let Some(v) = expr.variables().into_iter().find(|v| v != "t") {
            return Err(Error::Domain(format!("curve may only depend on t, found `{v}`")));
        }
        for t in [0.0, 0.5, 1.0] {
            expr.eval_vector(&[("t", t)], d)?;
        }
        Ok(Self::try_new(owner, move |t| expr.eval_vector(&[("t", t)], d)))
    }

    /// Not-a-knot cubic spline through samples.
    pub fn from_samples(owner: Group, knots: Vec<f64>, values: Vec<DVector<f64>>) -> Result<Self> {
        if values.iter().any(|v| v.len() != owner.alg_dim()) {
            return Err(Error::Domain("sample length differs from algebra dimension".into()));
        }
        let spline = CubicSpline::new(knots, values)?;
        Ok(AlgebraCurve {
            owner,
            eval: Arc::new(move |t| Ok(spline.eval(t))),
            hint: Smoothness::SplineOfSamples,
        })
    }

    pub fn owner(&self) -> &Group {
        &self.owner
    }

    pub fn hint(&self) -> Smoothness {
        self.hint
    }

    pub fn eval(&self, t: f64) -> Result<AlgebraElement> {
        self.owner.algebra(self.coeffs_at(t)?)
    }

    /// Coefficients at `t`, checked for length and finiteness.
    pub fn coeffs_at(&self, t: f64) -> Result<DVector<f64>> {
        let v = (self.eval)(t)?;
        if v.len() != self.owner.alg_dim() {
            return Err(Error::Domain(format!(
                "curve returned {} coefficients, algebra has dimension {}",
                v.len(),
                self.owner.alg_dim()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric(format!("non-finite curve value at t = {t}")));
        }
        Ok(v)
    }

    fn derived<F>(&self, f: F) -> Self
    where
        F: Fn(f64) -> Result<DVector<f64>> + Send + Sync + 'static,
    {
        AlgebraCurve {
            owner: self.owner.clone(),
            eval: Arc::new(f),
            hint: self.hint,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let inner = self.eval.clone();
        self.derived(move |t| Ok(inner(t)? * s))
    }

    pub fn plus(&self, other: &AlgebraCurve) -> Result<Self> {
        if self.owner.name() != other.owner.name() {
            return Err(Error::Domain("sum of curves in different algebras".into()));
        }
        let (a, b) = (self.eval.clone(), other.eval.clone());
        Ok(self.derived(move |t| Ok(a(t)? + b(t)?)))
    }

    /// `t -> f'(t) X(f(t))`.
    pub fn reparameterized<F, D>(&self, f: F, fprime: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let inner = self.eval.clone();
        self.derived(move |t| Ok(inner(f(t))? * fprime(t)))
    }

    /// Pushes the curve through a linear map into another algebra.
    pub fn mapped(&self, target: Group, m: &DMatrix<f64>) -> Result<Self> {
        if m.ncols() != self.owner.alg_dim() || m.nrows() != target.alg_dim() {
            return Err(Error::Domain("linear map has the wrong shape".into()));
        }
        let (inner, m) = (self.eval.clone(), m.clone());
        Ok(AlgebraCurve {
            owner: target,
            eval: Arc::new(move |t| Ok(&m * inner(t)?)),
            hint: self.hint,
        })
    }

    /// `int_a^b X(t) dt` in coefficients.
    pub fn integral(&self, a: f64, b: f64) -> Result<DVector<f64>> {
        if a == b {
            return Ok(DVector::zeros(self.owner.alg_dim()));
        }
        let panels = ((DEFAULT_PANELS as f64 * (b - a).abs()).ceil() as usize).max(4);
        quadrature(|t| self.coeffs_at(t), a, b, panels)
    }

    /// Largest coefficient distance to `other` over a uniform grid.
    pub fn sup_distance(&self, other: &AlgebraCurve, samples: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for i in 0..=samples {
            let t = i as f64 / samples as f64;
            worst = worst.max((self.coeffs_at(t)? - other.coeffs_at(t)?).norm());
        }
        Ok(worst)
    }
}

/// Smooth random curve `A + B sin(w t + p) + C t^2` with `|A|+|B|+|C| <= max_norm`,
/// so `sup |X| <= max_norm`.
pub fn random_curve<R: Rng + ?Sized>(owner: &Group, rng: &mut R, max_norm: f64) -> AlgebraCurve {
    let d = owner.alg_dim();
    let mut draw = || DVector::from_iterator(d, (0..d).map(|_| rng.random_range(-1.0..1.0)));
    let (a, b, c) = (draw(), draw(), draw());
    let total = a.norm() + b.norm() + c.norm();
    let s = if total > 0.0 { max_norm / total } else { 0.0 };
    let (a, b, c) = (a * s, b * s, c * s);
    let w = rng.random_range(0.5..4.0);
    let p = rng.random_range(0.0..std::f64::consts::TAU);
    AlgebraCurve::new(owner.clone(), move |t| &a + &b * (w * t + p).sin() + &c * (t * t))
}
