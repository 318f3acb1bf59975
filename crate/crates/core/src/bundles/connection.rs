use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;

use crate::curves::{AlgebraCurve, PathInBase};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::lie::{AlgebraElement, Group, GroupElement};

/// `x -> A_j(x)` in algebra coefficients.
pub type CoefficientFn = Arc<dyn Fn(&DVector<f64>) -> Result<DVector<f64>> + Send + Sync>;

/// Step of the central differences used for partial derivatives without a closed form.
pub const PARTIAL_STEP: f64 = 1e-6;

/// Closed axis-aligned box in `R^m`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain {
    pub lo: DVector<f64>,
    pub hi: DVector<f64>,
}

impl BoxDomain {
    pub fn new(lo: DVector<f64>, hi: DVector<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.iter().zip(hi.iter()).any(|(a, b)| !(a < b)) {
            return Err(Error::Domain("box needs lo < hi in every coordinate".into()));
        }
        Ok(BoxDomain { lo, hi })
    }

    /// `[a, b]^m`.
    pub fn cube(m: usize, a: f64, b: f64) -> Result<Self> {
        Self::new(DVector::from_element(m, a), DVector::from_element(m, b))
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        let slack = 1e-12;
        x.len() == self.dim()
            && x.iter()
                .zip(self.lo.iter().zip(self.hi.iter()))
                .all(|(v, (a, b))| *v >= a - slack && *v <= b + slack)
    }

    /// Cell centres of a uniform grid with `n` cells per axis.
    pub fn probe_grid(&self, n: usize) -> Vec<DVector<f64>> {
        let m = self.dim();
        let total = n.pow(m as u32);
        (0..total)
            .map(|mut idx| {
                DVector::from_iterator(
                    m,
                    (0..m).map(|a| {
                        let i = idx % n;
                        idx /= n;
                        self.lo[a] + (self.hi[a] - self.lo[a]) * (i as f64 + 0.5) / n as f64
                    }),
                )
            })
            .collect()
    }
}

/// A connection on the trivial bundle `U x G`, written in the unit section as
/// `omega = sum_j A_j dx^j`.
#[derive(Clone)]
pub struct ConnectionChart {
    group: Group,
    domain: BoxDomain,
    coeffs: Vec<CoefficientFn>,
    /// `partials[i][j] = d_i A_j` when known in closed form.
    partials: Option<Vec<Vec<CoefficientFn>>>,
}

impl fmt::Debug for ConnectionChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConnectionChart")
            .field("group", &self.group.name())
            .field("base_dim", &self.base_dim())
            .field("domain", &self.domain)
            .field("analytic_partials", &self.partials.is_some())
            .finish()
    }
}

/// Coordinate names bound when evaluating parsed coefficients.
fn coordinate_bindings(x: &DVector<f64>) -> Vec<(String, f64)> {
    let mut vars: Vec<(String, f64)> = x.iter().enumerate().map(|(i, v)| (format!("x{}", i + 1), *v)).collect();
    for (name, v) in ["x", "y", "z"].iter().zip(x.iter()) {
        vars.push((name.to_string(), *v));
    }
    vars
}

fn coordinate_names(m: usize) -> Vec<Vec<String>> {
    (0..m)
        .map(|i| {
            let mut names = vec![format!("x{}", i + 1)];
            if i < 3 {
                names.push(["x", "y", "z"][i].to_string());
            }
            names
        })
        .collect()
}

fn expr_coefficient(e: Expr, d: usize) -> CoefficientFn {
    Arc::new(move |x| {
        let vars = coordinate_bindings(x);
        let refs: Vec<(&str, f64)> = vars.iter().map(|(n, v)| (n.as_str(), *v)).collect();
        e.eval_vector(&refs, d)
    })
}

impl ConnectionChart {
    pub fn new(group: Group, domain: BoxDomain, coeffs: Vec<CoefficientFn>) -> Result<Self> {
        if coeffs.len() != domain.dim() {
            return Err(Error::Domain(format!(
                "{} coefficients for a {}-dimensional base",
                coeffs.len(),
                domain.dim()
            )));
        }
        let chart = ConnectionChart {
            group,
            domain,
            coeffs,
            partials: None,
        };
        let centre = (&chart.domain.lo + &chart.domain.hi) / 2.0;
        for j in 0..chart.base_dim() {
            chart.coefficient(j, &centre)?;
        }
        Ok(chart)
    }

    /// Coefficients from expressions in `x1, x2, ...` (or `x, y, z`) and basis
    /// symbols; partial derivatives are taken symbolically.
    pub fn from_exprs(group: Group, domain: BoxDomain, srcs: &[&str]) -> Result<Self> {
        let m = domain.dim();
        let names = coordinate_names(m);
        let d = group.alg_dim();
        let mut exprs = Vec::with_capacity(srcs.len());
        for src in srcs {
            let e = Expr::parse(src)?;
            if let Some(v) = e.variables().into_iter().find(|v| !names.iter().flatten().any(|n| n == v)) {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("unknown coordinate {v} on a {m}-dimensional base"),
                });
            }
            if e.basis_extent() > d {
                return Err(Error::Domain(format!("{} has only {d} basis elements", group.name())));
            }
            exprs.push(e);
        }
        let partials = (0..m)
            .map(|i| {
                exprs
                    .iter()
                    .map(|e| {
                        // the coordinate may appear under either of its names
                        let de = names[i]
                            .iter()
                            .map(|n| e.diff(n))
                            .reduce(|a, b| Expr::Add(Box::new(a), Box::new(b)))
                            .expect("every axis has a name");
                        expr_coefficient(de, d)
                    })
                    .collect()
            })
            .collect();
        let coeffs = exprs.into_iter().map(|e| expr_coefficient(e, d)).collect();
        let mut chart = Self::new(group, domain, coeffs)?;
        chart.partials = Some(partials);
        Ok(chart)
    }

    /// Constant coefficients.
    pub fn constant(group: Group, domain: BoxDomain, values: Vec<DVector<f64>>) -> Result<Self> {
        let m = values.len();
        let d = group.alg_dim();
        let coeffs = values
            .into_iter()
            .map(|v| Arc::new(move |_: &DVector<f64>| Ok(v.clone())) as CoefficientFn)
            .collect();
        let zero: CoefficientFn = Arc::new(move |_| Ok(DVector::zeros(d)));
        let mut chart = Self::new(group, domain, coeffs)?;
        chart.partials = Some(vec![vec![zero; m]; m]);
        Ok(chart)
    }

    pub fn with_partials(mut self, partials: Vec<Vec<CoefficientFn>>) -> Result<Self> {
        let m = self.base_dim();
        if partials.len() != m || partials.iter().any(|r| r.len() != m) {
            return Err(Error::Domain("partials must form an m x m table".into()));
        }
        self.partials = Some(partials);
        Ok(self)
    }

    /// `-omega`.
    pub fn negated(&self) -> Self {
        let neg = |f: &CoefficientFn| -> CoefficientFn {
            let f = f.clone();
            Arc::new(move |x| Ok(-f(x)?))
        };
        ConnectionChart {
            group: self.group.clone(),
            domain: self.domain.clone(),
            coeffs: self.coeffs.iter().map(neg).collect(),
            partials: self
                .partials
                .as_ref()
                .map(|p| p.iter().map(|row| row.iter().map(neg).collect()).collect()),
        }
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn base_dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn domain(&self) -> &BoxDomain {
        &self.domain
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partials.is_some()
    }

    fn check_point(&self, x: &DVector<f64>) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(Error::Domain(format!(
                "point {:?} outside the chart domain",
                x.as_slice()
            )));
        }
        Ok(())
    }

    fn checked(&self, f: &CoefficientFn, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_point(x)?;
        let v = f(x)?;
        if v.len() != self.group.alg_dim() || v.iter().any(|c| !c.is_finite()) {
            return Err(Error::Numeric(format!("coefficient unusable at {:?}", x.as_slice())));
        }
        Ok(v)
    }

    /// `A_j(x)`.
    pub fn coefficient(&self, j: usize, x: &DVector<f64>) -> Result<DVector<f64>> {
        self.checked(&self.coeffs[j], x)
    }

    /// `omega_x(v) = sum_j A_j(x) v_j`.
    pub fn eval(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<AlgebraElement> {
        self.group.algebra(self.eval_raw(x, v)?)
    }

    pub(crate) fn eval_raw(&self, x: &DVector<f64>, v: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != self.base_dim() {
            return Err(Error::Domain("tangent vector of the wrong dimension".into()));
        }
        let mut acc = DVector::zeros(self.group.alg_dim());
        for (j, vj) in v.iter().enumerate() {
            if *vj != 0.0 {
                acc += self.coefficient(j, x)? * *vj;
            } else {
                self.check_point(x)?;
            }
        }
        Ok(acc)
    }

    /// The connection form on the bundle at `(x, g)`, applied to `(v, g.Z)`:
    /// `Ad(g^-1) omega_x(v) + Z`.
    pub fn bundle_form(
        &self,
        x: &DVector<f64>,
        v: &DVector<f64>,
        g: &GroupElement,
        z: &AlgebraElement,
    ) -> Result<AlgebraElement> {
        let ginv = self.group.inv(g)?;
        let moved = self.group.adjoint(&ginv)? * self.eval_raw(x, v)?;
        self.group.algebra(moved)?.plus(z)
    }

    /// `d_i A_j (x)`, analytic when available, else a central difference.
    pub fn partial(&self, i: usize, j: usize, x: &DVector<f64>) -> Result<DVector<f64>> {
        if let Some(p) = &self.partials {
            return self.checked(&p[i][j], x);
        }
        let mut xp = x.clone();
        xp[i] += PARTIAL_STEP;
        let mut xm = x.clone();
        xm[i] -= PARTIAL_STEP;
        if !self.domain.contains(&xp) || !self.domain.contains(&xm) {
            return Err(Error::Domain(format!(
                "difference stencil at {:?} leaves the domain",
                x.as_slice()
            )));
        }
        Ok((self.coefficient(j, &xp)? - self.coefficient(j, &xm)?) / (2.0 * PARTIAL_STEP))
    }

    /// `F(d_i, d_j) = d_i A_j - d_j A_i + [A_i, A_j]` at `x`.
    pub fn curvature(&self, x: &DVector<f64>, i: usize, j: usize) -> Result<AlgebraElement> {
        self.group.algebra(self.curvature_raw(x, i, j, 1.0)?)
    }

    /// `d_i A_j - d_j A_i + sign [A_i, A_j]`.
    fn curvature_raw(&self, x: &DVector<f64>, i: usize, j: usize, sign: f64) -> Result<DVector<f64>> {
        let m = self.base_dim();
        if i >= m || j >= m {
            return Err(Error::Domain(format!("axis out of range for a {m}-dimensional base")));
        }
        let d = self.partial(i, j, x)? - self.partial(j, i, x)?;
        let br = self.group.bracket_raw(&self.coefficient(i, x)?, &self.coefficient(j, x)?)?;
        Ok(d + br * sign)
    }

    /// Defect of the right Maurer-Cartan equation `d_i phi_j - d_j phi_i - [phi_i, phi_j]`
    /// for this form read as `phi`.
    pub fn maurer_cartan_defect(&self, x: &DVector<f64>, i: usize, j: usize) -> Result<DVector<f64>> {
        self.curvature_raw(x, i, j, -1.0)
    }

    /// Largest Maurer-Cartan defect over the probe grid and where it occurs.
    pub fn flatness_residual(&self, probes: usize) -> Result<(f64, DVector<f64>)> {
        let m = self.base_dim();
        let mut worst = (0.0, self.domain.lo.clone());
        for x in self.domain.probe_grid(probes) {
            for i in 0..m {
                for j in i + 1..m {
                    let r = self.maurer_cartan_defect(&x, i, j)?.norm();
                    if r > worst.0 {
                        worst = (r, x.clone());
                    }
                }
            }
        }
        Ok(worst)
    }

    /// `t -> sign * omega(c(t)) c'(t)` as a curve in the algebra.
    pub fn pullback(&self, c: &PathInBase, sign: f64) -> Result<AlgebraCurve> {
        if c.dim() != self.base_dim() {
            return Err(Error::Domain("path and base differ in dimension".into()));
        }
        let (me, c) = (self.clone(), c.clone());
        Ok(AlgebraCurve::try_new(self.group.clone(), move |t| {
            let x = c.point(t);
            me.eval_raw(&x, &c.velocity(t))
                .map(|v| v * sign)
                .map_err(|e| match e {
                    Error::Domain(msg) => Error::Domain(format!("path leaves the domain at t = {t}: {msg}")),
                    other => other,
                })
        }))
    }
}
