//! Integration of Lie algebra homomorphisms to group homomorphisms on simply
//! connected sources.

use nalgebra::{DMatrix, DVector};

use crate::curves::AlgebraCurve;
use crate::error::{Error, Result};
use crate::evolution::evolve;
use crate::lie::{AlgebraElement, Group, GroupElement, Side};

/// Bracket defect accepted by [`AlgebraHom::new`].
pub const HOM_TOLERANCE: f64 = 1e-10;

/// A linear map between Lie algebras, in the two groups' bases.
#[derive(Clone, Debug)]
pub struct AlgebraHom {
    source: Group,
    target: Group,
    matrix: DMatrix<f64>,
}

impl AlgebraHom {
    pub fn new(source: Group, target: Group, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.shape() != (target.alg_dim(), source.alg_dim()) {
            return Err(Error::Domain(format!(
                "a map {} -> {} needs a {}x{} matrix",
                source.name(),
                target.name(),
                target.alg_dim(),
                source.alg_dim()
            )));
        }
        let hom = AlgebraHom { source, target, matrix };
        let residual = hom.bracket_residual()?;
        if residual > HOM_TOLERANCE {
            return Err(Error::InvalidHom { residual });
        }
        Ok(hom)
    }

    pub fn identity(g: &Group) -> Result<Self> {
        let d = g.alg_dim();
        Self::new(g.clone(), g.clone(), DMatrix::identity(d, d))
    }

    pub fn zero(source: &Group, target: &Group) -> Result<Self> {
        Self::new(
            source.clone(),
            target.clone(),
            DMatrix::zeros(target.alg_dim(), source.alg_dim()),
        )
    }

    pub fn source(&self) -> &Group {
        &self.source
    }

    pub fn target(&self) -> &Group {
        &self.target
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `max |f([e_i, e_j]) - [f(e_i), f(e_j)]|` over source basis pairs.
    pub fn bracket_residual(&self) -> Result<f64> {
        let d = self.source.alg_dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i + 1..d {
                let (ei, ej) = (self.source.basis_element(i), self.source.basis_element(j));
                let lhs = &self.matrix * self.source.bracket(&ei, &ej)?.coeffs();
                let fi = self.target.algebra(self.matrix.column(i).into_owned())?;
                let fj = self.target.algebra(self.matrix.column(j).into_owned())?;
                worst = worst.max((lhs - self.target.bracket(&fi, &fj)?.coeffs()).norm());
            }
        }
        Ok(worst)
    }

    pub fn apply(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        if x.owner() != self.source.name() {
            return Err(Error::Domain("element of another algebra".into()));
        }
        self.target.algebra(&self.matrix * x.coeffs())
    }

    /// `t -> f(X(t))`.
    pub fn push_curve(&self, x: &AlgebraCurve) -> Result<AlgebraCurve> {
        x.mapped(self.target.clone(), &self.matrix)
    }
}

/// The homomorphism `F: G -> H` with `T_e F = f`, evaluated by
/// `F(c(1)) = Evol^r_H(f(delta^r c))(1)` for paths `c` from `e`.
#[derive(Clone, Debug)]
pub struct IntegratedHom {
    hom: AlgebraHom,
    steps: usize,
}

/// Fails unless the source is flagged simply connected.
pub fn integrate(hom: &AlgebraHom, steps: usize) -> Result<IntegratedHom> {
    if !hom.source.is_simply_connected() {
        return Err(Error::Precondition(format!(
            "{} is not simply connected, so f need not integrate",
            hom.source.name()
        )));
    }
    Ok(IntegratedHom {
        hom: hom.clone(),
        steps,
    })
}

/// `F(g)` for a single element.
pub fn integrate_hom(hom: &AlgebraHom, g: &GroupElement, steps: usize) -> Result<GroupElement> {
    integrate(hom, steps)?.apply(g)
}

/// Scale of the branch-safe factors used outside the log branch.
const FACTOR_SCALE: f64 = 0.5;

impl IntegratedHom {
    pub fn hom(&self) -> &AlgebraHom {
        &self.hom
    }

    /// `Evol^r_H(f(X))(1)` for the path with right log derivative `X`.
    pub fn along(&self, x: &AlgebraCurve) -> Result<GroupElement> {
        if x.owner().name() != self.hom.source.name() {
            return Err(Error::Domain("path curve of another algebra".into()));
        }
        Ok(evolve(&self.hom.push_curve(x)?, Side::Right, self.steps)?.endpoint)
    }

    /// `F(g)` along the radial path `exp(t log g)`; outside the log branch `g` is
    /// split as `(g a^-1) a` with `a = exp(e_i / 2)` and `F` extended multiplicatively.
    pub fn apply(&self, g: &GroupElement) -> Result<GroupElement> {
        let src = &self.hom.source;
        if g.owner() != src.name() {
            return Err(Error::Domain("element of another group".into()));
        }
        match src.log(g) {
            Ok(x) => self.along(&AlgebraCurve::constant(src.clone(), &x)),
            Err(Error::Branch(msg)) => {
                for i in 0..src.alg_dim() {
                    let a = src.exp(&src.basis_element(i).scaled(FACTOR_SCALE))?;
                    let rest = src.mul(g, &src.inv(&a)?)?;
                    if let Ok(x) = src.log(&rest) {
                        let fr = self.along(&AlgebraCurve::constant(src.clone(), &x))?;
                        let fa = self.along(&AlgebraCurve::constant(src.clone(), &src.log(&a)?))?;
                        return self.hom.target.mul(&fr, &fa);
                    }
                }
                Err(Error::Branch(format!("no branch-safe factorization found: {msg}")))
            }
            Err(e) => Err(e),
        }
    }

    /// `F(g)` along the two-leg path `exp(tY)` then `a exp(tZ)` with `a = exp(Y)`,
    /// `Z = log(a^-1 g)`.
    pub fn apply_staircase(&self, g: &GroupElement, y: &AlgebraElement) -> Result<GroupElement> {
        let src = &self.hom.source;
        let a = src.exp(y)?;
        let z = src.log(&src.mul(&src.inv(&a)?, g)?)?;
        // delta^r (a exp(tZ)) = Ad(a) Z
        let leg2 = src.algebra(src.adjoint(&a)? * z.coeffs())?;
        let (y, leg2) = (y.coeffs().clone(), leg2.into_coeffs());
        let x = AlgebraCurve::new(src.clone(), move |t| if t < 0.5 { &y * 2.0 } else { &leg2 * 2.0 });
        self.along(&x)
    }

    /// `F(g)` along `c(t) = exp(t X) exp(sin(pi t) W)` with `X = log g`, whose right
    /// log derivative is `X + pi cos(pi t) Ad(exp(t X)) W`.
    pub fn apply_wiggle(&self, g: &GroupElement, w: &AlgebraElement) -> Result<GroupElement> {
        let src = self.hom.source.clone();
        let x = src.log(g)?.into_coeffs();
        let w = w.coeffs().clone();
        let curve = AlgebraCurve::try_new(src.clone(), move |t| {
            let ad = src.adjoint(&src.exp(&src.algebra(&x * t)?)?)?;
            Ok(&x + ad * &w * (std::f64::consts::PI * (std::f64::consts::PI * t).cos()))
        });
        self.along(&curve)
    }

    /// `max d(F(a b), F(a) F(b))` over the pairs.
    pub fn homomorphism_residual(&self, pairs: &[(GroupElement, GroupElement)]) -> Result<f64> {
        let (src, tgt) = (&self.hom.source, &self.hom.target);
        let mut worst = 0.0f64;
        for (a, b) in pairs {
            let lhs = self.apply(&src.mul(a, b)?)?;
            let rhs = tgt.mul(&self.apply(a)?, &self.apply(b)?)?;
            worst = worst.max(tgt.distance(&lhs, &rhs)?);
        }
        Ok(worst)
    }

    /// `max d(F(exp X), exp(f X))`.
    pub fn exp_naturality_residual(&self, xs: &[AlgebraElement]) -> Result<f64> {
        let (src, tgt) = (&self.hom.source, &self.hom.target);
        let mut worst = 0.0f64;
        for x in xs {
            let lhs = self.apply(&src.exp(x)?)?;
            let rhs = tgt.exp(&self.hom.apply(x)?)?;
            worst = worst.max(tgt.distance(&lhs, &rhs)?);
        }
        Ok(worst)
    }

    /// Largest relative error of the columns of `T_e F` by central differences
    /// `log(F(exp(eps e_i)) F(exp(-eps e_i))^-1) / (2 eps)` against `f`.
    pub fn tangent_residual(&self, eps: f64) -> Result<f64> {
        let (src, tgt) = (&self.hom.source, &self.hom.target);
        let mut worst = 0.0f64;
        for i in 0..src.alg_dim() {
            let e = src.basis_element(i);
            let plus = self.apply(&src.exp(&e.scaled(eps))?)?;
            let minus = self.apply(&src.exp(&e.scaled(-eps))?)?;
            let col = tgt.log(&tgt.mul(&plus, &tgt.inv(&minus)?)?)?.into_coeffs() / (2.0 * eps);
            let want: DVector<f64> = self.hom.matrix.column(i).into_owned();
            let err = (col - &want).norm();
            worst = worst.max(if want.norm() > 0.0 { err / want.norm() } else { err });
        }
        Ok(worst)
    }
}
