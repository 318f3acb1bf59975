use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::semidirect::{ActionFn, ActionTangentFn};
use crate::curves::AlgebraCurve;
use crate::error::{Error, Result};
use crate::evolution::evolve;
use crate::lie::sampling::{random_algebra, random_element};
use crate::lie::{catalog, Group, Side};

/// `(h1, h2) -> c(h1, h2)`.
pub type CocycleFn = Arc<dyn Fn(&DMatrix<f64>, &DMatrix<f64>) -> DVector<f64> + Send + Sync>;
/// `(h1, h2, Y) -> d/de c(exp(eY) h1, h2)` at `e = 0`.
pub type CocycleDerivativeFn =
    Arc<dyn Fn(&DMatrix<f64>, &DMatrix<f64>, &DVector<f64>) -> DVector<f64> + Send + Sync>;

/// Step of the central difference used for cocycle derivatives without a closed form.
pub const COCYCLE_STEP: f64 = 1e-6;

/// Abelian extension `R^p -> E -> H` with product
/// `(k1, h1)(k2, h2) = (k1 + A(h1) k2 + c(h1, h2), h1 h2)`.
#[derive(Clone)]
pub struct ExtensionSpec {
    pub k_dim: usize,
    pub h: Group,
    pub action: ActionFn,
    pub action_tangent: ActionTangentFn,
    pub cocycle: CocycleFn,
    pub cocycle_derivative: Option<CocycleDerivativeFn>,
}

impl fmt::Debug for ExtensionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensionSpec")
            .field("k_dim", &self.k_dim)
            .field("h", &self.h.name())
            .field("analytic_derivative", &self.cocycle_derivative.is_some())
            .finish()
    }
}

/// An element `(k, h)` of an extension in its product chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionElement {
    pub k: DVector<f64>,
    pub h: DMatrix<f64>,
}

impl ExtensionSpec {
    /// Central extension (trivial action) with the given cocycle.
    pub fn central(k_dim: usize, h: Group, cocycle: CocycleFn) -> Self {
        ExtensionSpec {
            k_dim,
            h,
            action: Arc::new(move |_| DMatrix::identity(k_dim, k_dim)),
            action_tangent: Arc::new(move |_| DMatrix::zeros(k_dim, k_dim)),
            cocycle,
            cocycle_derivative: None,
        }
    }

    pub fn with_action(mut self, action: ActionFn, action_tangent: ActionTangentFn) -> Self {
        self.action = action;
        self.action_tangent = action_tangent;
        self
    }

    pub fn with_cocycle_derivative(mut self, d: CocycleDerivativeFn) -> Self {
        self.cocycle_derivative = Some(d);
        self
    }

    /// The Heisenberg group as the central extension of `(R^2, +)` by `(R, +)`
    /// with `c(h1, h2) = (x1 y2 - y1 x2) / 2`.
    pub fn heisenberg() -> Self {
        let c = |a: &DMatrix<f64>, b: &DMatrix<f64>| 0.5 * (a[(0, 0)] * b[(1, 0)] - a[(1, 0)] * b[(0, 0)]);
        Self::central(
            1,
            catalog::vector(2),
            Arc::new(move |a, b| DVector::from_element(1, c(a, b))),
        )
        // bilinear: the derivative in the first slot is c(Y, h2)
        .with_cocycle_derivative(Arc::new(move |_, b, y| {
            let ym = DMatrix::from_column_slice(2, 1, y.as_slice());
            DVector::from_element(1, c(&ym, b))
        }))
    }

    pub fn identity(&self) -> ExtensionElement {
        ExtensionElement {
            k: DVector::zeros(self.k_dim),
            h: self.h.identity().into_value(),
        }
    }

    pub fn mul(&self, a: &ExtensionElement, b: &ExtensionElement) -> ExtensionElement {
        ExtensionElement {
            k: &a.k + (self.action)(&a.h) * &b.k + (self.cocycle)(&a.h, &b.h),
            h: self.h.mul_raw(&a.h, &b.h),
        }
    }

    /// `d/de c(exp(eY) h1, h2)`, analytic when available.
    pub fn cocycle_derivative_at(&self, h1: &DMatrix<f64>, h2: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
        if let Some(d) = &self.cocycle_derivative {
            return d(h1, h2, y);
        }
        let e = COCYCLE_STEP;
        let plus = self.h.mul_raw(&self.h.exp_raw(&(y * e)), h1);
        let minus = self.h.mul_raw(&self.h.exp_raw(&(y * -e)), h1);
        ((self.cocycle)(&plus, h2) - (self.cocycle)(&minus, h2)) / (2.0 * e)
    }

    /// Largest cocycle-condition defect
    /// `A(h1) c(h2, h3) - c(h1 h2, h3) + c(h1, h2 h3) - c(h1, h2)` over random
    /// triples, together with `|c(e, e)|`.
    pub fn cocycle_residual(&self, seed: u64, samples: usize) -> f64 {
        let h = &self.h;
        let e = h.identity_raw();
        let mut worst = (self.cocycle)(&e, &e).norm();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let [a, b, c] = [0; 3].map(|_| random_element(h, &mut rng, 1.5).into_value());
            let r = (self.action)(&a) * (self.cocycle)(&b, &c) - (self.cocycle)(&h.mul_raw(&a, &b), &c)
                + (self.cocycle)(&a, &h.mul_raw(&b, &c))
                - (self.cocycle)(&a, &b);
            worst = worst.max(r.norm());
        }
        worst
    }

    /// Largest gap between the cocycle derivative in use and a central difference.
    pub fn derivative_residual(&self, seed: u64, samples: usize) -> f64 {
        let h = &self.h;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut fd = self.clone();
        fd.cocycle_derivative = None;
        (0..samples)
            .map(|_| {
                let a = random_element(h, &mut rng, 1.0).into_value();
                let b = random_element(h, &mut rng, 1.0).into_value();
                let y = random_algebra(h, &mut rng, 1.0).into_coeffs();
                (self.cocycle_derivative_at(&a, &b, &y) - fd.cocycle_derivative_at(&a, &b, &y)).norm()
            })
            .fold(0.0, f64::max)
    }

    fn check_curves(&self, u: &AlgebraCurve, y: &AlgebraCurve) -> Result<()> {
        if u.owner().alg_dim() != self.k_dim || u.owner().is_matrix() {
            return Err(Error::Domain(format!("U must be a curve in r:{}", self.k_dim)));
        }
        if y.owner().name() != self.h.name() {
            return Err(Error::Domain(format!("Y must be a curve in {}", self.h.name())));
        }
        Ok(())
    }
}

/// Trajectory of an evolution in an extension's product chart.
#[derive(Clone, Debug)]
pub struct ExtensionEvolution {
    pub times: Vec<f64>,
    pub nodes: Vec<ExtensionElement>,
}

impl ExtensionEvolution {
    pub fn endpoint(&self) -> &ExtensionElement {
        &self.nodes[self.nodes.len() - 1]
    }

    /// Sup over common nodes of `|k - k'| + |h - h'|`.
    pub fn sup_distance(&self, other: &ExtensionEvolution) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::Domain("trajectories live on different grids".into()));
        }
        Ok(self
            .nodes
            .iter()
            .zip(&other.nodes)
            .map(|(a, b)| (&a.k - &b.k).norm() + (&a.h - &b.h).norm())
            .fold(0.0, f64::max))
    }
}

/// Right evolution in the extension by factors: `h = Evol_H(Y)`,
/// `Z = A(h^-1) (U + (T(A^{c(h^-1,h)}) - T(c(., h^-1))) h')`, `k = Evol_K(Z)`
/// and `g = s(h) i(k) = (A(h) k, h)`.
pub fn evolve_extension(
    spec: &ExtensionSpec,
    u: &AlgebraCurve,
    y: &AlgebraCurve,
    steps: usize,
) -> Result<ExtensionEvolution> {
    spec.check_curves(u, y)?;
    let h_run = Arc::new(evolve(y, Side::Right, steps)?);
    let (hr, sp, uc, yc) = (h_run.clone(), spec.clone(), u.clone(), y.clone());
    let z = AlgebraCurve::try_new(u.owner().clone(), move |t| {
        let h = hr.at(t)?.into_value();
        let hinv = sp.h.inv_raw(&h)?;
        let yv = yc.coeffs_at(t)?;
        let along_action = (sp.action_tangent)(&yv) * (sp.action)(&h) * (sp.cocycle)(&hinv, &h);
        let along_cocycle = sp.cocycle_derivative_at(&h, &hinv, &yv);
        Ok((sp.action)(&hinv) * (uc.coeffs_at(t)? + along_action - along_cocycle))
    });
    let k_run = evolve(&z, Side::Right, steps)?;
    let nodes = h_run
        .path
        .values()
        .iter()
        .zip(k_run.path.values())
        .map(|(h, k)| {
            let s = ExtensionElement {
                k: DVector::zeros(spec.k_dim),
                h: h.clone(),
            };
            let i = ExtensionElement {
                k: k.column(0).into_owned(),
                h: spec.h.identity_raw(),
            };
            spec.mul(&s, &i)
        })
        .collect();
    Ok(ExtensionEvolution {
        times: h_run.path.times().to_vec(),
        nodes,
    })
}

/// Reference solution in the product chart: `h' = Y h` by the group stepper and
/// `k' = U + dA(Y) k + d/de c(exp(eY), h)` by classical Runge-Kutta.
pub fn evolve_extension_chart(
    spec: &ExtensionSpec,
    u: &AlgebraCurve,
    y: &AlgebraCurve,
    steps: usize,
) -> Result<ExtensionEvolution> {
    spec.check_curves(u, y)?;
    let h_run = evolve(y, Side::Right, steps)?;
    let e = spec.h.identity_raw();
    let rhs = |t: f64, k: &DVector<f64>| -> Result<DVector<f64>> {
        let h = h_run.at(t)?.into_value();
        let yv = y.coeffs_at(t)?;
        Ok(u.coeffs_at(t)? + (spec.action_tangent)(&yv) * k + spec.cocycle_derivative_at(&e, &h, &yv))
    };
    let dt = 1.0 / steps as f64;
    let mut k = DVector::zeros(spec.k_dim);
    let mut nodes = Vec::with_capacity(steps + 1);
    nodes.push(spec.identity());
    for n in 0..steps {
        let t = n as f64 * dt;
        let k1 = rhs(t, &k)?;
        let k2 = rhs(t + 0.5 * dt, &(&k + &k1 * (0.5 * dt)))?;
        let k3 = rhs(t + 0.5 * dt, &(&k + &k2 * (0.5 * dt)))?;
        let k4 = rhs(t + dt, &(&k + &k3 * dt))?;
        k += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        nodes.push(ExtensionElement {
            k: k.clone(),
            h: h_run.path.values()[n + 1].clone(),
        });
    }
    Ok(ExtensionEvolution {
        times: h_run.path.times().to_vec(),
        nodes,
    })
}
