use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curves::{AlgebraCurve, GroupPath};
use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolutionResult, EvolutionStats, Scheme};
use crate::lie::sampling::random_element;
use crate::lie::{catalog, AlgebraElement, Constraint, Group, GroupElement, GroupSpec, Side};

/// `h -> A(h)`, a linear action of `H` on `R^p`.
pub type ActionFn = Arc<dyn Fn(&DMatrix<f64>) -> DMatrix<f64> + Send + Sync>;
/// `Y -> dA(Y)`, the induced action of the algebra of `H`.
pub type ActionTangentFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;

/// Tolerance for the algebraic action invariants checked at construction.
pub const ACTION_TOLERANCE: f64 = 1e-10;
/// Tolerance for `dA` against a central difference of `A` (step 1e-5).
pub const ACTION_TANGENT_TOLERANCE: f64 = 1e-7;

/// Worst violations found by [`SemidirectSpec::invariant_residual`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionResidual {
    /// `A(e) = I` and `A(h1 h2) = A(h1) A(h2)`.
    pub homomorphism: f64,
    /// `dA(Y) = d/de A(exp(eY))` at `e = 0`.
    pub tangent: f64,
}

/// Semidirect product `K x| H` with `K = (R^p, +)` and `H` acting linearly.
#[derive(Clone)]
pub struct SemidirectSpec {
    pub k_dim: usize,
    pub h: Group,
    pub action: ActionFn,
    pub action_tangent: ActionTangentFn,
}

impl fmt::Debug for SemidirectSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemidirectSpec")
            .field("k_dim", &self.k_dim)
            .field("h", &self.h.name())
            .finish()
    }
}

impl SemidirectSpec {
    pub fn new(k_dim: usize, h: Group, action: ActionFn, action_tangent: ActionTangentFn) -> Self {
        SemidirectSpec {
            k_dim,
            h,
            action,
            action_tangent,
        }
    }

    /// Trivial action: the direct product `R^p x H`.
    pub fn direct(k_dim: usize, h: Group) -> Self {
        Self::new(
            k_dim,
            h,
            Arc::new(move |_| DMatrix::identity(k_dim, k_dim)),
            Arc::new(move |_| DMatrix::zeros(k_dim, k_dim)),
        )
    }

    /// `R^3 x| SO(3)` with the defining action: the rigid motions.
    pub fn euclidean() -> Self {
        let so3 = catalog::so3();
        let g = so3.clone();
        Self::new(
            3,
            so3,
            Arc::new(|r| r.clone()),
            Arc::new(move |y| g.matrix_of_coeffs(y)),
        )
    }

    /// `g x| G` with the adjoint action: the tangent group of `G`.
    pub fn adjoint(g: Group) -> Self {
        let (g1, g2) = (g.clone(), g.clone());
        Self::new(
            g.alg_dim(),
            g,
            Arc::new(move |h| g1.adjoint_raw(h).expect("adjoint of a group element")),
            Arc::new(move |y| g2.ad_raw(y).expect("ad of an algebra element")),
        )
    }

    pub fn act(&self, h: &DMatrix<f64>, k: &DVector<f64>) -> DVector<f64> {
        (self.action)(h) * k
    }

    /// Largest violations of the action invariants over `samples` random draws.
    pub fn invariant_residual(&self, seed: u64, samples: usize) -> ActionResidual {
        let h = &self.h;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = self.k_dim;
        let mut worst = ((self.action)(&h.identity_raw()) - DMatrix::identity(p, p)).norm();
        let mut tangent = 0.0f64;
        for _ in 0..samples {
            let a = random_element(h, &mut rng, 1.5);
            let b = random_element(h, &mut rng, 1.5);
            let ab = h.mul_raw(a.value(), b.value());
            let lhs = (self.action)(&ab);
            let rhs = (self.action)(a.value()) * (self.action)(b.value());
            worst = worst.max((lhs - rhs).norm());
            let y = crate::lie::sampling::random_algebra(h, &mut rng, 1.0);
            let eps = 1e-5;
            let fd = ((self.action)(&h.exp_raw(&(y.coeffs() * eps)))
                - (self.action)(&h.exp_raw(&(y.coeffs() * -eps))))
                / (2.0 * eps);
            tangent = tangent.max(((self.action_tangent)(y.coeffs()) - fd).norm());
        }
        ActionResidual {
            homomorphism: worst,
            tangent,
        }
    }
}

/// A semidirect product realized as block matrices `diag(h, [[A(h), k], [0, 1]])`.
#[derive(Clone, Debug)]
pub struct SemidirectGroup {
    spec: SemidirectSpec,
    group: Group,
    k_group: Group,
}

pub fn semidirect_group(spec: SemidirectSpec) -> Result<SemidirectGroup> {
    let h = spec.h.clone();
    if !h.is_matrix() {
        return Err(Error::Construction(format!(
            "semidirect products need a matrix group H, not {}",
            h.name()
        )));
    }
    let r = spec.invariant_residual(0x5d, 20);
    if r.homomorphism > ACTION_TOLERANCE || r.tangent > ACTION_TANGENT_TOLERANCE {
        return Err(Error::Construction(format!("action fails its invariants ({r:?})")));
    }
    let (nh, p) = (h.mat_size(), spec.k_dim);
    let n = nh + p + 1;
    let mut basis = Vec::with_capacity(p + h.alg_dim());
    for i in 0..p {
        let mut m = DMatrix::zeros(n, n);
        m[(nh + i, nh + p)] = 1.0;
        basis.push(m);
    }
    for (j, e) in h.basis().iter().enumerate() {
        let mut m = DMatrix::zeros(n, n);
        m.view_mut((0, 0), (nh, nh)).copy_from(e);
        let mut y = DVector::zeros(h.alg_dim());
        y[j] = 1.0;
        m.view_mut((nh, nh), (p, p)).copy_from(&(spec.action_tangent)(&y));
        basis.push(m);
    }
    let (hc, action) = (h.clone(), spec.action.clone());
    let constraint = Constraint::Custom(Arc::new(move |m: &DMatrix<f64>| {
        let hb = m.view((0, 0), (nh, nh)).into_owned();
        let mut r = hc.constraint_residual(&hb);
        r += m.view((0, nh), (nh, p + 1)).norm() + m.view((nh, 0), (p + 1, nh)).norm();
        r += m.view((nh + p, nh), (1, p)).norm() + (m[(nh + p, nh + p)] - 1.0).abs();
        r += (m.view((nh, nh), (p, p)) - action(&hb)).norm();
        r
    }));
    let name = format!("r:{p}x|{}", h.name());
    let group = GroupSpec::matrix(&name, basis, constraint)?
        .with_tolerance(h.tolerance())
        .with_simply_connected(h.is_simply_connected())
        .into_group();
    Ok(SemidirectGroup {
        spec,
        group,
        k_group: catalog::vector(p),
    })
}

/// The tangent group `TG = g x| G` with the adjoint action.
pub fn tangent_group(g: &Group) -> Result<SemidirectGroup> {
    semidirect_group(SemidirectSpec::adjoint(g.clone()))
}

impl SemidirectGroup {
    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn spec(&self) -> &SemidirectSpec {
        &self.spec
    }

    /// The normal factor `(R^p, +)`.
    pub fn k_group(&self) -> &Group {
        &self.k_group
    }

    /// The element `(k, h)`.
    pub fn join(&self, k: &DVector<f64>, h: &GroupElement) -> Result<GroupElement> {
        if h.owner() != self.spec.h.name() || k.len() != self.spec.k_dim {
            return Err(Error::Domain("factor does not match the semidirect product".into()));
        }
        Ok(self.group.wrap(self.join_raw(k, h.value())))
    }

    pub(crate) fn join_raw(&self, k: &DVector<f64>, h: &DMatrix<f64>) -> DMatrix<f64> {
        let (nh, p) = (self.spec.h.mat_size(), self.spec.k_dim);
        let n = nh + p + 1;
        let mut m = DMatrix::zeros(n, n);
        m.view_mut((0, 0), (nh, nh)).copy_from(h);
        m.view_mut((nh, nh), (p, p)).copy_from(&(self.spec.action)(h));
        m.view_mut((nh, nh + p), (p, 1)).copy_from(k);
        m[(n - 1, n - 1)] = 1.0;
        m
    }

    /// `(k, h)` of an element.
    pub fn split(&self, g: &GroupElement) -> Result<(DVector<f64>, GroupElement)> {
        if g.owner() != self.group.name() {
            return Err(Error::Domain("element of another group".into()));
        }
        let (k, h) = self.split_raw(g.value());
        Ok((k, self.spec.h.wrap(h)))
    }

    pub(crate) fn split_raw(&self, m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let (nh, p) = (self.spec.h.mat_size(), self.spec.k_dim);
        let k = m.view((nh, nh + p), (p, 1)).column(0).into_owned();
        (k, m.view((0, 0), (nh, nh)).into_owned())
    }

    /// Algebra element `(u, y)`; coefficients are `u` followed by `y`.
    pub fn join_algebra(&self, u: &DVector<f64>, y: &DVector<f64>) -> Result<AlgebraElement> {
        let mut c = DVector::zeros(self.spec.k_dim + self.spec.h.alg_dim());
        c.rows_mut(0, u.len()).copy_from(u);
        c.rows_mut(u.len(), y.len()).copy_from(y);
        self.group.algebra(c)
    }

    /// The curve `t -> (U(t), Y(t))` in the product algebra.
    pub fn join_curves(&self, u: &AlgebraCurve, y: &AlgebraCurve) -> Result<AlgebraCurve> {
        self.check_curves(u, y)?;
        let (u, y) = (u.clone(), y.clone());
        let (p, d) = (self.spec.k_dim, self.spec.h.alg_dim());
        Ok(AlgebraCurve::try_new(self.group.clone(), move |t| {
            let mut c = DVector::zeros(p + d);
            c.rows_mut(0, p).copy_from(&u.coeffs_at(t)?);
            c.rows_mut(p, d).copy_from(&y.coeffs_at(t)?);
            Ok(c)
        }))
    }

    fn check_curves(&self, u: &AlgebraCurve, y: &AlgebraCurve) -> Result<()> {
        if u.owner().alg_dim() != self.spec.k_dim || u.owner().is_matrix() {
            return Err(Error::Domain(format!("U must be a curve in r:{}", self.spec.k_dim)));
        }
        if y.owner().name() != self.spec.h.name() {
            return Err(Error::Domain(format!("Y must be a curve in {}", self.spec.h.name())));
        }
        Ok(())
    }
}

/// Right evolution in `K x| H` by factors: `h = Evol_H(Y)`, `Z = A(h^-1) U`,
/// `k = Evol_K(Z)`, `g = (A(h) k, h)`.
pub fn evolve_semidirect(
    sd: &SemidirectGroup,
    u: &AlgebraCurve,
    y: &AlgebraCurve,
    steps: usize,
) -> Result<EvolutionResult> {
    sd.check_curves(u, y)?;
    let spec = sd.spec.clone();
    let h_run = Arc::new(evolve(y, Side::Right, steps)?);
    let hr = h_run.clone();
    let (hg, action, uc) = (spec.h.clone(), spec.action.clone(), u.clone());
    let z = AlgebraCurve::try_new(sd.k_group.clone(), move |t| {
        let h = hr.at(t)?;
        let hinv = hg.inv_raw(h.value())?;
        Ok(action(&hinv) * uc.coeffs_at(t)?)
    });
    let k_run = evolve(&z, Side::Right, steps)?;
    let times = h_run.path.times().to_vec();
    let values = times
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let h = &h_run.path.values()[i];
            let k = k_run.path.values()[i].column(0).into_owned();
            sd.join_raw(&spec.act(h, &k), h)
        })
        .collect::<Vec<_>>();
    let max_drift = values
        .iter()
        .map(|v| sd.group.constraint_residual(v))
        .fold(0.0, f64::max);
    let path = GroupPath::from_raw(sd.group.clone(), times, values, "semidirect-factors")?;
    Ok(EvolutionResult::without_dense_output(
        path,
        EvolutionStats {
            steps,
            max_drift,
            scheme: Scheme::CommutatorFree4,
        },
    ))
}
