use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::matrix::{self, all_finite, commutator, identity, vectorize};
use crate::error::{Error, Result};

/// Shared handle to an immutable group description.
pub type Group = Arc<GroupSpec>;

/// Which side a translation, flow or trivialization acts from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "left" | "l" => Ok(Side::Left),
            "right" | "r" => Ok(Side::Right),
            other => Err(Error::Domain(format!("unknown side `{other}`"))),
        }
    }
}

/// How group elements are stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Realization {
    /// `n x n` real matrices with the matrix product.
    Matrix,
    /// Column vectors in `R^n` with addition.
    Vector,
    /// Column vectors of representatives in `[0, 1)^n`, addition modulo the integer lattice.
    Torus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum ExpRule {
    Generic,
    Rodrigues,
    Quaternion,
    Nilpotent,
}

/// Membership residual for a matrix group; zero exactly on the group.
#[derive(Clone)]
pub enum Constraint {
    None,
    /// `R^T R = I`, `det R = 1`.
    SpecialOrthogonal,
    /// `det = 1`.
    SpecialLinear,
    /// `det > 0`.
    PositiveDeterminant,
    /// Upper triangular with unit diagonal.
    Unipotent,
    /// Homogeneous `[[R, t], [0, 1]]` with `R` special orthogonal.
    RigidMotion,
    /// 4x4 left-multiplication matrix of a unit quaternion.
    UnitQuaternion,
    Custom(Arc<dyn Fn(&DMatrix<f64>) -> f64 + Send + Sync>),
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Constraint::None => "None",
            Constraint::SpecialOrthogonal => "SpecialOrthogonal",
            Constraint::SpecialLinear => "SpecialLinear",
            Constraint::PositiveDeterminant => "PositiveDeterminant",
            Constraint::Unipotent => "Unipotent",
            Constraint::RigidMotion => "RigidMotion",
            Constraint::UnitQuaternion => "UnitQuaternion",
            Constraint::Custom(_) => "Custom",
        };
        f.write_str(name)
    }
}

fn orthogonality_residual(r: &DMatrix<f64>) -> f64 {
    let n = r.nrows();
    (r.transpose() * r - identity(n)).norm() + (r.determinant() - 1.0).abs()
}

/// Left-multiplication matrix `L(q)` with `L(q) p = q * p`, `q = (w, x, y, z)`.
pub fn quaternion_left_matrix(q: [f64; 4]) -> DMatrix<f64> {
    let [w, x, y, z] = q;
    DMatrix::from_row_slice(
        4,
        4,
        &[w, -x, -y, -z, x, w, -z, y, y, z, w, -x, z, -y, x, w],
    )
}

impl Constraint {
    pub fn residual(&self, m: &DMatrix<f64>) -> f64 {
        if !all_finite(m) {
            return f64::INFINITY;
        }
        match self {
            Constraint::None => 0.0,
            Constraint::SpecialOrthogonal => orthogonality_residual(m),
            Constraint::SpecialLinear => (m.determinant() - 1.0).abs(),
            Constraint::PositiveDeterminant => (-m.determinant()).max(0.0),
            Constraint::Unipotent => {
                let mut r = 0.0;
                for i in 0..m.nrows() {
                    for j in 0..=i {
                        let target = if i == j { 1.0 } else { 0.0 };
                        r += (m[(i, j)] - target).abs();
                    }
                }
                r
            }
            Constraint::RigidMotion => {
                let n = m.nrows();
                let rot = m.view((0, 0), (n - 1, n - 1)).into_owned();
                let mut r = orthogonality_residual(&rot);
                for j in 0..n - 1 {
                    r += m[(n - 1, j)].abs();
                }
                r + (m[(n - 1, n - 1)] - 1.0).abs()
            }
            Constraint::UnitQuaternion => {
                let q = [m[(0, 0)], m[(1, 0)], m[(2, 0)], m[(3, 0)]];
                let norm = q.iter().map(|v| v * v).sum::<f64>().sqrt();
                (m - quaternion_left_matrix(q)).norm() + (norm - 1.0).abs()
            }
            Constraint::Custom(f) => f(m),
        }
    }
}

/// A concrete Lie group together with a basis of its Lie algebra.
///
/// Matrix groups carry their algebra basis as `n x n` matrices and compute
/// brackets as commutators; vector and torus groups are abelian and carry the
/// standard basis of `R^n`.
pub struct GroupSpec {
    name: Arc<str>,
    realization: Realization,
    mat_size: usize,
    basis: Vec<DMatrix<f64>>,
    coords: DMatrix<f64>,
    constraint: Constraint,
    exp_rule: ExpRule,
    abelian: bool,
    simply_connected: bool,
    tolerance: f64,
    log_radius: Option<f64>,
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupSpec")
            .field("name", &self.name)
            .field("realization", &self.realization)
            .field("alg_dim", &self.alg_dim())
            .field("mat_size", &self.mat_size)
            .field("constraint", &self.constraint)
            .field("abelian", &self.abelian)
            .field("simply_connected", &self.simply_connected)
            .finish()
    }
}

/// Largest residual allowed when re-expressing a commutator of basis elements in the basis.
pub const BASIS_CLOSURE_TOLERANCE: f64 = 1e-12;

/// Default membership tolerance for group elements.
pub const DEFAULT_GROUP_TOLERANCE: f64 = 1e-9;

impl GroupSpec {
    /// Matrix group from an algebra basis and a membership constraint.
    ///
    /// Validates linear independence of the basis, closure of the basis under
    /// commutators, and that the identity satisfies the constraint.
    pub fn matrix(name: &str, basis: Vec<DMatrix<f64>>, constraint: Constraint) -> Result<Self> {
        let Some(first) = basis.first() else {
            return Err(Error::Construction("empty algebra basis".into()));
        };
        let n = first.nrows();
        if basis.iter().any(|b| b.nrows() != n || b.ncols() != n) {
            return Err(Error::Construction("basis matrices must share one square size".into()));
        }
        let d = basis.len();
        let mut stacked = DMatrix::zeros(n * n, d);
        for (j, b) in basis.iter().enumerate() {
            stacked.set_column(j, &vectorize(b));
        }
        let gram = stacked.transpose() * &stacked;
        let gram_inv = gram
            .clone()
            .try_inverse()
            .filter(|inv| inv.iter().all(|v| v.is_finite()))
            .ok_or_else(|| Error::Construction("algebra basis is linearly dependent".into()))?;
        let singular = gram.singular_values();
        if singular.min() <= 1e-12 * singular.max() {
            return Err(Error::Construction("algebra basis is linearly dependent".into()));
        }
        let coords = gram_inv * stacked.transpose();
        let mut spec = GroupSpec {
            name: Arc::from(name),
            realization: Realization::Matrix,
            mat_size: n,
            basis,
            coords,
            constraint,
            exp_rule: ExpRule::Generic,
            abelian: false,
            simply_connected: false,
            tolerance: DEFAULT_GROUP_TOLERANCE,
            log_radius: None,
        };
        let mut abelian = true;
        for i in 0..d {
            for j in 0..d {
                let c = commutator(&spec.basis[i], &spec.basis[j]);
                if c.norm() > 0.0 {
                    abelian = false;
                }
                spec.coords_checked(&c, BASIS_CLOSURE_TOLERANCE)?;
            }
        }
        spec.abelian = abelian;
        let at_identity = spec.constraint.residual(&identity(n));
        if at_identity != 0.0 {
            return Err(Error::Construction(format!(
                "constraint does not vanish at the identity ({at_identity:e})"
            )));
        }
        Ok(spec)
    }

    /// The vector group `(R^n, +)`.
    pub fn vector(n: usize) -> Self {
        Self::abelian_vector(format!("r:{n}"), n, Realization::Vector, true)
    }

    /// The torus `R^n / Z^n`.
    pub fn torus(n: usize) -> Self {
        Self::abelian_vector(format!("torus:{n}"), n, Realization::Torus, false)
    }

    fn abelian_vector(name: String, n: usize, realization: Realization, sc: bool) -> Self {
        let basis = (0..n)
            .map(|i| {
                let mut e = DMatrix::zeros(n, 1);
                e[(i, 0)] = 1.0;
                e
            })
            .collect();
        GroupSpec {
            name: Arc::from(name.as_str()),
            realization,
            mat_size: n,
            basis,
            coords: identity(n),
            constraint: Constraint::None,
            exp_rule: ExpRule::Generic,
            abelian: true,
            simply_connected: sc,
            tolerance: DEFAULT_GROUP_TOLERANCE,
            log_radius: None,
        }
    }

    pub fn with_simply_connected(mut self, flag: bool) -> Self {
        self.simply_connected = flag;
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Arc::from(name);
        self
    }

    pub(crate) fn with_exp_rule(mut self, rule: ExpRule) -> Self {
        self.exp_rule = rule;
        self
    }

    /// Declares the principal branch of `log` as the open ball of this radius in coefficients.
    pub fn with_log_radius(mut self, radius: f64) -> Self {
        self.log_radius = Some(radius);
        self
    }

    pub fn into_group(self) -> Group {
        Arc::new(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alg_dim(&self) -> usize {
        self.basis.len()
    }

    pub fn mat_size(&self) -> usize {
        self.mat_size
    }

    pub fn realization(&self) -> Realization {
        self.realization
    }

    pub fn basis(&self) -> &[DMatrix<f64>] {
        &self.basis
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    pub fn is_abelian(&self) -> bool {
        self.abelian
    }

    pub fn is_simply_connected(&self) -> bool {
        self.simply_connected
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn log_radius(&self) -> Option<f64> {
        self.log_radius
    }

    pub fn is_matrix(&self) -> bool {
        self.realization == Realization::Matrix
    }

    /// Membership residual of a raw value.
    pub fn constraint_residual(&self, value: &DMatrix<f64>) -> f64 {
        match self.realization {
            Realization::Matrix => self.constraint.residual(value),
            Realization::Vector | Realization::Torus => {
                if all_finite(value) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    fn owns(&self, owner: &Arc<str>) -> bool {
        Arc::ptr_eq(owner, &self.name) || **owner == *self.name
    }

    fn check_element(&self, a: &GroupElement) -> Result<()> {
        if self.owns(&a.owner) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "element of `{}` used with group `{}`",
                a.owner, self.name
            )))
        }
    }

    fn check_algebra(&self, x: &AlgebraElement) -> Result<()> {
        if self.owns(&x.owner) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "algebra element of `{}` used with group `{}`",
                x.owner, self.name
            )))
        }
    }

    // ---- element construction -------------------------------------------------

    pub(crate) fn wrap(&self, value: DMatrix<f64>) -> GroupElement {
        GroupElement { owner: self.name.clone(), value }
    }

    pub(crate) fn wrap_algebra(&self, coeffs: DVector<f64>) -> AlgebraElement {
        AlgebraElement { owner: self.name.clone(), coeffs }
    }

    pub fn identity(&self) -> GroupElement {
        self.wrap(self.identity_raw())
    }

    pub(crate) fn identity_raw(&self) -> DMatrix<f64> {
        match self.realization {
            Realization::Matrix => identity(self.mat_size),
            Realization::Vector | Realization::Torus => DMatrix::zeros(self.mat_size, 1),
        }
    }

    /// Wraps a raw value, checking shape and membership.
    pub fn element(&self, value: DMatrix<f64>) -> Result<GroupElement> {
        let expected = match self.realization {
            Realization::Matrix => (self.mat_size, self.mat_size),
            _ => (self.mat_size, 1),
        };
        if value.shape() != expected {
            return Err(Error::Domain(format!(
                "value of shape {:?} is not an element of `{}`",
                value.shape(),
                self.name
            )));
        }
        let residual = self.constraint_residual(&value);
        if residual > self.tolerance {
            return Err(Error::Domain(format!(
                "constraint residual {residual:e} exceeds tolerance for `{}`",
                self.name
            )));
        }
        Ok(self.wrap(self.canonical(value)))
    }

    fn canonical(&self, mut value: DMatrix<f64>) -> DMatrix<f64> {
        if self.realization == Realization::Torus {
            for v in value.iter_mut() {
                *v = wrap_unit(*v);
            }
        }
        value
    }

    pub fn algebra(&self, coeffs: DVector<f64>) -> Result<AlgebraElement> {
        if coeffs.len() != self.alg_dim() {
            return Err(Error::Domain(format!(
                "expected {} coefficients for `{}`, got {}",
                self.alg_dim(),
                self.name,
                coeffs.len()
            )));
        }
        Ok(self.wrap_algebra(coeffs))
    }

    pub fn algebra_from(&self, coeffs: &[f64]) -> Result<AlgebraElement> {
        self.algebra(DVector::from_column_slice(coeffs))
    }

    pub fn zero_algebra(&self) -> AlgebraElement {
        self.wrap_algebra(DVector::zeros(self.alg_dim()))
    }

    pub fn basis_element(&self, i: usize) -> AlgebraElement {
        let mut c = DVector::zeros(self.alg_dim());
        c[i] = 1.0;
        self.wrap_algebra(c)
    }

    /// Matrix (or column) form `sum_i c_i e_i`.
    pub fn matrix_of(&self, x: &AlgebraElement) -> DMatrix<f64> {
        self.matrix_of_coeffs(&x.coeffs)
    }

    pub(crate) fn matrix_of_coeffs(&self, c: &DVector<f64>) -> DMatrix<f64> {
        match self.realization {
            Realization::Matrix => {
                let mut m = DMatrix::zeros(self.mat_size, self.mat_size);
                for (ci, b) in c.iter().zip(&self.basis) {
                    if *ci != 0.0 {
                        m += b * *ci;
                    }
                }
                m
            }
            _ => DMatrix::from_column_slice(self.mat_size, 1, c.as_slice()),
        }
    }

    /// Coefficients of a matrix in the algebra basis; fails if it is not in the span.
    pub fn coords_of(&self, m: &DMatrix<f64>) -> Result<AlgebraElement> {
        let tol = 1e-9 * m.norm().max(1.0);
        Ok(self.wrap_algebra(self.coords_checked(m, tol)?))
    }

    pub(crate) fn coords_raw(&self, m: &DMatrix<f64>) -> DVector<f64> {
        match self.realization {
            Realization::Matrix => &self.coords * vectorize(m),
            _ => DVector::from_column_slice(m.as_slice()),
        }
    }

    fn coords_checked(&self, m: &DMatrix<f64>, tol: f64) -> Result<DVector<f64>> {
        let c = self.coords_raw(m);
        if self.realization == Realization::Matrix {
            let residual = (self.matrix_of_coeffs(&c) - m).norm();
            if residual > tol {
                return Err(Error::Closure { residual });
            }
        }
        Ok(c)
    }

    // ---- group operations -----------------------------------------------------

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        self.check_element(a)?;
        self.check_element(b)?;
        Ok(self.wrap(self.mul_raw(&a.value, &b.value)))
    }

    pub(crate) fn mul_raw(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
        match self.realization {
            Realization::Matrix => a * b,
            Realization::Vector => a + b,
            Realization::Torus => (a + b).map(wrap_unit),
        }
    }

    pub fn inv(&self, a: &GroupElement) -> Result<GroupElement> {
        self.check_element(a)?;
        Ok(self.wrap(self.inv_raw(&a.value)?))
    }

    pub(crate) fn inv_raw(&self, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        match self.realization {
            Realization::Matrix => match self.constraint {
                Constraint::SpecialOrthogonal | Constraint::UnitQuaternion => Ok(a.transpose()),
                _ => a.clone().try_inverse().ok_or_else(|| {
                    Error::Numeric(format!(
                        "singular matrix in `{}` (constraint residual {:e})",
                        self.name,
                        self.constraint.residual(a)
                    ))
                }),
            },
            Realization::Vector => Ok(-a),
            Realization::Torus => Ok(a.map(|v| wrap_unit(-v))),
        }
    }

    /// Conjugation `a b a^-1`.
    pub fn conj(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
        let ab = self.mul(a, b)?;
        self.mul(&ab, &self.inv(a)?)
    }

    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_algebra(x)?;
        self.check_algebra(y)?;
        Ok(self.wrap_algebra(self.bracket_raw(&x.coeffs, &y.coeffs)?))
    }

    pub(crate) fn bracket_raw(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        if self.abelian {
            return Ok(DVector::zeros(self.alg_dim()));
        }
        let xm = self.matrix_of_coeffs(x);
        let ym = self.matrix_of_coeffs(y);
        let c = commutator(&xm, &ym);
        let tol = 1e-9 * (xm.norm() * ym.norm()).max(1.0);
        self.coords_checked(&c, tol)
    }

    /// Matrix of `ad(X) = [X, .]` in the algebra basis.
    pub fn ad(&self, x: &AlgebraElement) -> Result<DMatrix<f64>> {
        self.check_algebra(x)?;
        self.ad_raw(&x.coeffs)
    }

    pub(crate) fn ad_raw(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let d = self.alg_dim();
        let mut out = DMatrix::zeros(d, d);
        if self.abelian {
            return Ok(out);
        }
        for j in 0..d {
            let mut ej = DVector::zeros(d);
            ej[j] = 1.0;
            out.set_column(j, &self.bracket_raw(x, &ej)?);
        }
        Ok(out)
    }

    /// Matrix of `Ad(a): X -> a X a^-1` in the algebra basis.
    pub fn adjoint(&self, a: &GroupElement) -> Result<DMatrix<f64>> {
        self.check_element(a)?;
        self.adjoint_raw(&a.value)
    }

    pub(crate) fn adjoint_raw(&self, a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let d = self.alg_dim();
        if self.abelian || *a == self.identity_raw() {
            return Ok(identity(d));
        }
        let a_inv = self.inv_raw(a)?;
        let mut out = DMatrix::zeros(d, d);
        let tol = 1e-9 * (a.norm() * a_inv.norm()).max(1.0);
        for (j, b) in self.basis.iter().enumerate() {
            let conj = a * b * &a_inv;
            out.set_column(j, &self.coords_checked(&conj, tol)?);
        }
        Ok(out)
    }

    pub fn exp(&self, x: &AlgebraElement) -> Result<GroupElement> {
        self.check_algebra(x)?;
        if x.coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("non-finite algebra coefficients".into()));
        }
        Ok(self.wrap(self.exp_raw(&x.coeffs)))
    }

    pub(crate) fn exp_raw(&self, c: &DVector<f64>) -> DMatrix<f64> {
        match self.realization {
            Realization::Vector => self.matrix_of_coeffs(c),
            Realization::Torus => self.matrix_of_coeffs(c).map(wrap_unit),
            Realization::Matrix => match self.exp_rule {
                ExpRule::Rodrigues => rodrigues(c),
                ExpRule::Quaternion => quaternion_exp(c),
                ExpRule::Nilpotent => matrix::expm_nilpotent(&self.matrix_of_coeffs(c)),
                ExpRule::Generic => {
                    if c.iter().all(|v| *v == 0.0) {
                        identity(self.mat_size)
                    } else {
                        matrix::expm(&self.matrix_of_coeffs(c))
                    }
                }
            },
        }
    }

    /// Principal logarithm. Fails with a branch error outside the declared principal domain.
    pub fn log(&self, a: &GroupElement) -> Result<AlgebraElement> {
        self.check_element(a)?;
        Ok(self.wrap_algebra(self.log_raw(&a.value)?))
    }

    pub(crate) fn log_raw(&self, a: &DMatrix<f64>) -> Result<DVector<f64>> {
        if !all_finite(a) {
            return Err(Error::Numeric("non-finite group element".into()));
        }
        let c = match self.realization {
            Realization::Vector => DVector::from_column_slice(a.as_slice()),
            Realization::Torus => DVector::from_iterator(a.len(), a.iter().map(|v| centered(*v))),
            Realization::Matrix => match self.exp_rule {
                ExpRule::Rodrigues => so3_log(a)?,
                ExpRule::Quaternion => quaternion_log(a)?,
                ExpRule::Nilpotent => self.coords_raw(&matrix::logm_unipotent(a)),
                ExpRule::Generic => {
                    let l = matrix::logm(a)?;
                    self.coords_checked(&l, 1e-8 * l.norm().max(1.0))
                        .map_err(|_| Error::Branch(format!("logarithm leaves the algebra of `{}`", self.name)))?
                }
            },
        };
        if let Some(radius) = self.log_radius {
            if c.norm() >= radius {
                return Err(Error::Branch(format!(
                    "|log| = {} is outside the principal ball of radius {radius} for `{}`",
                    c.norm(),
                    self.name
                )));
            }
        }
        Ok(c)
    }

    /// `g exp(tX)` (flow of the left-invariant field) or `exp(tX) g` (right-invariant field).
    pub fn one_parameter_flow(
        &self,
        x: &AlgebraElement,
        t: f64,
        side: Side,
        g: &GroupElement,
    ) -> Result<GroupElement> {
        self.check_element(g)?;
        let step = self.exp(&x.scaled(t))?;
        match side {
            Side::Left => self.mul(g, &step),
            Side::Right => self.mul(&step, g),
        }
    }

    /// Left-invariant distance `|a^-1 b - I|_F`; wrapped Euclidean distance on tori.
    pub fn distance(&self, a: &GroupElement, b: &GroupElement) -> Result<f64> {
        self.check_element(a)?;
        self.check_element(b)?;
        self.distance_raw(&a.value, &b.value)
    }

    pub(crate) fn distance_raw(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
        Ok(match self.realization {
            Realization::Matrix => (self.inv_raw(a)? * b - identity(self.mat_size)).norm(),
            Realization::Vector => (a - b).norm(),
            Realization::Torus => (a - b).map(centered).norm(),
        })
    }
}

/// Representative of `v mod 1` in `[0, 1)`.
pub(crate) fn wrap_unit(v: f64) -> f64 {
    let r = v - v.floor();
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Representative of `v mod 1` in `[-1/2, 1/2)`.
pub(crate) fn centered(v: f64) -> f64 {
    v - (v + 0.5).floor()
}

fn hat3(w: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0])
}

fn rodrigues(w: &DVector<f64>) -> DMatrix<f64> {
    let theta2 = w.norm_squared();
    let theta = theta2.sqrt();
    let k = hat3(w);
    let (a, b) = if theta < 1e-4 {
        (
            1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0,
            0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0,
        )
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    identity(3) + &k * a + &k * &k * b
}

fn so3_log(r: &DMatrix<f64>) -> Result<DVector<f64>> {
    let w = DVector::from_column_slice(&[
        0.5 * (r[(2, 1)] - r[(1, 2)]),
        0.5 * (r[(0, 2)] - r[(2, 0)]),
        0.5 * (r[(1, 0)] - r[(0, 1)]),
    ]);
    let s = w.norm();
    let c = ((r.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let theta = s.atan2(c);
    if std::f64::consts::PI - theta < 1e-12 {
        return Err(Error::Branch("rotation by pi has no unique logarithm".into()));
    }
    if c > 0.0 {
        let ratio = if s < 1e-8 { 1.0 + s * s / 6.0 } else { theta / s };
        return Ok(w * ratio);
    }
    // Near pi: read the axis from the symmetric part, the sign from the skew part.
    let sym = (r + r.transpose()) * 0.5 - identity(3) * c;
    let scale = 1.0 - c;
    let i = (0..3)
        .max_by(|&a, &b| sym[(a, a)].partial_cmp(&sym[(b, b)]).unwrap())
        .unwrap();
    let mut axis = DVector::from_iterator(3, (0..3).map(|k| sym[(k, i)] / scale));
    axis /= axis.norm();
    if axis.dot(&w) < 0.0 {
        axis = -axis;
    }
    Ok(axis * theta)
}

/// SU(2) as unit quaternions acting by left multiplication; basis `e_a = L(u_a) / 2`.
fn quaternion_exp(c: &DVector<f64>) -> DMatrix<f64> {
    let n = c.norm();
    let half = 0.5 * n;
    let k = if n < 1e-6 {
        0.5 * (1.0 - half * half / 6.0)
    } else {
        half.sin() / n
    };
    quaternion_left_matrix([half.cos(), c[0] * k, c[1] * k, c[2] * k])
}

fn quaternion_log(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    let w = m[(0, 0)];
    let v = DVector::from_column_slice(&[m[(1, 0)], m[(2, 0)], m[(3, 0)]]);
    let s = v.norm();
    let angle = 2.0 * s.atan2(w);
    if 2.0 * std::f64::consts::PI - angle < 1e-9 {
        return Err(Error::Branch("-1 in SU(2) has no unique logarithm".into()));
    }
    let ratio = if s < 1e-8 && w > 0.0 {
        2.0 / w * (1.0 - s * s / (3.0 * w * w))
    } else {
        angle / s
    };
    Ok(v * ratio)
}

/// Element of a group, stored in its realization.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement {
    owner: Arc<str>,
    value: DMatrix<f64>,
}

impl GroupElement {
    pub fn owner(&self) -> &str {
        &self.owner
    }

    pub fn value(&self) -> &DMatrix<f64> {
        &self.value
    }

    pub fn into_value(self) -> DMatrix<f64> {
        self.value
    }
}

/// Element of a Lie algebra, as coefficients in the owner's basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    owner: Arc<str>,
    coeffs: DVector<f64>,
}

impl AlgebraElement {
    pub fn owner(&self) -> &str {
        &self.owner
    }

    pub fn coeffs(&self) -> &DVector<f64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DVector<f64> {
        self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn scaled(&self, s: f64) -> AlgebraElement {
        AlgebraElement { owner: self.owner.clone(), coeffs: &self.coeffs * s }
    }

    /// Sum of two elements of the same algebra.
    pub fn plus(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        if *self.owner != *other.owner {
            return Err(Error::Domain("sum of elements of different algebras".into()));
        }
        Ok(AlgebraElement { owner: self.owner.clone(), coeffs: &self.coeffs + &other.coeffs })
    }

    pub fn minus(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.plus(&other.scaled(-1.0))
    }
}
