use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::lie::{Group, GroupElement};

/// Ordered samples `(t_i, g_i)` of a curve in a group.
#[derive(Clone)]
pub struct GroupPath {
    owner: Group,
    times: Vec<f64>,
    values: Vec<DMatrix<f64>>,
    scheme: String,
}

impl fmt::Debug for GroupPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupPath")
            .field("owner", &self.owner.name())
            .field("nodes", &self.times.len())
            .field("scheme", &self.scheme)
            .finish()
    }
}

impl GroupPath {
    pub fn new(owner: Group, nodes: Vec<(f64, GroupElement)>, scheme: &str) -> Result<Self> {
        let mut times = Vec::with_capacity(nodes.len());
        let mut values = Vec::with_capacity(nodes.len());
        for (t, g) in nodes {
            if g.owner() != owner.name() {
                return Err(Error::Domain(format!(
                    "path node belongs to {}, not {}",
                    g.owner(),
                    owner.name()
                )));
            }
            let r = owner.constraint_residual(g.value());
            if r > owner.tolerance() {
                return Err(Error::Domain(format!("path node at t = {t} is off the group (residual {r:e})")));
            }
            times.push(t);
            values.push(g.into_value());
        }
        Self::from_raw(owner, times, values, scheme)
    }

    pub(crate) fn from_raw(owner: Group, times: Vec<f64>, values: Vec<DMatrix<f64>>, scheme: &str) -> Result<Self> {
        if times.len() < 2 || times.len() != values.len() {
            return Err(Error::Domain("a path needs at least two nodes".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("path times must be strictly increasing".into()));
        }
        Ok(GroupPath {
            owner,
            times,
            values,
            scheme: scheme.to_string(),
        })
    }

    /// Samples `f` on `n` uniform steps over `[0, 1]`.
    pub fn sample<F>(owner: Group, n: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<GroupElement>,
    {
        let nodes = (0..=n.max(1))
            .map(|i| {
                let t = i as f64 / n.max(1) as f64;
                f(t).map(|g| (t, g))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(owner, nodes, "sampled")
    }

    pub fn owner(&self) -> &Group {
        &self.owner
    }

    pub fn scheme(&self) -> &str {
        &self.scheme
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[DMatrix<f64>] {
        &self.values
    }

    pub fn element(&self, i: usize) -> GroupElement {
        self.owner.wrap(self.values[i].clone())
    }

    pub fn endpoint(&self) -> GroupElement {
        self.element(self.len() - 1)
    }

    /// Largest constraint residual over the nodes.
    pub fn max_constraint_residual(&self) -> f64 {
        self.values
            .iter()
            .map(|v| self.owner.constraint_residual(v))
            .fold(0.0, f64::max)
    }
}

type PointFn = Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>;

/// Step of the central difference used when no analytic velocity is given.
pub const VELOCITY_STEP: f64 = 1e-6;

/// A smooth curve `[0, 1] -> R^m` in a chart domain.
#[derive(Clone)]
pub struct PathInBase {
    dim: usize,
    point: PointFn,
    velocity: Option<PointFn>,
}

impl fmt::Debug for PathInBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PathInBase")
            .field("dim", &self.dim)
            .field("analytic_velocity", &self.velocity.is_some())
            .finish()
    }
}

fn smootherstep(u: f64) -> (f64, f64) {
    let u = u.clamp(0.0, 1.0);
    let s = u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
    let ds = 30.0 * u * u * (1.0 - u) * (1.0 - u);
    (s, ds)
}

impl PathInBase {
    pub fn new<F>(dim: usize, point: F) -> Self
    where
        F: Fn(f64) -> DVector<f64> + Send + Sync + 'static,
    {
        PathInBase {
            dim,
            point: Arc::new(point),
            velocity: None,
        }
    }

    pub fn with_velocity<F>(mut self, velocity: F) -> Self
    where
        F: Fn(f64) -> DVector<f64> + Send + Sync + 'static,
    {
        self.velocity = Some(Arc::new(velocity));
        self
    }

    pub fn constant(p: DVector<f64>) -> Self {
        let dim = p.len();
        let q = p.clone();
        Self::new(dim, move |_| p.clone()).with_velocity(move |_| DVector::zeros(q.len()))
    }

    /// Straight segment traversed at constant speed.
    pub fn segment(a: DVector<f64>, b: DVector<f64>) -> Self {
        let d = &b - &a;
        let d2 = d.clone();
        Self::new(a.len(), move |t| &a + &d * t).with_velocity(move |_| d2.clone())
    }

    /// Polygon through `vertices`, each leg eased with a quintic smoothstep so the
    /// velocity vanishes at the corners and the path is twice differentiable.
    pub fn polygon(vertices: Vec<DVector<f64>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Domain("a polygon needs at least two vertices".into()));
        }
        let dim = vertices[0].len();
        if vertices.iter().any(|v| v.len() != dim) {
            return Err(Error::Domain("polygon vertices differ in dimension".into()));
        }
        let verts = Arc::new(vertices);
        let legs = verts.len() - 1;
        let locate = move |t: f64| {
            let x = t.clamp(0.0, 1.0) * legs as f64;
            let j = (x.floor() as usize).min(legs - 1);
            (j, x - j as f64)
        };
        let (v1, v2) = (verts.clone(), verts);
        Ok(Self::new(dim, move |t| {
            let (j, u) = locate(t);
            let (s, _) = smootherstep(u);
            &v1[j] + (&v1[j + 1] - &v1[j]) * s
        })
        .with_velocity(move |t| {
            let (j, u) = locate(t);
            let (_, ds) = smootherstep(u);
            (&v2[j + 1] - &v2[j]) * (ds * legs as f64)
        }))
    }

    /// Positively oriented boundary of the axis square `[x, x+side] x [y, y+side]`
    /// in the coordinate plane of axes `(i, j)` through `corner`.
    pub fn square_loop(corner: &DVector<f64>, i: usize, j: usize, side: f64) -> Result<Self> {
        let mut p1 = corner.clone();
        p1[i] += side;
        let mut p2 = p1.clone();
        p2[j] += side;
        let mut p3 = corner.clone();
        p3[j] += side;
        Self::polygon(vec![corner.clone(), p1, p2, p3, corner.clone()])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, t: f64) -> DVector<f64> {
        (self.point)(t)
    }

    pub fn has_analytic_velocity(&self) -> bool {
        self.velocity.is_some()
    }

    pub fn velocity(&self, t: f64) -> DVector<f64> {
        match &self.velocity {
            Some(v) => v(t),
            None => {
                let h = VELOCITY_STEP;
                ((self.point)(t + h) - (self.point)(t - h)) / (2.0 * h)
            }
        }
    }

    /// `|c(1) - c(0)|`.
    pub fn closure_gap(&self) -> f64 {
        (self.point(1.0) - self.point(0.0)).norm()
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        let p = self.point.clone();
        let me = self.clone();
        Self::new(self.dim, move |t| p(1.0 - t)).with_velocity(move |t| -me.velocity(1.0 - t))
    }

    /// `t -> c(f(t))`.
    pub fn reparameterized<F, D>(&self, f: F, fprime: D) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let p = self.point.clone();
        let me = self.clone();
        let f = Arc::new(f);
        let f2 = f.clone();
        Self::new(self.dim, move |t| p(f(t))).with_velocity(move |t| me.velocity(f2(t)) * fprime(t))
    }

    /// `self` on `[0, 1/2]` followed by `other` on `[1/2, 1]`, each at double speed.
    /// The velocity may jump at `1/2`; with an even number of steps that is a
    /// grid node, which the evolution schemes never sample.
    pub fn then(&self, other: &PathInBase) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Domain("cannot join paths of different dimension".into()));
        }
        let gap = (self.point(1.0) - other.point(0.0)).norm();
        if gap > 1e-12 {
            return Err(Error::OpenLoop { gap });
        }
        let (a, b) = (self.clone(), other.clone());
        let (a2, b2) = (self.clone(), other.clone());
        Ok(Self::new(self.dim, move |t| {
            if t < 0.5 {
                a.point(2.0 * t)
            } else {
                b.point(2.0 * t - 1.0)
            }
        })
        .with_velocity(move |t| {
            if t < 0.5 {
                a2.velocity(2.0 * t) * 2.0
            } else {
                b2.velocity(2.0 * t - 1.0) * 2.0
            }
        }))
    }

    /// Largest disagreement between the velocity and a central difference of the
    /// point map, over `samples` random interior times.
    pub fn velocity_consistency<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> f64 {
        let h = VELOCITY_STEP;
        (0..samples)
            .map(|_| {
                let t = rng.random_range(0.01..0.99);
                let fd = (self.point(t + h) - self.point(t - h)) / (2.0 * h);
                (fd - self.velocity(t)).norm()
            })
            .fold(0.0, f64::max)
    }
}
