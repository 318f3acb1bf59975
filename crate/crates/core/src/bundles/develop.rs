use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::connection::ConnectionChart;
use crate::curves::{discrete_log_derivative, GroupPath, PathInBase};
use crate::error::{Error, Result};
use crate::evolution::evolve;
use crate::lie::{GroupElement, Side};

/// Largest Maurer-Cartan defect accepted by [`develop`].
pub const FLATNESS_TOLERANCE: f64 = 1e-6;
/// Cells per axis of the flatness probe grid.
pub const FLATNESS_PROBES: usize = 8;

/// A solution `f: U -> G` of `delta^r f = phi` with `f(x0) = e`.
#[derive(Clone, Debug)]
pub struct Development {
    phi: ConnectionChart,
    x0: DVector<f64>,
    steps: usize,
}

/// Integrates a flat `g`-valued 1-form on a box to a map into the group.
pub fn develop(phi: &ConnectionChart, x0: &DVector<f64>, steps: usize) -> Result<Development> {
    if !phi.domain().contains(x0) {
        return Err(Error::Domain("base point outside the domain".into()));
    }
    let (residual, point) = phi.flatness_residual(FLATNESS_PROBES)?;
    if residual > FLATNESS_TOLERANCE {
        return Err(Error::NotFlat {
            residual,
            point: point.iter().copied().collect(),
        });
    }
    Ok(Development {
        phi: phi.clone(),
        x0: x0.clone(),
        steps,
    })
}

impl Development {
    pub fn base_point(&self) -> &DVector<f64> {
        &self.x0
    }

    /// `Evol^r(phi(c'))(1)` along `c`.
    fn along(&self, c: &PathInBase) -> Result<DMatrix<f64>> {
        Ok(evolve(&self.phi.pullback(c, 1.0)?, Side::Right, self.steps)?
            .endpoint
            .into_value())
    }

    /// `f(x)` along the axis staircase from `x0`: first axis first, each leg
    /// evolved separately and composed on the left.
    pub fn at(&self, x: &DVector<f64>) -> Result<GroupElement> {
        let g = self.phi.group();
        if !self.phi.domain().contains(x) {
            return Err(Error::Domain(format!("point {:?} outside the domain", x.as_slice())));
        }
        let mut acc = g.identity_raw();
        let mut from = self.x0.clone();
        for i in 0..x.len() {
            if x[i] == from[i] {
                continue;
            }
            let mut to = from.clone();
            to[i] = x[i];
            let leg = self.along(&PathInBase::segment(from, to.clone()))?;
            acc = g.mul_raw(&leg, &acc);
            from = to;
        }
        Ok(g.wrap(acc))
    }

    /// `f(x)` along the straight segment from `x0`.
    pub fn along_segment(&self, x: &DVector<f64>) -> Result<GroupElement> {
        let c = PathInBase::segment(self.x0.clone(), x.clone());
        Ok(self.phi.group().wrap(self.along(&c)?))
    }

    /// Largest staircase-versus-segment gap over `points`.
    pub fn path_independence_residual(&self, points: &[DVector<f64>]) -> Result<f64> {
        let mut worst = 0.0f64;
        for x in points {
            let a = self.at(x)?;
            let b = self.along_segment(x)?;
            worst = worst.max((a.value() - b.value()).norm());
        }
        Ok(worst)
    }

    /// `delta^r (f o c) = phi(c')` along random segments, the left side from
    /// `samples` sampled values of `f`.
    pub fn log_derivative_residual<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        segments: usize,
        samples: usize,
    ) -> Result<f64> {
        let dom = self.phi.domain();
        let g = self.phi.group();
        let draw = |rng: &mut R| {
            DVector::from_iterator(
                dom.dim(),
                (0..dom.dim()).map(|a| {
                    let w = dom.hi[a] - dom.lo[a];
                    rng.random_range(dom.lo[a] + 0.1 * w..dom.hi[a] - 0.1 * w)
                }),
            )
        };
        let mut worst = 0.0f64;
        for _ in 0..segments {
            let (a, b) = (draw(rng), draw(rng));
            let c = PathInBase::segment(a, b);
            let path = GroupPath::sample(g.clone(), samples, |t| self.at(&c.point(t)))?;
            let d = discrete_log_derivative(&path, Side::Right)?;
            let expect = self.phi.pullback(&c, 1.0)?;
            for k in 1..10 {
                let t = k as f64 / 10.0;
                worst = worst.max((d.coeffs_at(t)? - expect.coeffs_at(t)?).norm());
            }
        }
        Ok(worst)
    }
}
