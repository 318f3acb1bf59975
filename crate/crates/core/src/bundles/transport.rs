use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::connection::ConnectionChart;
use crate::curves::{log_derivative_at, GroupPath, PathInBase};
use crate::error::{Error, Result};
use crate::evolution::{evolve, EvolutionResult};
use crate::lie::{GroupElement, Side};

/// Loops whose ends are further apart than this are rejected.
pub const LOOP_CLOSURE_LIMIT: f64 = 1e-9;

/// Horizontal lift of a base path in the fibre coordinate of the unit section:
/// `gamma(t) = Evol^r(-omega(c'))(t) g0`.
#[derive(Clone, Debug)]
pub struct Transport {
    pub path: GroupPath,
    evol: Arc<EvolutionResult>,
    g0: DMatrix<f64>,
}

impl Transport {
    /// `gamma(t)` anywhere in `[0, 1]`.
    pub fn at(&self, t: f64) -> Result<GroupElement> {
        let g = self.path.owner();
        Ok(g.wrap(g.mul_raw(&self.evol.at_raw(t)?, &self.g0)))
    }

    pub fn endpoint(&self) -> GroupElement {
        self.path.endpoint()
    }
}

pub fn parallel_transport(
    conn: &ConnectionChart,
    c: &PathInBase,
    g0: &GroupElement,
    steps: usize,
) -> Result<Transport> {
    let g = conn.group();
    if g0.owner() != g.name() {
        return Err(Error::Domain("initial fibre point lives in another group".into()));
    }
    let evol = evolve(&conn.pullback(c, -1.0)?, Side::Right, steps)?;
    let values = evol.path.values().iter().map(|e| g.mul_raw(e, g0.value())).collect();
    let path = GroupPath::from_raw(g.clone(), evol.path.times().to_vec(), values, "parallel-transport")?;
    Ok(Transport {
        path,
        evol: Arc::new(evol),
        g0: g0.value().clone(),
    })
}

/// Largest `|omega(lifted velocity)| = |Ad(gamma^-1) omega(c') + delta^l gamma|` over
/// `samples` interior times; `delta^l gamma` by central differences of step `h`.
pub fn horizontality_residual(
    conn: &ConnectionChart,
    c: &PathInBase,
    transport: &Transport,
    samples: usize,
    h: f64,
) -> Result<f64> {
    let g = conn.group();
    let mut worst = 0.0f64;
    for k in 0..samples {
        let t = (k as f64 + 0.5) / samples as f64;
        let dl = log_derivative_at(g, |s| Ok(transport.at(s)?.into_value()), t, h, Side::Left)?;
        let gamma = transport.at(t)?;
        let form = conn.bundle_form(&c.point(t), &c.velocity(t), &gamma, &g.algebra(dl)?)?;
        worst = worst.max(form.norm());
    }
    Ok(worst)
}

/// `Pt(c, t, u.g) = Pt(c, t, u).g`: largest gap over the grid.
pub fn transport_equivariance_residual(
    conn: &ConnectionChart,
    c: &PathInBase,
    g0: &GroupElement,
    g: &GroupElement,
    steps: usize,
) -> Result<f64> {
    let grp = conn.group();
    let moved = parallel_transport(conn, c, &grp.mul(g0, g)?, steps)?;
    let base = parallel_transport(conn, c, g0, steps)?;
    Ok(moved
        .path
        .values()
        .iter()
        .zip(base.path.values())
        .map(|(a, b)| (a - grp.mul_raw(b, g.value())).norm())
        .fold(0.0, f64::max))
}

/// `Pt(c, f(t), u) = Pt(c o f, t, Pt(c, f(0), u))` at the grid times.
pub fn transport_reparameterization_residual<F, D>(
    conn: &ConnectionChart,
    c: &PathInBase,
    g0: &GroupElement,
    f: F,
    fprime: D,
    steps: usize,
) -> Result<f64>
where
    F: Fn(f64) -> f64 + Send + Sync + Clone + 'static,
    D: Fn(f64) -> f64 + Send + Sync + 'static,
{
    let direct = parallel_transport(conn, c, g0, steps)?;
    let start = direct.at(f(0.0))?;
    let composed = parallel_transport(conn, &c.reparameterized(f.clone(), fprime), &start, steps)?;
    let mut worst = 0.0f64;
    for (t, v) in composed.path.times().iter().zip(composed.path.values()) {
        worst = worst.max((direct.at(f(*t))?.value() - v).norm());
    }
    Ok(worst)
}

/// One sampled generator of the holonomy group at `(loop(0), g0)`.
#[derive(Clone, Debug)]
pub struct HolonomyRecord {
    pub loop_path: PathInBase,
    pub basepoint_fiber: GroupElement,
    pub transport_endpoint: GroupElement,
    /// `g0^-1 gamma(1)`, i.e. `g0^-1 Evol^r(-omega(c'))(1) g0`.
    pub holonomy_element: GroupElement,
    pub closure_gap: f64,
}

pub fn holonomy(conn: &ConnectionChart, lp: &PathInBase, g0: &GroupElement, steps: usize) -> Result<HolonomyRecord> {
    let gap = lp.closure_gap();
    if gap > LOOP_CLOSURE_LIMIT {
        return Err(Error::OpenLoop { gap });
    }
    let g = conn.group();
    let tr = parallel_transport(conn, lp, g0, steps)?;
    let end = tr.endpoint();
    let hol = g.mul(&g.inv(g0)?, &end)?;
    Ok(HolonomyRecord {
        loop_path: lp.clone(),
        basepoint_fiber: g0.clone(),
        transport_endpoint: end,
        holonomy_element: hol,
        closure_gap: gap,
    })
}

/// `Hol(omega, u0.g) = g^-1 Hol(omega, u0) g` for one loop.
pub fn holonomy_conjugation_residual(
    conn: &ConnectionChart,
    lp: &PathInBase,
    g0: &GroupElement,
    g: &GroupElement,
    steps: usize,
) -> Result<f64> {
    let grp = conn.group();
    let base = holonomy(conn, lp, g0, steps)?.holonomy_element;
    let moved = holonomy(conn, lp, &grp.mul(g0, g)?, steps)?.holonomy_element;
    let expected = grp.conj(&grp.inv(g)?, &base)?;
    Ok((moved.value() - expected.value()).norm())
}

/// Holonomy at the transported basepoint `Pt(c, 1, u0)` along the loop
/// `c^-1 . loop . c` against the holonomy of `loop` at `u0`.
pub fn basepoint_invariance_residual(
    conn: &ConnectionChart,
    lp: &PathInBase,
    c: &PathInBase,
    g0: &GroupElement,
    steps: usize,
) -> Result<f64> {
    let base = holonomy(conn, lp, g0, steps)?.holonomy_element;
    let g1 = parallel_transport(conn, c, g0, steps)?.endpoint();
    let conjugated = c.reversed().then(lp)?.then(c)?;
    // the joined loop is three paths long; 4x keeps both joints on grid nodes
    let moved = holonomy(conn, &conjugated, &g1, 4 * steps)?.holonomy_element;
    Ok((moved.value() - base.value()).norm())
}

/// `log(Hol) / eps^2` for the positively oriented square of side `eps` at
/// `corner` in the `(i, j)` plane; tends to `-F(d_i, d_j)(corner)`.
pub fn small_loop_curvature(
    conn: &ConnectionChart,
    corner: &DVector<f64>,
    i: usize,
    j: usize,
    eps: f64,
    steps: usize,
) -> Result<DVector<f64>> {
    let g = conn.group();
    let lp = PathInBase::square_loop(corner, i, j, eps)?;
    let hol = holonomy(conn, &lp, &g.identity(), steps)?.holonomy_element;
    Ok(g.log(&hol)?.into_coeffs() / (eps * eps))
}
