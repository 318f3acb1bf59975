use std::fmt;

use nalgebra::DMatrix;

use crate::curves::{AlgebraCurve, GroupPath};
use crate::error::{Error, Result};
use crate::lie::matrix::all_finite;
use crate::lie::{GroupElement, GroupSpec, Side};

/// Constraint drift beyond which a run is reported as broken.
pub const DRIFT_LIMIT: f64 = 1e-6;

/// Fixed-step exponential integrators for `g' = X(t) g` (right) or `g' = g X(t)` (left).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Fourth-order commutator-free method with two exponentials per step,
    /// stages at the Gauss-Legendre nodes.
    #[default]
    CommutatorFree4,
    /// Second-order exponential midpoint rule.
    ExponentialMidpoint,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::CommutatorFree4 => "cf4",
            Scheme::ExponentialMidpoint => "exp-midpoint",
        }
    }

    pub fn order(self) -> u32 {
        match self {
            Scheme::CommutatorFree4 => 4,
            Scheme::ExponentialMidpoint => 2,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

const SQRT3_6: f64 = 0.288_675_134_594_812_9; // sqrt(3)/6
const C1: f64 = 0.5 - SQRT3_6;
const C2: f64 = 0.5 + SQRT3_6;
const ALPHA1: f64 = 0.25 - SQRT3_6;
const ALPHA2: f64 = 0.25 + SQRT3_6;

/// One step of size `h` from `(t, cur)`.
pub(crate) fn step(
    g: &GroupSpec,
    x: &AlgebraCurve,
    side: Side,
    scheme: Scheme,
    t: f64,
    h: f64,
    cur: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    match scheme {
        Scheme::CommutatorFree4 => {
            let a1 = x.coeffs_at(t + C1 * h)?;
            let a2 = x.coeffs_at(t + C2 * h)?;
            let late = g.exp_raw(&((&a1 * ALPHA1 + &a2 * ALPHA2) * h));
            let early = g.exp_raw(&((&a1 * ALPHA2 + &a2 * ALPHA1) * h));
            Ok(match side {
                Side::Right => g.mul_raw(&late, &g.mul_raw(&early, cur)),
                Side::Left => g.mul_raw(&g.mul_raw(cur, &early), &late),
            })
        }
        Scheme::ExponentialMidpoint => {
            let e = g.exp_raw(&(x.coeffs_at(t + 0.5 * h)? * h));
            Ok(match side {
                Side::Right => g.mul_raw(&e, cur),
                Side::Left => g.mul_raw(cur, &e),
            })
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionStats {
    pub steps: usize,
    pub max_drift: f64,
    pub scheme: Scheme,
}

/// Trajectory of an evolution operator together with what produced it.
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub path: GroupPath,
    pub endpoint: GroupElement,
    pub stats: EvolutionStats,
    dense: Option<(AlgebraCurve, Side)>,
}

impl EvolutionResult {
    pub(crate) fn without_dense_output(path: GroupPath, stats: EvolutionStats) -> Self {
        let endpoint = path.endpoint();
        EvolutionResult {
            path,
            endpoint,
            stats,
            dense: None,
        }
    }

    pub fn side(&self) -> Option<Side> {
        self.dense.as_ref().map(|(_, s)| *s)
    }

    /// Value at any `t` in the path's range: a node, or a partial step of the
    /// same scheme from the preceding node (so the order is kept).
    pub fn at(&self, t: f64) -> Result<GroupElement> {
        Ok(self.path.owner().wrap(self.at_raw(t)?))
    }

    pub(crate) fn at_raw(&self, t: f64) -> Result<DMatrix<f64>> {
        let times = self.path.times();
        let (first, last) = (times[0], times[times.len() - 1]);
        if t < first - 1e-12 || t > last + 1e-12 {
            return Err(Error::Domain(format!("t = {t} outside [{first}, {last}]")));
        }
        let i = match times.binary_search_by(|k| k.total_cmp(&t)) {
            Ok(i) => return Ok(self.path.values()[i].clone()),
            Err(0) => return Ok(self.path.values()[0].clone()),
            Err(i) => (i - 1).min(times.len() - 2),
        };
        let Some((curve, side)) = &self.dense else {
            return Err(Error::Domain("this result carries no dense output".into()));
        };
        step(
            self.path.owner(),
            curve,
            *side,
            self.stats.scheme,
            times[i],
            t - times[i],
            &self.path.values()[i],
        )
    }
}

/// Solves the evolution equation on `[0, 1]` with `steps` uniform steps of the
/// fourth-order scheme.
pub fn evolve(x: &AlgebraCurve, side: Side, steps: usize) -> Result<EvolutionResult> {
    evolve_with(x, side, steps, Scheme::CommutatorFree4)
}

pub fn evolve_with(x: &AlgebraCurve, side: Side, steps: usize, scheme: Scheme) -> Result<EvolutionResult> {
    evolve_interval(x, side, 0.0, 1.0, steps, scheme)
}

/// Evolution from `g(t0) = e` to `t1` (`t0 < t1`).
pub fn evolve_interval(
    x: &AlgebraCurve,
    side: Side,
    t0: f64,
    t1: f64,
    steps: usize,
    scheme: Scheme,
) -> Result<EvolutionResult> {
    let g = x.owner();
    if steps == 0 {
        return Err(Error::Domain("evolution needs at least one step".into()));
    }
    if !(t1 > t0) {
        return Err(Error::Domain(format!("empty evolution interval [{t0}, {t1}]")));
    }
    let h = (t1 - t0) / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    let mut cur = g.identity_raw();
    times.push(t0);
    values.push(cur.clone());
    let mut max_drift = 0.0f64;
    for k in 0..steps {
        let t = t0 + h * k as f64;
        cur = step(g, x, side, scheme, t, h, &cur)?;
        if !all_finite(&cur) {
            return Err(Error::Numeric(format!("non-finite state at t = {}", t + h)));
        }
        let drift = g.constraint_residual(&cur);
        max_drift = max_drift.max(drift);
        if drift > DRIFT_LIMIT {
            return Err(Error::Integrity { drift, t: t + h });
        }
        times.push(if k + 1 == steps { t1 } else { t0 + h * (k + 1) as f64 });
        values.push(cur.clone());
    }
    let path = GroupPath::from_raw(g.clone(), times, values, scheme.as_str())?;
    let endpoint = path.endpoint();
    Ok(EvolutionResult {
        path,
        endpoint,
        stats: EvolutionStats {
            steps,
            max_drift,
            scheme,
        },
        dense: Some((x.clone(), side)),
    })
}

/// `Evol(X)(t)`: the solution at time `t`, computed with `steps` steps on `[0, t]`.
pub fn evol_at(x: &AlgebraCurve, side: Side, t: f64, steps: usize) -> Result<GroupElement> {
    if t == 0.0 {
        return Ok(x.owner().identity());
    }
    Ok(evolve_interval(x, side, 0.0, t, steps, Scheme::CommutatorFree4)?.endpoint)
}
