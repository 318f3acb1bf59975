use nalgebra::DVector;
use regulie_core::bundles::*;
use regulie_core::curves::quadrature_scalar;
use regulie_core::lie::sampling::random_element;
use regulie_core::{Error, GroupElement, PathInBase};
use serde_json::json;

use super::{group, min_order};
use crate::report::Measurement;
use crate::suite::{Check, Suite};

/// Allowed shortfall of an observed convergence order.
pub const ORDER_SLACK: f64 = 0.05;

fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

fn square() -> BoxDomain {
    BoxDomain::cube(2, -1.0, 1.0).expect("valid box")
}

/// A generic curved so(3) connection on the square.
fn curved() -> regulie_core::Result<ConnectionChart> {
    ConnectionChart::from_exprs(group("so3"), square(), &["x*y*e1 + sin(x)*e2", "cos(y)*e3 + x*e1 - 0.5*e2"])
}

/// `delta^r` of `f0(x, y) = exp(x e1) exp(y e2)`.
fn flat() -> regulie_core::Result<ConnectionChart> {
    ConnectionChart::from_exprs(group("so3"), square(), &["e1", "cos(x)*e2 + sin(x)*e3"])
}

fn f0(x: &DVector<f64>) -> regulie_core::Result<GroupElement> {
    let g = group("so3");
    let a = g.exp(&g.algebra_from(&[x[0], 0.0, 0.0])?)?;
    let b = g.exp(&g.algebra_from(&[0.0, x[1], 0.0])?)?;
    g.mul(&a, &b)
}

fn triangle() -> regulie_core::Result<PathInBase> {
    PathInBase::polygon(vec![v(&[0.9, -0.5]), v(&[-0.2, 0.4]), v(&[0.3, 0.9])])
}

pub fn register(out: &mut Vec<Check>) {
    let s = Suite::Bundles;

    out.push(Check::new("bundles.transport-equivariance", s, |rng| {
        let conn = curved()?;
        let g = conn.group().clone();
        let g0 = random_element(&g, rng, 2.0);
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let h = random_element(&g, rng, 3.0);
            worst = worst.max(transport_equivariance_residual(&conn, &triangle()?, &g0, &h, 256)?);
        }
        Ok(Measurement::new("so3", json!({"samples": 5, "steps": 256}), worst, 1e-9))
    }));

    out.push(Check::new("bundles.transport-reparameterization", s, |rng| {
        let conn = curved()?;
        let g0 = random_element(conn.group(), rng, 2.0);
        let r = transport_reparameterization_residual(&conn, &triangle()?, &g0, |t| t * t, |t| 2.0 * t, 1024)?;
        Ok(Measurement::new("so3", json!({"f": "t^2", "steps": 1024}), r, 1e-7))
    }));

    out.push(Check::new("bundles.transport-horizontality", s, |rng| {
        let conn = curved()?;
        let c = PathInBase::polygon(vec![v(&[-0.5, -0.5]), v(&[0.7, -0.2]), v(&[0.1, 0.8])])?;
        let g0 = random_element(conn.group(), rng, 2.0);
        let tr = parallel_transport(&conn, &c, &g0, 1024)?;
        let r = horizontality_residual(&conn, &c, &tr, 40, 1e-5)?;
        Ok(Measurement::new("so3", json!({"samples": 40, "h": 1e-5, "steps": 1024}), r, 1e-7))
    }));

    // the sign pin-down: Hol = exp(-int d omega)
    out.push(Check::new("bundles.holonomy-abelian", s, |_| {
        let dom = BoxDomain::cube(2, -0.5, 1.5)?;
        let conn = ConnectionChart::from_exprs(group("r:1"), dom, &["(x*y + sin(y))*e1", "x^2*y*e1"])?;
        let flux = quadrature_scalar(
            |x| quadrature_scalar(|y| 2.0 * x * y - x - y.cos(), 0.0, 1.0, 8).unwrap_or(f64::NAN),
            0.0,
            1.0,
            8,
        )?;
        let lp = PathInBase::square_loop(&v(&[0.0, 0.0]), 0, 1, 1.0)?;
        let rec = holonomy(&conn, &lp, &conn.group().identity(), 1024)?;
        let r = (rec.holonomy_element.value()[(0, 0)] + flux).abs();
        Ok(Measurement::new("r:1", json!({"loop": "unit square", "flux": flux, "steps": 1024}), r, 1e-8))
    }));

    out.push(Check::new("bundles.holonomy-conjugation", s, |rng| {
        let conn = curved()?;
        let g = conn.group().clone();
        let lp = PathInBase::square_loop(&v(&[-0.3, -0.4]), 0, 1, 0.8)?;
        let g0 = random_element(&g, rng, 2.0);
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let h = random_element(&g, rng, 3.0);
            worst = worst.max(holonomy_conjugation_residual(&conn, &lp, &g0, &h, 512)?);
        }
        Ok(Measurement::new("so3", json!({"samples": 3, "steps": 512}), worst, 1e-9))
    }));

    out.push(Check::new("bundles.holonomy-basepoint", s, |rng| {
        let conn = curved()?;
        let lp = PathInBase::square_loop(&v(&[-0.3, -0.4]), 0, 1, 0.8)?;
        let c = PathInBase::polygon(vec![v(&[-0.3, -0.4]), v(&[0.5, -0.8]), v(&[0.6, 0.1])])?;
        let g0 = random_element(conn.group(), rng, 2.0);
        let r = basepoint_invariance_residual(&conn, &lp, &c, &g0, 2048)?;
        Ok(Measurement::new("so3", json!({"steps": 2048}), r, 1e-8))
    }));

    // residual is the shortfall of the observed order below 1. The error is
    // c eps + O(eps^2) with a subleading term of opposite sign, so the order
    // tends to 1 from below (0.97, 0.98, 0.99, ...) and needs a little slack.
    out.push(Check::new("bundles.small-loop-order", s, |_| {
        let conn = curved()?;
        let corner = v(&[0.2, -0.3]);
        let f = conn.curvature(&corner, 0, 1)?.into_coeffs();
        let eps = [0.1, 0.05, 0.025];
        let mut errs = Vec::new();
        for e in eps {
            errs.push((small_loop_curvature(&conn, &corner, 0, 1, e, 512)? + &f).norm());
        }
        let order = min_order(&errs);
        let params = json!({"eps": eps, "errors": errs, "observed_order": order});
        Ok(Measurement::new("so3", params, (1.0 - order).max(0.0), ORDER_SLACK))
    }));

    out.push(Check::new("bundles.develop-roundtrip", s, |_| {
        let phi = flat()?;
        let g = phi.group().clone();
        let x0 = v(&[0.3, -0.2]);
        let d = develop(&phi, &x0, 256)?;
        let shift = g.inv(&f0(&x0)?)?;
        let mut worst = 0.0f64;
        for x in square().probe_grid(5) {
            let expected = g.mul(&f0(&x)?, &shift)?;
            worst = worst.max(g.distance(&d.at(&x)?, &expected)?);
        }
        Ok(Measurement::new("so3", json!({"probe_grid": 5, "steps": 256}), worst, 1e-7))
    }));

    out.push(Check::new("bundles.develop-path-independence", s, |_| {
        let d = develop(&flat()?, &v(&[0.3, -0.2]), 256)?;
        let r = d.path_independence_residual(&square().probe_grid(5))?;
        Ok(Measurement::new("so3", json!({"probe_grid": 5, "steps": 256}), r, 1e-7))
    }));

    out.push(Check::new("bundles.develop-log-derivative", s, |rng| {
        let d = develop(&flat()?, &v(&[0.3, -0.2]), 256)?;
        let r = d.log_derivative_residual(rng, 3, 400)?;
        Ok(Measurement::new("so3", json!({"segments": 3, "samples": 400}), r, 1e-6))
    }));

    // omega = x e1 dy: d omega = e1 dx^dy while [omega, omega] = 0
    out.push(Check::new("bundles.develop-rejects-curved", s, |_| {
        let phi = ConnectionChart::from_exprs(group("so3"), square(), &["0", "x*e1"])?;
        let (residual, detail) = match develop(&phi, &v(&[0.0, 0.0]), 32) {
            Err(Error::NotFlat { residual, .. }) => (0.0, residual),
            Err(e) => return Err(e),
            Ok(_) => (1.0, 0.0),
        };
        let params = json!({"form": "x*e1 dy", "expected": "not-flat", "flatness_residual": detail});
        Ok(Measurement::new("so3", params, residual, 0.0))
    }));
}
