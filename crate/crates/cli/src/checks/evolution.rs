use nalgebra::DMatrix;
use regulie_core::curves::{leibniz_residual, random_curve};
use regulie_core::evolution::*;
use regulie_core::lie::sampling::random_algebra;
use regulie_core::{AlgebraCurve, Side};
use serde_json::json;

use super::{group, random_path, ratio_deviation, CATALOG};
use crate::report::Measurement;
use crate::suite::{Check, Suite};

const ORDER_CURVE: &str = "sin(t)*e1 + cos(2*t)*e2 + t*e3";

pub fn register(out: &mut Vec<Check>) {
    let s = Suite::Evolution;

    // truncation-dominated range; beyond N ~ 512 the error is at rounding level
    out.push(Check::new("evolution.order", s, |_| {
        let g = group("so3");
        let x = AlgebraCurve::from_expr(g.clone(), ORDER_CURVE)?;
        let ns = [16usize, 32, 64, 128, 256];
        let reference = evolve(&x, Side::Right, 1 << 12)?.endpoint;
        let mut errs = Vec::new();
        for n in ns {
            errs.push(g.distance(&evolve(&x, Side::Right, n)?.endpoint, &reference)?);
        }
        let params = json!({"curve": ORDER_CURVE, "n": ns, "reference_n": 1 << 12, "errors": errs, "target_ratio": 16});
        Ok(Measurement::new("so3", params, ratio_deviation(&errs, 16.0), 2.0))
    }));

    for name in ["so3", "sl2"] {
        out.push(Check::new(format!("evolution.inversion.{name}"), s, move |rng| {
            let g = group(name);
            let mut worst = 0.0f64;
            for _ in 0..20 {
                worst = worst.max(inverse_identity_residual(&random_curve(&g, rng, 1.0), 1024)?);
            }
            Ok(Measurement::new(name, json!({"curves": 20, "max_norm": 1.0, "steps": 1024}), worst, 1e-8))
        }));
    }

    for name in ["so3", "su2", "se3", "sl2", "gl2plus", "heis3"] {
        out.push(Check::new(format!("evolution.leibniz.{name}"), s, move |rng| {
            let g = group(name);
            let ts: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
            let mut worst = 0.0f64;
            for _ in 0..10 {
                let (f, h) = (random_path(&g, rng), random_path(&g, rng));
                worst = worst.max(leibniz_residual(&g, f, h, &ts, 1e-4)?);
            }
            Ok(Measurement::new(name, json!({"pairs": 10, "h": 1e-4, "samples": ts.len()}), worst, 1e-6))
        }));
    }

    out.push(Check::new("evolution.reparameterization", s, |_| {
        let g = group("so3");
        let x = AlgebraCurve::from_expr(g, ORDER_CURVE)?;
        let r = reparameterization_residual(&x, |t| t * t, |t| 2.0 * t, &[0.2, 0.5, 0.8, 1.0], 2048)?;
        Ok(Measurement::new("so3", json!({"f": "t^2", "steps": 2048}), r, 1e-7))
    }));

    for name in ["so3", "sl2"] {
        out.push(Check::new(format!("evolution.maurer-cartan.{name}"), s, move |rng| {
            let g = group(name);
            let x = random_curve(&g, rng, 1.0);
            let y = random_curve(&g, rng, 1.0);
            let pts = cell_centres(3);
            let map = |t: f64, s: f64| -> regulie_core::Result<DMatrix<f64>> {
                Ok(evol_at(&x.plus(&y.scaled(s))?, Side::Right, t, 256)?.into_value())
            };
            let r2 = maurer_cartan_residual(&g, map, Side::Right, 1e-2, &pts)?;
            let r3 = maurer_cartan_residual(&g, map, Side::Right, 1e-3, &pts)?;
            let order = (r2 / r3).log10();
            let params = json!({"h": [1e-2, 1e-3], "residuals": [r2, r3], "observed_order": order});
            Ok(Measurement::new(name, params, (order - 2.0).abs(), 0.2))
        }));
    }

    for &name in CATALOG {
        out.push(Check::new(format!("evolution.tangent.{name}"), s, move |rng| {
            let g = group(name);
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let x = random_curve(&g, rng, 1.0);
                let y = random_curve(&g, rng, 1.0);
                let tan = tangent_evol_at(&x, &y, 1.0, 256)?;
                let fd = tangent_evol_fd(&x, &y, 1.0, 1e-5, 256)?;
                worst = worst.max((tan.right.coeffs() - &fd).norm() / fd.norm());
            }
            Ok(Measurement::new(name, json!({"pairs": 20, "eps": 1e-5, "steps": 256}), worst, 1e-5))
        }));

        out.push(Check::new(format!("evolution.dexp-series.{name}"), s, move |rng| {
            let g = group(name);
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let (x, y) = (random_algebra(&g, rng, 2.0), random_algebra(&g, rng, 1.0));
                let d = dexp(&g, &x, &y)?;
                worst = worst.max((&d.integral - &d.series).norm() / d.series.norm());
            }
            Ok(Measurement::new(name, json!({"samples": 20, "max_norm": 2.0}), worst, 1e-10))
        }));

        out.push(Check::new(format!("evolution.dexp-fd.{name}"), s, move |rng| {
            let g = group(name);
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let (x, y) = (random_algebra(&g, rng, 2.0), random_algebra(&g, rng, 1.0));
                let d = dexp(&g, &x, &y)?;
                let fd = dexp_fd(&g, &x, &y, 1e-5)?;
                worst = worst.max((&d.integral - &fd).norm() / d.integral.norm());
            }
            Ok(Measurement::new(name, json!({"samples": 20, "max_norm": 2.0, "eps": 1e-5}), worst, 1e-6))
        }));
    }
}
