use nalgebra::DVector;
use regulie_core::constructions::*;
use regulie_core::curves::random_curve;
use regulie_core::evolution::{evolve, tangent_evol};
use regulie_core::lie::catalog;
use regulie_core::{AlgebraCurve, Side};
use serde_json::json;

use super::group;
use crate::report::Measurement;
use crate::suite::{Check, Suite};

pub fn register(out: &mut Vec<Check>) {
    let s = Suite::Constructions;

    out.push(Check::new("constructions.semidirect.se3", s, |rng| {
        let sd = semidirect_group(SemidirectSpec::euclidean())?;
        let so3 = group("so3");
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let u = random_curve(sd.k_group(), rng, 1.5);
            let y = random_curve(&so3, rng, 1.5);
            let factors = evolve_semidirect(&sd, &u, &y, 256)?;
            let direct = evolve(&sd.join_curves(&u, &y)?, Side::Right, 256)?;
            for (a, b) in factors.path.values().iter().zip(direct.path.values()) {
                worst = worst.max((a - b).norm());
            }
        }
        Ok(Measurement::new("se3", json!({"pairs": 10, "steps": 256}), worst, 1e-7))
    }));

    out.push(Check::new("constructions.extension.heis3", s, |rng| {
        let spec = ExtensionSpec::heisenberg();
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let u = random_curve(&catalog::vector(1), rng, 1.5);
            let y = random_curve(&catalog::vector(2), rng, 1.5);
            let a = evolve_extension(&spec, &u, &y, 256)?;
            let b = evolve_extension_chart(&spec, &u, &y, 256)?;
            worst = worst.max(a.sup_distance(&b)?);
        }
        Ok(Measurement::new("heis3", json!({"pairs": 10, "steps": 256, "oracle": "chart-rk4"}), worst, 1e-7))
    }));

    out.push(Check::new("constructions.extension.heis3-matrix", s, |rng| {
        let spec = ExtensionSpec::heisenberg();
        let heis = group("heis3");
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let u = random_curve(&catalog::vector(1), rng, 1.5);
            let y = random_curve(&catalog::vector(2), rng, 1.5);
            let ext = evolve_extension(&spec, &u, &y, 256)?;
            let joined = AlgebraCurve::try_new(heis.clone(), move |t| {
                let (a, b) = (u.coeffs_at(t)?, y.coeffs_at(t)?);
                Ok(DVector::from_vec(vec![b[0], b[1], a[0]]))
            });
            let model = evolve(&joined, Side::Right, 256)?;
            for (e, m) in ext.nodes.iter().zip(model.path.values()) {
                let (x, yy) = (e.h[(0, 0)], e.h[(1, 0)]);
                worst = worst.max((catalog::heis3_element(x, yy, e.k[0] + 0.5 * x * yy) - m).norm());
            }
        }
        Ok(Measurement::new("heis3", json!({"pairs": 10, "steps": 256, "oracle": "matrix-model"}), worst, 1e-7))
    }));

    out.push(Check::new("constructions.cocycle.heis3", s, |_| {
        let spec = ExtensionSpec::heisenberg();
        let r = spec.cocycle_residual(6, 50);
        Ok(Measurement::new("heis3", json!({"samples": 50}), r, 1e-10))
    }));

    for name in ["so3", "sl2", "se3"] {
        out.push(Check::new(format!("constructions.tangent-group.{name}"), s, move |rng| {
            let g = group(name);
            let tg = tangent_group(&g)?;
            let mut worst = 0.0f64;
            for _ in 0..3 {
                let x = random_curve(&g, rng, 1.5);
                let yk = random_curve(tg.k_group(), rng, 1.0);
                let run = evolve_semidirect(&tg, &yk, &x, 256)?;
                let (first, _) = tg.split(&run.endpoint)?;
                let y = AlgebraCurve::try_new(g.clone(), move |t| yk.coeffs_at(t));
                let te = tangent_evol(&x, &y, 256)?;
                worst = worst.max((first - te.right.coeffs()).norm());
            }
            Ok(Measurement::new(name, json!({"pairs": 3, "steps": 256}), worst, 1e-7))
        }));
    }

    for name in ["so3", "sl2"] {
        out.push(Check::new(format!("constructions.conv-homomorphism.{name}"), s, move |rng| {
            let g = group(name);
            let x = ConvolutionElement::new(random_curve(&g, rng, 1.5), 256)?;
            let y = ConvolutionElement::new(random_curve(&g, rng, 1.5), 256)?;
            let xy = conv_mul(&x, &y)?;
            let mut worst = 0.0f64;
            for i in 0..=16 {
                let t = i as f64 / 16.0;
                let rhs = g.mul(&x.evol.at(t)?, &y.evol.at(t)?)?;
                worst = worst.max((xy.evol.at(t)?.value() - rhs.value()).norm());
            }
            Ok(Measurement::new(name, json!({"steps": 256, "samples": 17}), worst, 1e-7))
        }));
    }

    out.push(Check::new("constructions.conv-associativity.so3", s, |rng| {
        let g = group("so3");
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let mut draw = || ConvolutionElement::new(random_curve(&g, rng, 1.5), 256);
            let (x, y, z) = (draw()?, draw()?, draw()?);
            let left = conv_mul(&conv_mul(&x, &y)?, &z)?;
            let right = conv_mul(&x, &conv_mul(&y, &z)?)?;
            worst = worst.max(left.curve.sup_distance(&right.curve, 64)?);
        }
        Ok(Measurement::new("so3", json!({"triples": 3, "steps": 256}), worst, 1e-7))
    }));

    out.push(Check::new("constructions.conv-evolve-ode.so3", s, |_| {
        let field = ConvField::from_expr(group("so3"), "sin(t*s)*e1 + 2*sin(t*s)*e2 + 3*sin(t*s)*e3 - 0.3*s*cos(t)*e1 + 0.3*(1 - s)*cos(t)*e2 + 0.3*(2 - s)*cos(t)*e3")?;
        let r = conv_ode_residual(&field, 32, 1e-4, 64)?;
        Ok(Measurement::new("so3", json!({"grid": [32, 32], "h": 1e-4, "steps": 64}), r, 1e-6))
    }));
}
