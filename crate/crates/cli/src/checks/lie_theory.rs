use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use regulie_core::lie::quaternion_left_matrix;
use regulie_core::lie::sampling::{random_algebra, random_element};
use regulie_core::lie_theory::*;
use serde_json::json;

use super::group;
use crate::report::Measurement;
use crate::suite::{Check, Suite};

/// Rotation matrix of the unit quaternion `(w, x, y, z)`.
pub fn rotation_of(q: [f64; 4]) -> DMatrix<f64> {
    let [w, x, y, z] = q;
    DMatrix::from_row_slice(
        3,
        3,
        &[
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    )
}

/// Uniformly distributed unit quaternion (rejection from the 4-ball).
pub fn random_quaternion<R: Rng + ?Sized>(rng: &mut R) -> [f64; 4] {
    loop {
        let q: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return q.map(|v| v / n);
        }
    }
}

/// The integrated identity `su(2) -> so(3)`.
pub fn double_cover(steps: usize) -> regulie_core::Result<IntegratedHom> {
    integrate(&AlgebraHom::new(group("su2"), group("so3"), DMatrix::identity(3, 3))?, steps)
}

fn cover_pairs(rng: &mut ChaCha8Rng, n: usize) -> Vec<(regulie_core::GroupElement, regulie_core::GroupElement)> {
    let su2 = group("su2");
    (0..n)
        .map(|_| (random_element(&su2, rng, 6.0), random_element(&su2, rng, 6.0)))
        .collect()
}

pub fn register(out: &mut Vec<Check>) {
    let s = Suite::LieTheory;

    out.push(Check::new("lie-theory.double-cover", s, |rng| {
        let (su2, f) = (group("su2"), double_cover(64)?);
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let q = random_quaternion(rng);
            let img = f.apply(&su2.element(quaternion_left_matrix(q))?)?;
            worst = worst.max((img.value() - rotation_of(q)).norm());
        }
        Ok(Measurement::new("su2->so3", json!({"samples": 100, "steps": 64}), worst, 1e-7))
    }));

    out.push(Check::new("lie-theory.homomorphism", s, |rng| {
        let r = double_cover(64)?.homomorphism_residual(&cover_pairs(rng, 30))?;
        Ok(Measurement::new("su2->so3", json!({"pairs": 30, "max_norm": 6.0, "steps": 64}), r, 1e-7))
    }));

    out.push(Check::new("lie-theory.exp-naturality", s, |rng| {
        let su2 = group("su2");
        let xs: Vec<_> = (0..20).map(|_| random_algebra(&su2, rng, 3.0)).collect();
        let r = double_cover(64)?.exp_naturality_residual(&xs)?;
        Ok(Measurement::new("su2->so3", json!({"samples": 20, "max_norm": 3.0}), r, 1e-8))
    }));

    out.push(Check::new("lie-theory.tangent", s, |_| {
        let r = double_cover(64)?.tangent_residual(1e-5)?;
        Ok(Measurement::new("su2->so3", json!({"eps": 1e-5}), r, 1e-5))
    }));

    out.push(Check::new("lie-theory.path-families", s, |rng| {
        let (su2, f) = (group("su2"), double_cover(64)?);
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let g = random_element(&su2, rng, 4.0);
            let radial = f.apply(&g)?;
            let stair = f.apply_staircase(&g, &random_algebra(&su2, rng, 1.0))?;
            let wiggle = f.apply_wiggle(&g, &random_algebra(&su2, rng, 0.7))?;
            worst = worst
                .max((radial.value() - stair.value()).norm())
                .max((radial.value() - wiggle.value()).norm());
        }
        Ok(Measurement::new("su2->so3", json!({"samples": 10}), worst, 1e-7))
    }));

    out.push(Check::new("lie-theory.heis3-scaling", s, |rng| {
        let heis = group("heis3");
        let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![a, b, a * b]));
        let f = integrate(&AlgebraHom::new(heis.clone(), heis.clone(), m)?, 32)?;
        let pairs: Vec<_> = (0..10)
            .map(|_| (random_element(&heis, rng, 2.0), random_element(&heis, rng, 2.0)))
            .collect();
        let r = f.homomorphism_residual(&pairs)?;
        Ok(Measurement::new("heis3", json!({"scale": [a, b], "pairs": 10}), r, 1e-10))
    }));
}
