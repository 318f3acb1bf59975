use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regulie_core::curves::{quadrature_scalar, random_curve, DEFAULT_PANELS};
use regulie_core::evolution::*;
use regulie_core::lie::catalog;
use regulie_core::lie::sampling::random_algebra;
use regulie_core::lie::Constraint;
use regulie_core::*;

fn test_curve(g: &Group) -> AlgebraCurve {
    AlgebraCurve::from_expr(g.clone(), "sin(t)*e1 + cos(2*t)*e2 + t*e3").unwrap()
}

/// Rotation matrix of the unit quaternion `(w, x, y, z)`.
fn rotation_of(q: &[f64]) -> DMatrix<f64> {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
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

#[test]
fn zero_curve_gives_identity_path() {
    for g in [catalog::so3(), catalog::sl2(), catalog::torus(2)] {
        let run = evolve(&AlgebraCurve::zero(g.clone()), Side::Right, 64).unwrap();
        let e = g.identity();
        assert!(run.path.values().iter().all(|v| v == e.value()));
        assert_eq!(run.path.times()[0], 0.0);
        assert_eq!(run.path.times()[64], 1.0);
        assert_eq!(run.endpoint.value(), &run.path.values()[64]);
    }
}

#[test]
fn constant_curve_gives_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for g in [catalog::so3(), catalog::su2(), catalog::se3(), catalog::sl2(), catalog::heis3()] {
        let x = random_algebra(&g, &mut rng, 1.0);
        let x = x.scaled(1.0 / x.norm());
        let want = g.exp(&x).unwrap();
        for side in [Side::Right, Side::Left] {
            let run = evolve(&AlgebraCurve::constant(g.clone(), &x), side, 1024).unwrap();
            assert!(g.distance(&run.endpoint, &want).unwrap() <= 1e-10, "{}", g.name());
            let mid = run.at(0.3).unwrap();
            assert!(g.distance(&mid, &g.exp(&x.scaled(0.3)).unwrap()).unwrap() <= 1e-10);
        }
    }
}

#[test]
fn commuting_family_integrates_the_scalar() {
    let g = catalog::so3();
    let x0 = g.algebra_from(&[0.2, -0.5, 0.7]).unwrap();
    let a = |t: f64| (3.0 * t).cos() + t * t;
    let c = x0.coeffs().clone();
    let curve = AlgebraCurve::new(g.clone(), move |t| &c * a(t));
    let total = quadrature_scalar(a, 0.0, 1.0, DEFAULT_PANELS).unwrap();
    let run = evolve(&curve, Side::Right, 1024).unwrap();
    let want = g.exp(&x0.scaled(total)).unwrap();
    assert!(g.distance(&run.endpoint, &want).unwrap() <= 1e-9);
}

#[test]
fn abelian_evolution_is_the_integral() {
    let g = catalog::vector(3);
    let x = AlgebraCurve::from_expr(g.clone(), "sin(t)*e1 + t^3*e2 - exp(t)*e3").unwrap();
    let run = evolve(&x, Side::Right, 256).unwrap();
    let want = DVector::from_vec(vec![1.0 - 1f64.cos(), 0.25, -(1f64.exp() - 1.0)]);
    let got = DVector::from_column_slice(run.endpoint.value().as_slice());
    assert!((got - want).norm() <= 1e-12);

    let t = catalog::torus(2);
    let x = AlgebraCurve::from_expr(t.clone(), "3*e1 - 0.25*e2").unwrap();
    let run = evolve(&x, Side::Left, 16).unwrap();
    let v = run.endpoint.value();
    assert!(v[(0, 0)].abs() < 1e-12 || (1.0 - v[(0, 0)]).abs() < 1e-12);
    assert!((v[(1, 0)] - 0.75).abs() < 1e-12);
}

#[test]
fn order_four_in_the_truncation_regime() {
    let g = catalog::so3();
    let x = test_curve(&g);
    let reference = evolve(&x, Side::Right, 1 << 12).unwrap().endpoint;
    let errs: Vec<f64> = [16, 32, 64, 128, 256]
        .iter()
        .map(|n| g.distance(&evolve(&x, Side::Right, *n).unwrap().endpoint, &reference).unwrap())
        .collect();
    for w in errs.windows(2) {
        let r = w[0] / w[1];
        assert!((14.0..=18.0).contains(&r), "{errs:?}");
    }
}

#[test]
fn steppers_of_different_order_converge_to_the_same_endpoint() {
    let g = catalog::so3();
    let x = test_curve(&g);
    let diff = |n: usize| {
        let a = evolve_with(&x, Side::Right, n, Scheme::CommutatorFree4).unwrap().endpoint;
        let b = evolve_with(&x, Side::Right, n, Scheme::ExponentialMidpoint).unwrap().endpoint;
        g.distance(&a, &b).unwrap()
    };
    let ds: Vec<f64> = [64, 128, 256, 512].iter().map(|n| diff(*n)).collect();
    for w in ds.windows(2) {
        let r = w[0] / w[1];
        assert!(r > 3.5 && r < 4.5, "{ds:?}");
    }
    assert!(ds[3] < 1e-6);
}

#[test]
fn constraint_drift_stays_at_rounding_level() {
    let g = catalog::so3();
    let run = evolve(&test_curve(&g), Side::Right, 4096).unwrap();
    let res: Vec<f64> = run.path.values().iter().map(|v| g.constraint_residual(v)).collect();
    for w in res.windows(2) {
        assert!((w[1] - w[0]).abs() <= 1e-12);
    }
    assert!(run.stats.max_drift <= 1e-12);
}

#[test]
fn double_cover_is_natural_for_evolution() {
    let (su2, so3) = (catalog::su2(), catalog::so3());
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..5 {
        let x = random_curve(&su2, &mut rng, 2.0);
        let y = x.mapped(so3.clone(), &DMatrix::identity(3, 3)).unwrap();
        let q = evolve(&x, Side::Right, 512).unwrap().endpoint;
        let r = evolve(&y, Side::Right, 512).unwrap().endpoint;
        let col: Vec<f64> = q.value().column(0).iter().copied().collect();
        assert!((rotation_of(&col) - r.value()).norm() <= 1e-8);
    }
}

#[test]
fn broken_groups_and_curves_are_reported() {
    // a "group" whose algebra leaves its constraint set
    let bad = GroupSpec::matrix(
        "bad",
        vec![DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 0.0, 0.0]))],
        Constraint::SpecialOrthogonal,
    )
    .unwrap()
    .into_group();
    let x = AlgebraCurve::from_expr(bad.clone(), "e1").unwrap();
    assert!(matches!(evolve(&x, Side::Right, 8), Err(Error::Integrity { .. })));

    let g = catalog::so3();
    let nan = AlgebraCurve::new(g.clone(), |t| DVector::from_element(3, if t > 0.5 { f64::NAN } else { 0.0 }));
    assert!(matches!(evolve(&nan, Side::Right, 8), Err(Error::Numeric(_))));
    assert!(evolve(&nan, Side::Right, 0).is_err());
}

#[test]
fn inversion_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for g in [catalog::so3(), catalog::sl2()] {
        assert_eq!(inverse_identity_residual(&AlgebraCurve::zero(g.clone()), 1024).unwrap(), 0.0);
        for _ in 0..20 {
            let x = random_curve(&g, &mut rng, 1.0);
            let r = inverse_identity_residual(&x, 1024).unwrap();
            assert!(r <= 1e-8, "{}: {r:e}", g.name());
        }
    }
    let a = catalog::vector(2);
    let x = random_curve(&a, &mut rng, 1.0);
    let l = evolve(&x, Side::Left, 64).unwrap().endpoint;
    let r = evolve(&x, Side::Right, 64).unwrap().endpoint;
    assert_eq!(l, r);
}

#[test]
fn reparameterization_identity() {
    let g = catalog::so3();
    let x = test_curve(&g);
    let ts = [0.2, 0.5, 0.8, 1.0];
    let id = reparameterization_residual(&x, |t| t, |_| 1.0, &ts, 2048).unwrap();
    assert!(id <= 1e-9);
    let sq = reparameterization_residual(&x, |t| t * t, |t| 2.0 * t, &ts, 2048).unwrap();
    assert!(sq <= 1e-7, "{sq:e}");
    let shifted = reparameterization_residual(&x, |t| 0.2 + 0.5 * t, |_| 0.5, &ts, 2048).unwrap();
    assert!(shifted <= 1e-7, "{shifted:e}");
    let c = reparameterization_residual(&x, |_| 0.4, |_| 0.0, &ts, 2048).unwrap();
    assert!(c <= 1e-12);
}

#[test]
fn maurer_cartan_defects() {
    let g = catalog::so3();
    let pts = cell_centres(4);
    let x = g.algebra_from(&[0.3, -0.2, 0.9]).unwrap();
    let y = g.algebra_from(&[-0.5, 0.4, 0.1]).unwrap();
    let line = |t: f64, s: f64| Ok(g.exp(&x.scaled(t + s))?.into_value());
    let prod = |t: f64, s: f64| Ok(g.mul(&g.exp(&x.scaled(t))?, &g.exp(&y.scaled(s))?)?.into_value());
    for side in [Side::Right, Side::Left] {
        assert!(maurer_cartan_residual(&g, line, side, 1e-3, &pts).unwrap() <= 1e-6);
        let r = maurer_cartan_residual(&g, prod, side, 1e-3, &pts).unwrap();
        assert!(r <= 1e-5, "{r:e}");
    }

    let a = catalog::vector(2);
    let ab = |t: f64, s: f64| Ok(DMatrix::from_column_slice(2, 1, &[(t * s).sin(), t * t * s]));
    assert!(maurer_cartan_residual(&a, ab, Side::Right, 1e-3, &pts).unwrap() <= 1e-9);
}

#[test]
fn maurer_cartan_of_an_evolution_family_decays_quadratically() {
    let g = catalog::so3();
    let x = test_curve(&g);
    let y = AlgebraCurve::from_expr(g.clone(), "cos(t)*e3 - t^2*e1").unwrap();
    let pts = cell_centres(3);
    let map = |t: f64, s: f64| Ok(evol_at(&x.plus(&y.scaled(s))?, Side::Right, t, 256)?.into_value());
    let r2 = maurer_cartan_residual(&g, map, Side::Right, 1e-2, &pts).unwrap();
    let r3 = maurer_cartan_residual(&g, map, Side::Right, 1e-3, &pts).unwrap();
    let order = (r2 / r3).log10();
    assert!(order > 1.8 && order < 2.2, "{r2:e} {r3:e}");
}

#[test]
fn tangent_of_evolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let g = catalog::so3();
    let x = random_curve(&g, &mut rng, 1.0);
    let zero = AlgebraCurve::zero(g.clone());
    assert_eq!(tangent_evol(&x, &zero, 256).unwrap().right.norm(), 0.0);

    let y = random_curve(&g, &mut rng, 1.0);
    let flat = tangent_evol(&zero, &y, 256).unwrap();
    assert!((flat.left.coeffs() - y.integral(0.0, 1.0).unwrap()).norm() < 1e-14);

    for g in [catalog::so3(), catalog::sl2(), catalog::se3(), catalog::heis3()] {
        for _ in 0..5 {
            let x = random_curve(&g, &mut rng, 1.0);
            let y = random_curve(&g, &mut rng, 1.0);
            for t in [0.25, 0.5, 1.0] {
                let tan = tangent_evol_at(&x, &y, t, 1024).unwrap();
                let fd = tangent_evol_fd(&x, &y, t, 1e-5, 1024).unwrap();
                let rel = (tan.right.coeffs() - &fd).norm() / fd.norm();
                assert!(rel <= 1e-5, "{} t={t}: {rel:e}", g.name());
            }
        }
    }
}

#[test]
fn derivative_of_exp() {
    let g = catalog::so3();
    let y = g.basis_element(0);
    let d0 = dexp(&g, &g.zero_algebra(), &y).unwrap();
    assert!((d0.series - y.coeffs()).norm() == 0.0);
    assert!((d0.integral - y.coeffs()).norm() < 1e-13);
    let x = g.algebra_from(&[1.0, 2.0, -0.5]).unwrap();
    let along = dexp(&g, &x, &x.scaled(0.3)).unwrap();
    assert!((along.series - x.coeffs() * 0.3).norm() < 1e-15);

    // X = theta e3, Y = e1: int_0^1 R_z(t theta) e1 dt by hand
    let theta = 1.3;
    let d = dexp(&g, &g.basis_element(2).scaled(theta), &y).unwrap();
    let hand = DVector::from_vec(vec![theta.sin() / theta, (1.0 - theta.cos()) / theta, 0.0]);
    assert!((&d.integral - &hand).norm() <= 1e-13);
    assert!((&d.series - &hand).norm() <= 1e-12);
    let fd = dexp_fd(&g, &g.basis_element(2).scaled(theta), &y, 1e-5).unwrap();
    assert!((fd - &hand).norm() / hand.norm() <= 1e-6);
    // left trivialization is the Ad(exp(-X)) image
    let back = g.adjoint(&g.exp(&g.basis_element(2).scaled(-theta)).unwrap()).unwrap() * &d.integral;
    assert!((back - d.left).norm() <= 1e-13);
}
