use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regulie_core::curves::{
    discrete_log_derivative, leibniz_residual, log_derivative_at, random_curve, Smoothness,
};
use regulie_core::lie::catalog;
use regulie_core::*;

fn groups() -> Vec<Group> {
    ["so3", "su2", "se3", "sl2", "gl2plus", "heis3", "r:2"]
        .iter()
        .map(|n| catalog::lookup(n).unwrap())
        .collect()
}

/// `t -> exp(a(t))` for a random smooth algebra curve `a`.
fn random_path(g: &Group, rng: &mut ChaCha8Rng) -> impl Fn(f64) -> Result<DMatrix<f64>> + Clone {
    let a = random_curve(g, rng, 1.0);
    let g = g.clone();
    move |t| Ok(g.exp(&a.eval(t)?)?.into_value())
}

#[test]
fn constant_path_has_zero_log_derivative() {
    let g = catalog::so3();
    let p = GroupPath::sample(g.clone(), 50, |_| g.exp(&g.algebra_from(&[0.3, 0.1, -0.2]).unwrap())).unwrap();
    for side in [Side::Left, Side::Right] {
        let d = discrete_log_derivative(&p, side).unwrap();
        assert_eq!(d.hint(), Smoothness::SplineOfSamples);
        for t in [0.0, 0.37, 1.0] {
            assert!(d.eval(t).unwrap().norm() < 1e-14);
        }
    }
}

#[test]
fn one_parameter_subgroup_has_constant_log_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in groups() {
        let x = regulie_core::lie::sampling::random_algebra(&g, &mut rng, 1.0);
        let p = GroupPath::sample(g.clone(), 1000, |t| g.exp(&x.scaled(t))).unwrap();
        for side in [Side::Left, Side::Right] {
            let d = discrete_log_derivative(&p, side).unwrap();
            for t in [0.0, 0.25, 0.5, 0.999, 1.0] {
                let err = (d.coeffs_at(t).unwrap() - x.coeffs()).norm();
                assert!(err <= 1e-8, "{} {side:?} t={t}: {err:e}", g.name());
            }
        }
    }
}

#[test]
fn log_derivative_of_inverse_path() {
    // d^l(p^-1) = -d^r p
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for g in groups() {
        let p = random_path(&g, &mut rng);
        let pinv = |t: f64| g.inv(&g.element(p(t)?)?).map(|e| e.into_value());
        for t in [0.1, 0.5, 0.9] {
            let l = log_derivative_at(&g, pinv, t, 1e-4, Side::Left).unwrap();
            let r = log_derivative_at(&g, &p, t, 1e-4, Side::Right).unwrap();
            assert!((l + r).norm() <= 1e-7, "{}", g.name());
        }
    }
}

#[test]
fn large_steps_are_reported_with_their_interval() {
    // each step is a full turn in SU(2), landing on -1
    let g = catalog::su2();
    let x = g.algebra_from(&[0.0, 0.0, 8.0 * std::f64::consts::PI]).unwrap();
    let p = GroupPath::sample(g.clone(), 4, |t| g.exp(&x.scaled(t))).unwrap();
    match discrete_log_derivative(&p, Side::Right) {
        Err(Error::StepTooLarge { t0, t1, .. }) => assert_eq!((t0, t1), (0.0, 0.25)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn round_trip_through_evolve_is_second_order() {
    let g = catalog::so3();
    let x = AlgebraCurve::from_expr(g.clone(), "sin(t)*e1 + cos(2*t)*e2 + t*e3").unwrap();
    let sup_err = |n: usize| {
        let run = evolve(&x, Side::Right, n).unwrap();
        let d = discrete_log_derivative(&run.path, Side::Right).unwrap();
        d.sup_distance(&x, 500).unwrap()
    };
    let (e1, e2) = (sup_err(100), sup_err(200));
    let ratio = e1 / e2;
    assert!(ratio > 3.5 && ratio < 4.5, "{e1:e} {e2:e}");
}

#[test]
fn leibniz_rule_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let ts: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
    for g in groups() {
        for _ in 0..10 {
            let f = random_path(&g, &mut rng);
            let h = random_path(&g, &mut rng);
            let r = leibniz_residual(&g, f, h, &ts, 1e-4).unwrap();
            assert!(r <= 1e-6, "{}: {r:e}", g.name());
        }
    }
}

#[test]
fn spline_curves_reproduce_nodes() {
    let g = catalog::so3();
    let knots: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    let vals: Vec<DVector<f64>> = knots.iter().map(|t| DVector::from_vec(vec![*t, t * t, t.cos()])).collect();
    let c = AlgebraCurve::from_samples(g.clone(), knots.clone(), vals.clone()).unwrap();
    for (t, v) in knots.iter().zip(&vals) {
        assert_eq!(&c.coeffs_at(*t).unwrap(), v);
    }
}

#[test]
fn curve_expressions_are_checked() {
    let g = catalog::so3();
    assert!(AlgebraCurve::from_expr(g.clone(), "e4").is_err());
    assert!(AlgebraCurve::from_expr(g.clone(), "x*e1").is_err());
    assert!(AlgebraCurve::from_expr(g.clone(), "sin(t)").is_err());
    let c = AlgebraCurve::from_expr(g.clone(), "0").unwrap();
    assert_eq!(c.coeffs_at(0.5).unwrap(), DVector::zeros(3));
    let i = AlgebraCurve::from_expr(g, "t*e2").unwrap().integral(0.0, 1.0).unwrap();
    assert!((i - DVector::from_vec(vec![0.0, 0.5, 0.0])).norm() < 1e-15);
}

#[test]
fn base_paths_have_consistent_velocities() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let a = DVector::from_vec(vec![0.1, 0.2]);
    let b = DVector::from_vec(vec![0.7, -0.4]);
    let seg = PathInBase::segment(a.clone(), b.clone());
    let circle = PathInBase::new(2, |t| {
        let th = std::f64::consts::TAU * t;
        DVector::from_vec(vec![th.cos(), th.sin()])
    });
    let square = PathInBase::square_loop(&a, 0, 1, 0.3).unwrap();
    let joined = seg.then(&PathInBase::segment(b.clone(), a.clone())).unwrap();
    let paths = [
        seg.clone(),
        circle.clone(),
        square.clone(),
        joined.clone(),
        square.reversed(),
        circle.reparameterized(|t| t * t, |t| 2.0 * t),
    ];
    for p in &paths {
        assert!(p.velocity_consistency(&mut rng, 10) <= 1e-5, "{p:?}");
    }
    assert!(square.closure_gap() <= 1e-15);
    assert!(joined.closure_gap() <= 1e-15);
    assert!(circle.closure_gap() <= 1e-12);
    assert!(seg.then(&seg).is_err());
}
