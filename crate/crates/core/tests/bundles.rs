use std::sync::Arc;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regulie_core::bundles::*;
use regulie_core::curves::quadrature_scalar;
use regulie_core::lie::catalog;
use regulie_core::lie::sampling::{random_algebra, random_element};
use regulie_core::*;

fn v(xs: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(xs)
}

fn square() -> BoxDomain {
    BoxDomain::cube(2, -1.0, 1.0).unwrap()
}

/// A generic non-flat so(3) connection on the square.
fn sample_connection() -> ConnectionChart {
    ConnectionChart::from_exprs(catalog::so3(), square(), &["x*y*e1 + sin(x)*e2", "cos(y)*e3 + x*e1 - 0.5*e2"]).unwrap()
}

#[test]
fn connection_eval_reads_coefficients() {
    let g = catalog::so3();
    let conn = ConnectionChart::from_exprs(g.clone(), square(), &["0.3*e1 - e3", "0"]).unwrap();
    let x = v(&[0.2, -0.4]);
    assert_eq!(conn.eval(&x, &v(&[0.0, 0.0])).unwrap().norm(), 0.0);
    assert_eq!(conn.eval(&x, &v(&[1.0, 0.0])).unwrap().coeffs(), &v(&[0.3, 0.0, -1.0]));
    let sc = sample_connection();
    let (a, b) = (v(&[0.7, -1.1]), v(&[0.2, 0.5]));
    let lhs = sc.eval(&x, &(&a * 2.0 + &b)).unwrap();
    let rhs = sc.eval(&x, &a).unwrap().scaled(2.0).plus(&sc.eval(&x, &b).unwrap()).unwrap();
    assert!(lhs.minus(&rhs).unwrap().norm() < 1e-15);
    assert!(matches!(sc.eval(&v(&[1.5, 0.0]), &a), Err(Error::Domain(_))));
}

#[test]
fn bundle_form_reproduces_fundamental_fields() {
    let conn = sample_connection();
    let g = conn.group().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let h = random_element(&g, &mut rng, 2.0);
        let z = random_algebra(&g, &mut rng, 1.0);
        let w = conn.bundle_form(&v(&[0.1, 0.3]), &v(&[0.0, 0.0]), &h, &z).unwrap();
        assert!(w.minus(&z).unwrap().norm() < 1e-15);
    }
}

#[test]
fn curvature_examples() {
    let t2 = catalog::torus(2);
    let flat = ConnectionChart::from_exprs(t2.clone(), square(), &["0.4*e1", "e2"]).unwrap();
    assert_eq!(flat.curvature(&v(&[0.1, 0.2]), 0, 1).unwrap().norm(), 0.0);

    let r1 = catalog::vector(1);
    let xdy = ConnectionChart::from_exprs(r1.clone(), square(), &["0", "x*e1"]).unwrap();
    assert!((xdy.curvature(&v(&[0.3, -0.2]), 0, 1).unwrap().coeffs()[0] - 1.0).abs() < 1e-15);

    let g = catalog::so3();
    let (ax, ay) = (v(&[0.2, 1.0, -0.3]), v(&[0.5, -0.1, 0.7]));
    let c = ConnectionChart::constant(g.clone(), square(), vec![ax.clone(), ay.clone()]).unwrap();
    let f = c.curvature(&v(&[0.0, 0.0]), 0, 1).unwrap();
    let br = g.bracket(&g.algebra(ax).unwrap(), &g.algebra(ay).unwrap()).unwrap();
    assert!(f.minus(&br).unwrap().norm() < 1e-15);
}

#[test]
fn curvature_by_differences_matches_symbolic() {
    let conn = sample_connection();
    let (c0, c1) = (conn.clone(), conn.clone());
    let fd = ConnectionChart::new(
        conn.group().clone(),
        square(),
        vec![
            Arc::new(move |x: &DVector<f64>| c0.coefficient(0, x)),
            Arc::new(move |x: &DVector<f64>| c1.coefficient(1, x)),
        ],
    )
    .unwrap();
    assert!(!fd.has_analytic_partials());
    for p in [v(&[0.1, 0.2]), v(&[-0.7, 0.5]), v(&[0.9, -0.9])] {
        let a = conn.curvature(&p, 0, 1).unwrap();
        let b = fd.curvature(&p, 0, 1).unwrap();
        assert!(a.minus(&b).unwrap().norm() < 1e-8);
        let back = conn.curvature(&p, 1, 0).unwrap();
        assert!(a.plus(&back).unwrap().norm() < 1e-15);
    }
    assert!(matches!(fd.curvature(&v(&[1.0, 0.0]), 0, 1), Err(Error::Domain(_))));
}

#[test]
fn transport_trivial_cases() {
    let g = catalog::so3();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g0 = random_element(&g, &mut rng, 2.0);
    let zero = ConnectionChart::from_exprs(g.clone(), square(), &["0", "0"]).unwrap();
    let c = PathInBase::polygon(vec![v(&[0.0, 0.0]), v(&[0.5, 0.2]), v(&[-0.3, 0.9])]).unwrap();
    let tr = parallel_transport(&zero, &c, &g0, 64).unwrap();
    assert!(tr.path.values().iter().all(|m| m == g0.value()));

    let conn = sample_connection();
    let tr = parallel_transport(&conn, &PathInBase::constant(v(&[0.2, 0.1])), &g0, 64).unwrap();
    assert!(tr.path.values().iter().all(|m| (m - g0.value()).norm() == 0.0));
}

#[test]
fn transport_along_segment_closed_form() {
    let g = catalog::so3();
    let x0 = g.algebra_from(&[0.4, -0.9, 0.2]).unwrap();
    let conn = ConnectionChart::from_exprs(g.clone(), square(), &["0.4*e1 - 0.9*e2 + 0.2*e3", "0"]).unwrap();
    let g0 = random_element(&g, &mut ChaCha8Rng::seed_from_u64(3), 2.0);
    let (a, b) = (v(&[-0.8, 0.3]), v(&[0.6, -0.5]));
    let tr = parallel_transport(&conn, &PathInBase::segment(a.clone(), b.clone()), &g0, 256).unwrap();
    for (t, m) in tr.path.times().iter().zip(tr.path.values()) {
        let dx = (b[0] - a[0]) * t;
        let expected = g.mul(&g.exp(&x0.scaled(-dx)).unwrap(), &g0).unwrap();
        assert!((m - expected.value()).norm() < 1e-12);
    }
}

#[test]
fn transport_reports_leaving_the_domain() {
    let conn = sample_connection();
    let c = PathInBase::segment(v(&[0.0, 0.0]), v(&[2.0, 0.0]));
    match parallel_transport(&conn, &c, &conn.group().identity(), 16) {
        Err(Error::Domain(msg)) => assert!(msg.contains("t = "), "{msg}"),
        other => panic!("expected a domain error, got {other:?}"),
    }
}

#[test]
fn transport_is_horizontal() {
    let conn = sample_connection();
    let c = PathInBase::polygon(vec![v(&[-0.5, -0.5]), v(&[0.7, -0.2]), v(&[0.1, 0.8])]).unwrap();
    let g0 = random_element(conn.group(), &mut ChaCha8Rng::seed_from_u64(4), 2.0);
    let tr = parallel_transport(&conn, &c, &g0, 1024).unwrap();
    assert!(horizontality_residual(&conn, &c, &tr, 40, 1e-5).unwrap() <= 1e-7);
}

#[test]
fn transport_equivariance_and_reparameterization() {
    let conn = sample_connection();
    let g = conn.group().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = PathInBase::polygon(vec![v(&[0.9, -0.5]), v(&[-0.2, 0.4]), v(&[0.3, 0.9])]).unwrap();
    let g0 = random_element(&g, &mut rng, 2.0);
    assert_eq!(transport_equivariance_residual(&conn, &c, &g0, &g.identity(), 128).unwrap(), 0.0);
    for _ in 0..5 {
        let h = random_element(&g, &mut rng, 3.0);
        assert!(transport_equivariance_residual(&conn, &c, &g0, &h, 256).unwrap() <= 1e-9);
    }
    let r = transport_reparameterization_residual(&conn, &c, &g0, |t| t * t, |t| 2.0 * t, 1024).unwrap();
    assert!(r <= 1e-7, "{r}");
}

#[test]
fn exact_abelian_form_has_trivial_holonomy() {
    // omega = d(x^2 y + sin y)
    let conn = ConnectionChart::from_exprs(catalog::vector(1), square(), &["2*x*y*e1", "(x^2 + cos(y))*e1"]).unwrap();
    let lp = PathInBase::polygon(vec![
        v(&[-0.5, -0.5]),
        v(&[0.8, -0.3]),
        v(&[0.2, 0.9]),
        v(&[-0.7, 0.4]),
        v(&[-0.5, -0.5]),
    ])
    .unwrap();
    let rec = holonomy(&conn, &lp, &conn.group().identity(), 1024).unwrap();
    assert!(rec.holonomy_element.value().norm() < 1e-10);
}

#[test]
fn abelian_holonomy_is_minus_the_curvature_integral() {
    let dom = BoxDomain::cube(2, -0.5, 1.5).unwrap();
    let conn = ConnectionChart::from_exprs(catalog::vector(1), dom, &["(x*y + sin(y))*e1", "x^2*y*e1"]).unwrap();
    // d omega = 2xy - x - cos y, integrated over the unit square
    let flux = quadrature_scalar(
        |x| quadrature_scalar(|y| 2.0 * x * y - x - y.cos(), 0.0, 1.0, 8).unwrap(),
        0.0,
        1.0,
        8,
    )
    .unwrap();
    assert!((flux + 1f64.sin()).abs() < 1e-14);
    let lp = PathInBase::square_loop(&v(&[0.0, 0.0]), 0, 1, 1.0).unwrap();
    let rec = holonomy(&conn, &lp, &conn.group().identity(), 1024).unwrap();
    assert!((rec.holonomy_element.value()[(0, 0)] + flux).abs() < 1e-10);
}

#[test]
fn holonomy_conjugation_and_basepoint_laws() {
    let conn = sample_connection();
    let g = conn.group().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let lp = PathInBase::square_loop(&v(&[-0.3, -0.4]), 0, 1, 0.8).unwrap();
    let g0 = random_element(&g, &mut rng, 2.0);
    for _ in 0..3 {
        let h = random_element(&g, &mut rng, 3.0);
        assert!(holonomy_conjugation_residual(&conn, &lp, &g0, &h, 512).unwrap() <= 1e-9);
    }
    let c = PathInBase::polygon(vec![v(&[-0.3, -0.4]), v(&[0.5, -0.8]), v(&[0.6, 0.1])]).unwrap();
    let r = basepoint_invariance_residual(&conn, &lp, &c, &g0, 2048).unwrap();
    assert!(r <= 1e-8, "{r}");
}

#[test]
fn open_loops_are_rejected() {
    let conn = sample_connection();
    let c = PathInBase::segment(v(&[0.0, 0.0]), v(&[0.5, 0.0]));
    assert!(matches!(holonomy(&conn, &c, &conn.group().identity(), 16), Err(Error::OpenLoop { .. })));
}

#[test]
fn small_loops_see_minus_the_curvature() {
    let conn = sample_connection();
    let corner = v(&[0.2, -0.3]);
    let f = conn.curvature(&corner, 0, 1).unwrap().into_coeffs();
    let errs: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&eps| (small_loop_curvature(&conn, &corner, 0, 1, eps, 512).unwrap() + &f).norm())
        .collect();
    for w in errs.windows(2) {
        assert!((w[0] / w[1]).log2() >= 1.0 - 0.05, "{errs:?}");
    }
}

/// `phi = delta^r f0` for `f0(x, y) = exp(x e1) exp(y e2)` on so(3).
fn flat_form() -> ConnectionChart {
    ConnectionChart::from_exprs(catalog::so3(), square(), &["e1", "cos(x)*e2 + sin(x)*e3"]).unwrap()
}

fn f0(x: &DVector<f64>) -> GroupElement {
    let g = catalog::so3();
    let a = g.exp(&g.algebra_from(&[x[0], 0.0, 0.0]).unwrap()).unwrap();
    let b = g.exp(&g.algebra_from(&[0.0, x[1], 0.0]).unwrap()).unwrap();
    g.mul(&a, &b).unwrap()
}

#[test]
fn flat_connection_has_trivial_holonomy() {
    let conn = flat_form().negated();
    for p in square().probe_grid(6) {
        assert!(conn.curvature(&p, 0, 1).unwrap().norm() <= 1e-8);
    }
    let g = conn.group().clone();
    let loops = [
        PathInBase::square_loop(&v(&[-0.9, -0.9]), 0, 1, 1.5).unwrap(),
        PathInBase::polygon(vec![v(&[0.0, 0.0]), v(&[0.9, -0.2]), v(&[-0.4, 0.8]), v(&[0.0, 0.0])]).unwrap(),
    ];
    for lp in &loops {
        let hol = holonomy(&conn, lp, &g.identity(), 1024).unwrap().holonomy_element;
        assert!(g.distance(&hol, &g.identity()).unwrap() <= 1e-6);
    }
}

#[test]
fn develop_trivial_and_abelian() {
    let g = catalog::so3();
    let zero = ConnectionChart::from_exprs(g.clone(), square(), &["0", "0"]).unwrap();
    let d = develop(&zero, &v(&[0.0, 0.0]), 32).unwrap();
    assert_eq!(d.at(&v(&[0.5, -0.5])).unwrap().value(), g.identity().value());

    let t2 = catalog::vector(2);
    let phi = ConnectionChart::from_exprs(t2.clone(), square(), &["y*e1 + e2", "x*e1"]).unwrap();
    let d = develop(&phi, &v(&[0.0, 0.0]), 64).unwrap();
    let x = v(&[0.6, -0.7]);
    // phi = d(xy e1 + x e2)
    let f = d.at(&x).unwrap();
    assert!((f.value()[(0, 0)] - x[0] * x[1]).abs() < 1e-13 && (f.value()[(1, 0)] - x[0]).abs() < 1e-13);
}

#[test]
fn develop_recovers_the_primitive() {
    let phi = flat_form();
    let g = phi.group().clone();
    let x0 = v(&[0.3, -0.2]);
    let d = develop(&phi, &x0, 256).unwrap();
    let shift = g.inv(&f0(&x0)).unwrap();
    let pts = square().probe_grid(5);
    for x in &pts {
        let expected = g.mul(&f0(x), &shift).unwrap();
        assert!(g.distance(&d.at(x).unwrap(), &expected).unwrap() <= 1e-7);
    }
    assert!(d.path_independence_residual(&pts).unwrap() <= 1e-7);
    let r = d.log_derivative_residual(&mut ChaCha8Rng::seed_from_u64(7), 3, 400).unwrap();
    assert!(r <= 1e-6, "{r}");
}

#[test]
fn develop_refuses_curved_forms() {
    match develop(&sample_connection(), &v(&[0.0, 0.0]), 32) {
        Err(Error::NotFlat { residual, point }) => {
            assert!(residual > FLATNESS_TOLERANCE);
            assert_eq!(point.len(), 2);
        }
        other => panic!("expected NotFlat, got {other:?}"),
    }
}
