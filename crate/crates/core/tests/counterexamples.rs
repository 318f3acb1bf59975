use nalgebra::DVector;
use proptest::prelude::*;
use regulie_core::counterexamples::*;

#[test]
fn zero_initial_value_stays_zero() {
    let x0 = TruncatedSeqState::new(DVector::zeros(12)).unwrap();
    let sol = weighted_shift_solve(&x0, &[0.1, 0.5]).unwrap();
    assert!(sol.closed_form.iter().chain(&sol.ode).all(|x| x.norm() == 0.0));
    assert_eq!(sol.max_relative_gap, 0.0);
}

#[test]
fn unit_start_by_hand() {
    let x0 = TruncatedSeqState::unit(6, 0).unwrap();
    for t in [0.1, -0.3, 0.5] {
        let x = weighted_shift_closed_form(&x0, t);
        assert!((x[1] - t).abs() < 1e-15);
        assert!((x[2] - 2.0 * t * t).abs() < 1e-15);
        // x_n = n! t^n
        assert!((x[5] - 120.0 * t.powi(5)).abs() <= 1e-14 * 120.0 * t.abs().powi(5));
    }
}

#[test]
fn closed_form_matches_ode_solve() {
    let mixed: Vec<f64> = (0..=30).map(|i| ((i * 7 % 5) as f64 - 2.0) / (1.0 + i as f64).powi(2)).collect();
    let starts = [
        TruncatedSeqState::unit(30, 0).unwrap(),
        TruncatedSeqState::unit(30, 4).unwrap(),
        TruncatedSeqState::new(DVector::from_vec(mixed)).unwrap(),
    ];
    for x0 in &starts {
        let sol = weighted_shift_solve(x0, &[-0.5, -0.1, 0.05, 0.3, 0.5]).unwrap();
        assert!(sol.max_relative_gap <= 1e-9, "{}", sol.max_relative_gap);
    }
}

#[test]
fn log_space_survives_large_truncations() {
    let x0 = TruncatedSeqState::unit(60, 0).unwrap();
    let logs = weighted_shift_closed_form_log(&x0, 0.5);
    assert!(logs.iter().all(|v| v.ln_abs.is_finite()));
    let big = TruncatedSeqState::unit(120, 0).unwrap();
    let x = weighted_shift_closed_form_log(&big, 0.5);
    // 120! 2^-120 exceeds f64 range only through its logarithm
    assert!((x[120].ln_abs - (ln_factorial(120) - 120.0 * 2f64.ln())).abs() < 1e-9);
}

#[test]
fn growth_matches_the_lower_bound() {
    let start = 5;
    let t = 0.1;
    let x0 = TruncatedSeqState::unit(start + 20, start).unwrap();
    let logs = weighted_shift_closed_form_log(&x0, t);
    for n in start..=start + 20 {
        assert!(logs[n].ln_abs >= growth_lower_bound_ln(start, n, t) - 1e-10);
    }
}

#[test]
fn seminorm_diverges_with_truncation() {
    let levels: Vec<usize> = (10..=40).collect();
    let rows = seminorm_blowup_report(0, 0.1, 0, &levels).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].seminorm >= w[0].seminorm);
    }
    // n! t^n first exceeds 1 at n = 25
    for w in rows.windows(2).filter(|w| w[0].truncation >= 25) {
        assert!(w[1].seminorm > w[0].seminorm);
    }
    let (p10, p40) = (rows[0].seminorm, rows[30].seminorm);
    assert!(p40 > 1e6 * p10, "{p40} vs {p10}");
}

#[test]
fn seminorm_at_time_zero_is_constant() {
    let rows = seminorm_blowup_report(3, 0.0, 2, &[5, 10, 20, 40]).unwrap();
    assert!(rows.iter().all(|r| r.seminorm == rows[0].seminorm));
}

#[test]
fn coordinates_ignore_the_truncation_level() {
    let base: Vec<f64> = (0..=40).map(|i| (0.3 * i as f64).sin()).collect();
    let short = TruncatedSeqState::new(DVector::from_column_slice(&base[..21])).unwrap();
    let long = TruncatedSeqState::new(DVector::from_column_slice(&base)).unwrap();
    let (a, b) = (weighted_shift_closed_form(&short, 0.2), weighted_shift_closed_form(&long, 0.2));
    let (c, d) = (weighted_shift_rk4(&short, 0.2, 500), weighted_shift_rk4(&long, 0.2, 500));
    for n in 0..=20 {
        assert_eq!(a[n].to_bits(), b[n].to_bits());
        assert_eq!(c[n].to_bits(), d[n].to_bits());
    }
}

#[test]
fn flat_function_solves_the_shift_equation() {
    let grid: Vec<f64> = (0..=16).map(|i| 0.2 + 0.05 * i as f64).collect();
    let r = shift_nonuniqueness_demo(10, &grid).unwrap();
    assert!(r.flat_residual <= 1e-10, "{}", r.flat_residual);
    assert_eq!(r.zero_residual, 0.0);
    assert_eq!(r.initial_value, 0.0);
    assert!((r.gap_at_half - (-4f64).exp()).abs() < 1e-16);
}

#[test]
fn flat_polynomials_by_hand() {
    let ps = flat_polynomials(2).unwrap();
    assert_eq!(ps[1], vec![0.0, 0.0, 0.0, 2.0]);
    // phi'' = (4u^6 - 6u^4) phi
    assert_eq!(ps[2], vec![0.0, 0.0, 0.0, 0.0, -6.0, 0.0, 4.0]);
    assert!((flat_derivative(1, 0.5).unwrap() - 16.0 * (-4f64).exp()).abs() < 1e-15);
    assert_eq!(flat_derivative(3, -0.2).unwrap(), 0.0);
}

#[test]
fn deep_derivative_orders_are_refused() {
    assert!(shift_nonuniqueness_demo(30, &[0.5]).is_ok());
    assert!(matches!(
        shift_nonuniqueness_demo(31, &[0.5]),
        Err(regulie_core::Error::Refused(_))
    ));
}

#[test]
fn translation_flow() {
    let grid: Vec<f64> = (0..=50).map(|i| -2.0 + 0.08 * i as f64).collect();
    let c = transport_flow_demo("3", 0.4, &grid, 1e-3).unwrap();
    assert_eq!(c.ode_residual, 0.0);
    assert_eq!(c.flow_law_residual, 0.0);
    let s = transport_flow_demo("sin(s)", 0.4, &grid, 1e-3).unwrap();
    assert!(s.ode_residual <= 1e-6);
    assert!(s.flow_law_residual <= 1e-14);
    assert!(transport_flow_demo("sin(t)", 0.4, &grid, 1e-3).is_err());
}

proptest! {
    #[test]
    fn seminorms_are_monotone_in_k(xs in prop::collection::vec(-10.0f64..10.0, 1..20)) {
        let x = TruncatedSeqState::new(DVector::from_vec(xs)).unwrap();
        for k in 0..4 {
            prop_assert!(x.seminorm(k + 1) >= x.seminorm(k));
        }
    }

    #[test]
    fn closed_form_is_linear(a in -2.0f64..2.0, t in -0.5f64..0.5) {
        let x = TruncatedSeqState::unit(12, 3).unwrap();
        let y = TruncatedSeqState::unit(12, 7).unwrap();
        let sum = TruncatedSeqState::new(&x.x * a + &y.x).unwrap();
        let lhs = weighted_shift_closed_form(&sum, t);
        let rhs = weighted_shift_closed_form(&x, t) * a + weighted_shift_closed_form(&y, t);
        prop_assert!((lhs - &rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }
}
