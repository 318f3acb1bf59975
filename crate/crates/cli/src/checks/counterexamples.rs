use nalgebra::DVector;
use regulie_core::counterexamples::*;
use serde_json::json;

use crate::report::Measurement;
use crate::suite::{Check, Suite};

const TIMES: [f64; 5] = [-0.5, -0.1, 0.05, 0.3, 0.5];

pub fn register(out: &mut Vec<Check>) {
    let s = Suite::Counterexamples;

    out.push(Check::new("counterexamples.closed-form", s, |_| {
        let mixed: Vec<f64> = (0..=30).map(|i| ((i * 7 % 5) as f64 - 2.0) / (1.0 + i as f64).powi(2)).collect();
        let starts = [
            TruncatedSeqState::unit(30, 0)?,
            TruncatedSeqState::unit(30, 4)?,
            TruncatedSeqState::new(DVector::from_vec(mixed))?,
        ];
        let mut worst = 0.0f64;
        for x0 in &starts {
            worst = worst.max(weighted_shift_solve(x0, &TIMES)?.max_relative_gap);
        }
        Ok(Measurement::new("s", json!({"truncation": 30, "t": TIMES, "starts": 3}), worst, 1e-9))
    }));

    // residual 1e6 p(10) / p(40): below 1 iff the seminorm grew by more than 1e6;
    // infinite if it ever decreased
    out.push(Check::new("counterexamples.seminorm-divergence", s, |_| {
        let levels: Vec<usize> = (10..=40).collect();
        let rows = seminorm_blowup_report(0, 0.1, 0, &levels)?;
        let monotone = rows.windows(2).all(|w| w[1].seminorm >= w[0].seminorm);
        let (p10, p40) = (rows[0].seminorm, rows[rows.len() - 1].seminorm);
        let r = if monotone { 1e6 * p10 / p40 } else { f64::INFINITY };
        let params = json!({"t": 0.1, "k": 0, "truncations": [10, 40], "seminorms": [p10, p40]});
        Ok(Measurement::new("s", params, r, 1.0))
    }));

    out.push(Check::new("counterexamples.non-unique", s, |_| {
        let grid: Vec<f64> = (0..=16).map(|i| 0.2 + 0.05 * i as f64).collect();
        let rep = shift_nonuniqueness_demo(9, &grid)?;
        let r = rep.flat_residual.max(rep.zero_residual).max(rep.initial_value.abs());
        let params = json!({"k_max": 9, "t": [0.2, 1.0], "gap_at_half": rep.gap_at_half});
        Ok(Measurement::new("R^N", params, r, 1e-10))
    }));

    out.push(Check::new("counterexamples.transport-flow", s, |_| {
        let grid: Vec<f64> = (0..=50).map(|i| -2.0 + 0.08 * i as f64).collect();
        let rep = transport_flow_demo("sin(s)", 0.4, &grid, 1e-3)?;
        let params = json!({"x0": "sin(s)", "t": 0.4, "h": 1e-3, "flow_law": rep.flow_law_residual});
        Ok(Measurement::new("C(R)", params, rep.ode_residual.max(rep.flow_law_residual), 1e-6))
    }));
}
