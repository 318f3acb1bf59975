use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

/// Environment variable multiplying every tolerance before comparison.
pub const TOLERANCE_SCALE_VAR: &str = "REGULIE_TOLERANCE_SCALE";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// What a check measured, before it is judged.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub group: String,
    pub params: Value,
    pub residual: f64,
    pub tolerance: f64,
}

impl Measurement {
    pub fn new(group: &str, params: Value, residual: f64, tolerance: f64) -> Self {
        Measurement {
            group: group.to_string(),
            params,
            residual,
            tolerance,
        }
    }
}

/// One line of a suite run. `pass` holds exactly when `residual <= tolerance`
/// (after scaling); a check that errored has no residual and fails.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub group: String,
    pub params: Value,
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub wall_time: f64,
}

impl CheckReport {
    pub fn judged(check: &str, m: Measurement, scale: f64, wall_time: f64) -> Self {
        let tolerance = m.tolerance * scale;
        let residual = m.residual.is_finite().then_some(m.residual);
        CheckReport {
            check: check.to_string(),
            group: m.group,
            params: m.params,
            residual,
            tolerance,
            pass: residual.is_some_and(|r| r <= tolerance),
            error: (!m.residual.is_finite()).then(|| format!("non-finite residual {}", m.residual)),
            wall_time,
        }
    }

    pub fn errored(check: &str, err: String, wall_time: f64) -> Self {
        CheckReport {
            check: check.to_string(),
            group: String::new(),
            params: Value::Null,
            residual: None,
            tolerance: 0.0,
            pass: false,
            error: Some(err),
            wall_time,
        }
    }

    /// Runs `f` and judges what it returns.
    pub fn measure<F>(check: &str, scale: f64, f: F) -> Self
    where
        F: FnOnce() -> regulie_core::Result<Measurement>,
    {
        let start = Instant::now();
        let out = f();
        let wall = start.elapsed().as_secs_f64();
        match out {
            Ok(m) => CheckReport::judged(check, m, scale, wall),
            Err(e) => CheckReport::errored(check, e.to_string(), wall),
        }
    }

    /// The report with its timing zeroed, for comparing runs.
    pub fn without_timing(&self) -> Self {
        CheckReport {
            wall_time: 0.0,
            ..self.clone()
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports always serialize")
    }
}

/// Reads the tolerance scale from the environment (1 when unset).
pub fn tolerance_scale() -> Result<f64, String> {
    match std::env::var(TOLERANCE_SCALE_VAR) {
        Err(_) => Ok(1.0),
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
            _ => Err(format!("{TOLERANCE_SCALE_VAR} must be a positive number, got `{s}`")),
        },
    }
}

pub fn exit_code(reports: &[CheckReport]) -> i32 {
    if reports.iter().all(|r| r.pass) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
