//! Custom group descriptions loaded from TOML.
//!
//! ```toml
//! name = "so3-custom"
//! mat_size = 3
//! constraint = "orthogonal"     # orthogonal | special-linear | unipotent-pattern | none
//! simply_connected = false
//! tolerance = 1e-9
//! basis = [
//!   [0, 0, 0,  0, 0, -1,  0, 1, 0],
//!   [0, 0, 1,  0, 0, 0,  -1, 0, 0],
//!   [0, -1, 0,  1, 0, 0,  0, 0, 0],
//! ]
//! ```
//! Basis matrices are listed row-major.

use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;

use super::group::{Constraint, Group, GroupSpec};
use crate::error::{Error, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupConfig {
    name: String,
    mat_size: usize,
    constraint: String,
    basis: Vec<Vec<f64>>,
    #[serde(default)]
    simply_connected: bool,
    tolerance: Option<f64>,
}

pub fn parse_group_config(text: &str) -> Result<Group> {
    let cfg: GroupConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    let n = cfg.mat_size;
    if n == 0 {
        return Err(Error::Config("mat_size must be positive".into()));
    }
    let constraint = match cfg.constraint.as_str() {
        "orthogonal" => Constraint::SpecialOrthogonal,
        "special-linear" => Constraint::SpecialLinear,
        "unipotent-pattern" => Constraint::Unipotent,
        "none" => Constraint::None,
        other => return Err(Error::Config(format!("unknown constraint `{other}`"))),
    };
    let basis = cfg
        .basis
        .iter()
        .enumerate()
        .map(|(i, row)| {
            if row.len() != n * n {
                Err(Error::Config(format!(
                    "basis matrix {i} has {} entries, expected {}",
                    row.len(),
                    n * n
                )))
            } else {
                Ok(DMatrix::from_row_slice(n, n, row))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut spec = GroupSpec::matrix(&cfg.name, basis, constraint)?
        .with_simply_connected(cfg.simply_connected);
    if let Some(tol) = cfg.tolerance {
        spec = spec.with_tolerance(tol);
    }
    Ok(spec.into_group())
}

pub fn load_group_config(path: &Path) -> Result<Group> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_group_config(&text)
}
