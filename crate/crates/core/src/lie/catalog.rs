//! Built-in groups, addressable by name.

use nalgebra::DMatrix;

use super::group::{quaternion_left_matrix, Constraint, ExpRule, Group, GroupSpec};
use crate::error::{Error, Result};

fn unit(n: usize, i: usize, j: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

/// Standard skew basis of so(3): `[e1, e2] = e3` and cyclic.
pub fn so3_basis() -> Vec<DMatrix<f64>> {
    vec![
        unit(3, 2, 1) - unit(3, 1, 2),
        unit(3, 0, 2) - unit(3, 2, 0),
        unit(3, 1, 0) - unit(3, 0, 1),
    ]
}

pub fn so3() -> Group {
    GroupSpec::matrix("so3", so3_basis(), Constraint::SpecialOrthogonal)
        .expect("so(3) basis")
        .with_exp_rule(ExpRule::Rodrigues)
        .with_log_radius(std::f64::consts::PI)
        .into_group()
}

/// SU(2) realized as unit quaternions acting on `R^4` by left multiplication.
/// Basis `e_a = L(i_a)/2`, so that `[e1, e2] = e3` and the double cover is the identity on coefficients.
pub fn su2() -> Group {
    let basis = vec![
        quaternion_left_matrix([0.0, 0.5, 0.0, 0.0]),
        quaternion_left_matrix([0.0, 0.0, 0.5, 0.0]),
        quaternion_left_matrix([0.0, 0.0, 0.0, 0.5]),
    ];
    GroupSpec::matrix("su2", basis, Constraint::UnitQuaternion)
        .expect("su(2) basis")
        .with_exp_rule(ExpRule::Quaternion)
        .with_log_radius(2.0 * std::f64::consts::PI)
        .with_simply_connected(true)
        .into_group()
}

/// SE(3) as 4x4 homogeneous matrices; basis: three translations, then three rotations.
pub fn se3() -> Group {
    let mut basis: Vec<DMatrix<f64>> = (0..3).map(|i| unit(4, i, 3)).collect();
    for r in so3_basis() {
        let mut m = DMatrix::zeros(4, 4);
        m.view_mut((0, 0), (3, 3)).copy_from(&r);
        basis.push(m);
    }
    GroupSpec::matrix("se3", basis, Constraint::RigidMotion)
        .expect("se(3) basis")
        .into_group()
}

/// SL(2, R) with basis `H = diag(1, -1)`, `E = E12`, `F = E21`.
pub fn sl2() -> Group {
    let basis = vec![unit(2, 0, 0) - unit(2, 1, 1), unit(2, 0, 1), unit(2, 1, 0)];
    GroupSpec::matrix("sl2", basis, Constraint::SpecialLinear)
        .expect("sl(2) basis")
        .into_group()
}

/// GL(2, R)^+ with the elementary-matrix basis.
pub fn gl2plus() -> Group {
    let basis = vec![unit(2, 0, 0), unit(2, 0, 1), unit(2, 1, 0), unit(2, 1, 1)];
    GroupSpec::matrix("gl2plus", basis, Constraint::PositiveDeterminant)
        .expect("gl(2) basis")
        .into_group()
}

/// Heisenberg group of unipotent 3x3 matrices; basis `X = E12`, `Y = E23`, `Z = E13`, `[X, Y] = Z`.
pub fn heis3() -> Group {
    let basis = vec![unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)];
    GroupSpec::matrix("heis3", basis, Constraint::Unipotent)
        .expect("heisenberg basis")
        .with_exp_rule(ExpRule::Nilpotent)
        .with_simply_connected(true)
        .into_group()
}

/// Heisenberg element with coordinates `(x, y, z)`: `[[1, x, z], [0, 1, y], [0, 0, 1]]`.
pub fn heis3_element(x: f64, y: f64, z: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[1.0, x, z, 0.0, 1.0, y, 0.0, 0.0, 1.0])
}

pub fn torus(n: usize) -> Group {
    GroupSpec::torus(n).into_group()
}

pub fn vector(n: usize) -> Group {
    GroupSpec::vector(n).into_group()
}

/// Names understood by [`lookup`].
pub const CATALOG_NAMES: &[&str] = &["so3", "su2", "se3", "sl2", "gl2plus", "heis3", "torus:<n>", "r:<n>"];

/// Looks up a built-in group: `so3`, `su2`, `se3`, `sl2`, `gl2plus`, `heis3`, `torus:n`, `r:n`.
pub fn lookup(name: &str) -> Result<Group> {
    let parse_dim = |s: &str| -> Result<usize> {
        s.parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Domain(format!("bad dimension in group name `{name}`")))
    };
    match name {
        "so3" => Ok(so3()),
        "su2" => Ok(su2()),
        "se3" => Ok(se3()),
        "sl2" => Ok(sl2()),
        "gl2plus" | "gl2+" => Ok(gl2plus()),
        "heis3" => Ok(heis3()),
        _ => {
            if let Some(n) = name.strip_prefix("torus:") {
                Ok(torus(parse_dim(n)?))
            } else if let Some(n) = name.strip_prefix("r:").or_else(|| name.strip_prefix("rn:")) {
                Ok(vector(parse_dim(n)?))
            } else {
                Err(Error::Domain(format!(
                    "unknown group `{name}` (known: {})",
                    CATALOG_NAMES.join(", ")
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::group::Realization;

    #[test]
    fn catalog_names_resolve() {
        for name in ["so3", "su2", "se3", "sl2", "gl2plus", "heis3", "torus:3", "r:2"] {
            let g = lookup(name).unwrap();
            assert_eq!(g.name(), name);
        }
        assert!(lookup("so4").is_err());
        assert!(lookup("torus:0").is_err());
    }

    #[test]
    fn flags() {
        assert!(su2().is_simply_connected());
        assert!(!so3().is_simply_connected());
        assert!(heis3().is_simply_connected());
        assert!(torus(2).is_abelian());
        assert!(!torus(2).is_simply_connected());
        assert!(vector(2).is_simply_connected());
        assert!(!se3().is_abelian());
        assert_eq!(torus(2).realization(), Realization::Torus);
        assert_eq!(se3().alg_dim(), 6);
        assert_eq!(gl2plus().alg_dim(), 4);
    }
}
