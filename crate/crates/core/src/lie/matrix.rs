//! Dense matrix helpers shared by the group realizations.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub(crate) fn identity(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n)
}

pub(crate) fn commutator(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a * b - b * a
}

/// Matrix exponential by Padé scaling and squaring.
pub(crate) fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    a.exp()
}

/// Exponential of a nilpotent matrix: the series terminates after `n` terms.
pub(crate) fn expm_nilpotent(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut out = identity(n);
    let mut term = identity(n);
    for k in 1..n {
        term = &term * a / k as f64;
        out += &term;
    }
    out
}

/// Logarithm of a unipotent matrix, exact up to rounding.
pub(crate) fn logm_unipotent(g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = g.nrows();
    let nil = g - identity(n);
    let mut out = DMatrix::zeros(n, n);
    let mut power = identity(n);
    for k in 1..n {
        power = &power * &nil;
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        out += &power * (sign / k as f64);
    }
    out
}

/// Principal square root by the Denman–Beavers iteration.
///
/// Fails when the iteration does not settle, which happens for matrices with
/// eigenvalues on the closed negative real axis.
pub(crate) fn sqrtm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = identity(n);
    for _ in 0..100 {
        let y_inv = y
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Branch("singular iterate in square root".into()))?;
        let z_inv = z
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Branch("singular iterate in square root".into()))?;
        let y_next = (&y + z_inv) * 0.5;
        let z_next = (&z + y_inv) * 0.5;
        let change = (&y_next - &y).norm();
        y = y_next;
        z = z_next;
        if !change.is_finite() {
            break;
        }
        if change <= 1e-15 * y.norm().max(1.0) {
            return Ok(y);
        }
    }
    Err(Error::Branch(
        "square-root iteration did not converge (eigenvalue on the negative real axis?)".into(),
    ))
}

/// Principal matrix logarithm by inverse scaling and squaring.
pub(crate) fn logm(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    let eye = identity(n);
    let mut a = g.clone();
    let mut squarings = 0;
    while (&a - &eye).norm() > 0.1 {
        a = sqrtm(&a)?;
        squarings += 1;
        if squarings > 64 {
            return Err(Error::Branch("no convergence of repeated square roots".into()));
        }
    }
    // log(A) = 2 atanh(Z), Z = (A - I)(A + I)^-1
    let denom = (&a + &eye)
        .try_inverse()
        .ok_or_else(|| Error::Branch("A + I singular".into()))?;
    let zm = (&a - &eye) * denom;
    let z2 = &zm * &zm;
    let mut term = zm.clone();
    let mut sum = zm.clone();
    for j in 1..200 {
        term = &term * &z2;
        let contrib = &term / (2 * j + 1) as f64;
        sum += &contrib;
        if contrib.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    Ok(sum * (2.0 * (1u64 << squarings) as f64))
}

/// Column-major vectorization, matching nalgebra's storage order.
pub(crate) fn vectorize(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

pub(crate) fn all_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_inverts_exp_on_a_generic_matrix() {
        let x = DMatrix::from_row_slice(3, 3, &[0.1, -0.4, 0.2, 0.3, -0.2, 0.5, -0.1, 0.2, 0.1]);
        let g = expm(&x);
        let back = logm(&g).unwrap();
        assert!((back - x).norm() < 1e-13);
    }

    #[test]
    fn log_rejects_negative_real_spectrum() {
        let g = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(logm(&g), Err(Error::Branch(_))));
    }

    #[test]
    fn unipotent_log_and_nilpotent_exp_are_inverse() {
        let x = DMatrix::from_row_slice(3, 3, &[0.0, 1.5, -2.0, 0.0, 0.0, 0.7, 0.0, 0.0, 0.0]);
        let g = expm_nilpotent(&x);
        assert!((logm_unipotent(&g) - &x).norm() < 1e-15);
        assert!((expm(&x) - g).norm() < 1e-14);
    }
}
