use nalgebra::DVector;

use crate::error::{Error, Result};

/// Not-a-knot cubic spline through vector-valued samples.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<DVector<f64>>,
    // second derivatives at the knots
    curvature: Vec<DVector<f64>>,
}

impl CubicSpline {
    pub fn new(knots: Vec<f64>, values: Vec<DVector<f64>>) -> Result<Self> {
        let n = knots.len();
        if n < 2 || values.len() != n {
            return Err(Error::Domain(format!(
                "spline needs at least two knots with one value each (got {n} knots, {} values)",
                values.len()
            )));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Domain("spline knots must be strictly increasing".into()));
        }
        let dim = values[0].len();
        if values.iter().any(|v| v.len() != dim) {
            return Err(Error::Domain("spline values differ in length".into()));
        }
        let curvature = second_derivatives(&knots, &values);
        Ok(CubicSpline {
            knots,
            values,
            curvature,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[DVector<f64>] {
        &self.values
    }

    /// Evaluates the spline; outside the knot range the end cubics are extended.
    pub fn eval(&self, t: f64) -> DVector<f64> {
        let n = self.knots.len();
        let i = match self.knots.binary_search_by(|k| k.total_cmp(&t)) {
            Ok(i) => return self.values[i].clone(),
            Err(0) => 0,
            Err(i) if i >= n => n - 2,
            Err(i) => i - 1,
        };
        let (t0, t1) = (self.knots[i], self.knots[i + 1]);
        let h = t1 - t0;
        let (a, b) = (t1 - t, t - t0);
        let (m0, m1) = (&self.curvature[i], &self.curvature[i + 1]);
        let (y0, y1) = (&self.values[i], &self.values[i + 1]);
        m0 * (a * a * a / (6.0 * h))
            + m1 * (b * b * b / (6.0 * h))
            + (y0 / h - m0 * (h / 6.0)) * a
            + (y1 / h - m1 * (h / 6.0)) * b
    }
}

fn second_derivatives(t: &[f64], y: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let n = t.len();
    let dim = y[0].len();
    let zero = DVector::zeros(dim);
    if n == 2 {
        return vec![zero.clone(), zero];
    }
    let h: Vec<f64> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let slope: Vec<DVector<f64>> = (0..n - 1).map(|i| (&y[i + 1] - &y[i]) / h[i]).collect();
    if n == 3 {
        // the not-a-knot spline through three points is the interpolating parabola
        let m = (&slope[1] - &slope[0]) * (2.0 / (h[0] + h[1]));
        return vec![m.clone(), m.clone(), m];
    }
    // Unknowns M_1..M_{n-2}; M_0 and M_{n-1} are eliminated with the not-a-knot
    // conditions (third derivative continuous at t_1 and t_{n-2}).
    let m = n - 2;
    let mut sub = vec![0.0; m];
    let mut diag = vec![0.0; m];
    let mut sup = vec![0.0; m];
    let mut rhs: Vec<DVector<f64>> = Vec::with_capacity(m);
    for k in 0..m {
        let i = k + 1;
        sub[k] = h[i - 1];
        diag[k] = 2.0 * (h[i - 1] + h[i]);
        sup[k] = h[i];
        rhs.push((&slope[i] - &slope[i - 1]) * 6.0);
    }
    let (h0, h1) = (h[0], h[1]);
    diag[0] = h0 + 2.0 * h1;
    sup[0] = h1 - h0;
    rhs[0] = &rhs[0] * (h1 / (h0 + h1));
    let (a, bb) = (h[n - 2], h[n - 3]);
    diag[m - 1] = a + 2.0 * bb;
    sub[m - 1] = bb - a;
    rhs[m - 1] = &rhs[m - 1] * (bb / (a + bb));
    // Thomas algorithm (the reduced system is diagonally dominant)
    for k in 1..m {
        let w = sub[k] / diag[k - 1];
        diag[k] -= w * sup[k - 1];
        let prev = rhs[k - 1].clone();
        rhs[k] -= prev * w;
    }
    let mut inner = vec![zero.clone(); m];
    inner[m - 1] = &rhs[m - 1] / diag[m - 1];
    for k in (0..m - 1).rev() {
        inner[k] = (&rhs[k] - &inner[k + 1] * sup[k]) / diag[k];
    }
    let mut out = Vec::with_capacity(n);
    out.push((&inner[0] * (h0 + h1) - &inner[1] * h0) / h1);
    out.extend(inner.iter().cloned());
    let (p, q) = (&inner[m - 1], &inner[m - 2]);
    out.push((p * (bb + a) - q * a) / bb);
    out
}
