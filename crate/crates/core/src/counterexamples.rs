//! Linear ODEs on sequence spaces that have no solution, or too many.

use nalgebra::{Complex, DVector};

use crate::error::{Error, Result};
use crate::expr::Expr;

/// `ln n!` by summed logarithms.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// A real number as `sign * exp(ln_abs)`; zero has sign 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogValue {
    pub sign: f64,
    pub ln_abs: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue {
        sign: 0.0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn value(self) -> f64 {
        if self.sign == 0.0 {
            0.0
        } else {
            self.sign * self.ln_abs.exp()
        }
    }

    /// Sum of signed log-space terms, scaled by the largest magnitude.
    fn sum(terms: &[LogValue]) -> LogValue {
        let m = terms
            .iter()
            .filter(|v| v.sign != 0.0)
            .map(|v| v.ln_abs)
            .fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let s: f64 = terms
            .iter()
            .filter(|v| v.sign != 0.0)
            .map(|v| v.sign * (v.ln_abs - m).exp())
            .sum();
        if s == 0.0 {
            Self::ZERO
        } else {
            LogValue {
                sign: s.signum(),
                ln_abs: m + s.abs().ln(),
            }
        }
    }
}

/// Coordinates `x_0..x_N` of a truncated rapidly decreasing sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeqState {
    pub x: DVector<f64>,
}

impl TruncatedSeqState {
    pub fn new(x: DVector<f64>) -> Result<Self> {
        if x.is_empty() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("a truncated sequence needs finite coordinates".into()));
        }
        Ok(TruncatedSeqState { x })
    }

    /// The unit sequence `e_i` truncated at `N`.
    pub fn unit(truncation: usize, i: usize) -> Result<Self> {
        if i > truncation {
            return Err(Error::Domain(format!("e_{i} does not survive truncation at {truncation}")));
        }
        let mut x = DVector::zeros(truncation + 1);
        x[i] = 1.0;
        Self::new(x)
    }

    pub fn truncation(&self) -> usize {
        self.x.len() - 1
    }

    /// `p_k(x) = sup_n (1 + n)^k |x_n|`.
    pub fn seminorm(&self, k: u32) -> f64 {
        self.x
            .iter()
            .enumerate()
            .map(|(n, v)| (1.0 + n as f64).powi(k as i32) * v.abs())
            .fold(0.0, f64::max)
    }
}

/// Terms `(n!/i!)^2 x_i t^(n-i) / (n-i)!` of the closed-form solution of
/// `x'_n = n^2 x_(n-1)` in log space.
fn shift_terms(x0: &[f64], n: usize, t: f64) -> Vec<LogValue> {
    let ln_n = ln_factorial(n);
    (0..=n)
        .map(|i| {
            let xi = x0.get(i).copied().unwrap_or(0.0);
            let p = n - i;
            if xi == 0.0 || (t == 0.0 && p > 0) {
                return LogValue::ZERO;
            }
            let ln_t = if p == 0 { 0.0 } else { p as f64 * t.abs().ln() };
            let sign = xi.signum() * if t < 0.0 && p % 2 == 1 { -1.0 } else { 1.0 };
            LogValue {
                sign,
                ln_abs: 2.0 * (ln_n - ln_factorial(i)) + xi.abs().ln() + ln_t - ln_factorial(p),
            }
        })
        .collect()
}

/// Closed-form solution at `t`, in log space.
pub fn weighted_shift_closed_form_log(x0: &TruncatedSeqState, t: f64) -> Vec<LogValue> {
    let xs = x0.x.as_slice();
    (0..xs.len()).map(|n| LogValue::sum(&shift_terms(xs, n, t))).collect()
}

pub fn weighted_shift_closed_form(x0: &TruncatedSeqState, t: f64) -> DVector<f64> {
    DVector::from_iterator(x0.x.len(), weighted_shift_closed_form_log(x0, t).into_iter().map(LogValue::value))
}

/// `sum_i |term_i|` for each coordinate, the scale for relative comparisons.
pub fn weighted_shift_scale(x0: &TruncatedSeqState, t: f64) -> DVector<f64> {
    let xs = x0.x.as_slice();
    DVector::from_iterator(
        xs.len(),
        (0..xs.len()).map(|n| shift_terms(xs, n, t).iter().map(|v| v.value().abs()).sum()),
    )
}

/// `(T x)_n = n^2 x_(n-1)`, `(T x)_0 = 0`.
fn weighted_shift(x: &DVector<f64>) -> DVector<f64> {
    DVector::from_iterator(
        x.len(),
        (0..x.len()).map(|n| if n == 0 { 0.0 } else { (n * n) as f64 * x[n - 1] }),
    )
}

/// Classical Runge-Kutta for `x' = T x` from 0 to `t`.
pub fn weighted_shift_rk4(x0: &TruncatedSeqState, t: f64, steps: usize) -> DVector<f64> {
    let h = t / steps as f64;
    let mut x = x0.x.clone();
    for _ in 0..steps {
        let k1 = weighted_shift(&x);
        let k2 = weighted_shift(&(&x + &k1 * (h / 2.0)));
        let k3 = weighted_shift(&(&x + &k2 * (h / 2.0)));
        let k4 = weighted_shift(&(&x + &k3 * h));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    x
}

/// Runge-Kutta steps per unit time in [`weighted_shift_solve`].
pub const SHIFT_STEPS_PER_UNIT: f64 = 100000.0;

/// Both solutions on a time grid.
#[derive(Clone, Debug)]
pub struct ShiftSolution {
    pub t_grid: Vec<f64>,
    pub closed_form: Vec<DVector<f64>>,
    pub ode: Vec<DVector<f64>>,
    /// Largest `|ode - closed| / sum |terms|` over all coordinates and times.
    pub max_relative_gap: f64,
}

pub fn weighted_shift_solve(x0: &TruncatedSeqState, t_grid: &[f64]) -> Result<ShiftSolution> {
    let mut closed = Vec::with_capacity(t_grid.len());
    let mut ode = Vec::with_capacity(t_grid.len());
    let mut worst = 0.0f64;
    for &t in t_grid {
        if !t.is_finite() {
            return Err(Error::Domain("non-finite time".into()));
        }
        let c = weighted_shift_closed_form(x0, t);
        let steps = ((t.abs() * SHIFT_STEPS_PER_UNIT).ceil() as usize).max(1);
        let o = weighted_shift_rk4(x0, t, steps);
        let scale = weighted_shift_scale(x0, t);
        for n in 0..c.len() {
            if scale[n] > 0.0 {
                worst = worst.max((o[n] - c[n]).abs() / scale[n]);
            } else if o[n] != 0.0 {
                worst = f64::INFINITY;
            }
        }
        closed.push(c);
        ode.push(o);
    }
    Ok(ShiftSolution {
        t_grid: t_grid.to_vec(),
        closed_form: closed,
        ode,
        max_relative_gap: worst,
    })
}

/// `ln( (n!)^2 / (n - N)! |t|^(n - N) / (N!)^2 )`: the size of `x_n(t)` for `x(0) = e_N`.
pub fn growth_lower_bound_ln(start: usize, n: usize, t: f64) -> f64 {
    assert!(n >= start);
    let p = n - start;
    2.0 * ln_factorial(n) - ln_factorial(p) + p as f64 * t.abs().ln() - 2.0 * ln_factorial(start)
}

/// One row of a truncation sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowupRow {
    pub truncation: usize,
    pub seminorm: f64,
}

/// `p_k(x(t))` for `x(0) = e_start` truncated at each level.
pub fn seminorm_blowup_report(start: usize, t: f64, k: u32, levels: &[usize]) -> Result<Vec<BlowupRow>> {
    levels
        .iter()
        .map(|&n| {
            let x0 = TruncatedSeqState::unit(n, start)?;
            let x = TruncatedSeqState {
                x: weighted_shift_closed_form(&x0, t),
            };
            Ok(BlowupRow {
                truncation: n,
                seminorm: x.seminorm(k),
            })
        })
        .collect()
}

/// Largest derivative order accepted by [`shift_nonuniqueness_demo`].
pub const FLAT_MAX_ORDER: usize = 30;

/// Coefficients (ascending in `u`) of `P_k` with `phi^(k)(t) = P_k(1/t) phi(t)`
/// for `phi(t) = exp(-1/t^2)`: `P_0 = 1`, `P_(k+1) = -u^2 P_k' + 2 u^3 P_k`.
pub fn flat_polynomials(k_max: usize) -> Result<Vec<Vec<f64>>> {
    if k_max > FLAT_MAX_ORDER {
        return Err(Error::Refused(format!(
            "derivative order {k_max} exceeds {FLAT_MAX_ORDER}; the polynomials grow too fast"
        )));
    }
    let mut ps = vec![vec![1.0]];
    for k in 0..k_max {
        let p = &ps[k];
        let mut next = vec![0.0; p.len() + 3];
        for (j, c) in p.iter().enumerate() {
            // -u^2 d/du (c u^j) = -j c u^(j+1); 2 u^3 c u^j = 2c u^(j+3)
            next[j + 1] -= j as f64 * c;
            next[j + 3] += 2.0 * c;
        }
        ps.push(next);
    }
    Ok(ps)
}

fn horner(p: &[f64], u: Complex<f64>) -> Complex<f64> {
    p.iter().rev().fold(Complex::new(0.0, 0.0), |acc, c| acc * u + c)
}

/// `phi^(k)(z) = P_k(1/z) exp(-1/z^2)` for `Re z > 0`, zero otherwise.
fn flat_eval(p: &[f64], z: Complex<f64>) -> Complex<f64> {
    if z.re <= 0.0 {
        return Complex::new(0.0, 0.0);
    }
    let u = z.inv();
    horner(p, u) * (-(u * u)).exp()
}

/// Outcome of the non-uniqueness demonstration for `x'_k = x_(k+1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NonUniquenessReport {
    pub k_max: usize,
    /// Largest `|x'_k - x_(k+1)| / max(|x'_k|, |x_(k+1)|, 1)` for the flat solution,
    /// with `x'_k` by complex-step differentiation.
    pub flat_residual: f64,
    /// Same for the zero solution.
    pub zero_residual: f64,
    /// `max_k |x_k(0)|` for the flat solution.
    pub initial_value: f64,
    /// `|x_0(0.5) - 0|`, the gap between the two solutions at `t = 0.5`.
    pub gap_at_half: f64,
}

/// Complex-step size.
const COMPLEX_STEP: f64 = 1e-30;

pub fn shift_nonuniqueness_demo(k_max: usize, t_grid: &[f64]) -> Result<NonUniquenessReport> {
    let ps = flat_polynomials(k_max)?;
    let mut worst = 0.0f64;
    for &t in t_grid {
        for k in 0..k_max {
            let dx = flat_eval(&ps[k], Complex::new(t, COMPLEX_STEP)).im / COMPLEX_STEP;
            let next = flat_eval(&ps[k + 1], Complex::new(t, 0.0)).re;
            let scale = dx.abs().max(next.abs()).max(1.0);
            worst = worst.max((dx - next).abs() / scale);
        }
    }
    let initial_value = ps
        .iter()
        .map(|p| flat_eval(p, Complex::new(0.0, 0.0)).re.abs())
        .fold(0.0, f64::max);
    Ok(NonUniquenessReport {
        k_max,
        flat_residual: worst,
        zero_residual: 0.0,
        initial_value,
        gap_at_half: flat_eval(&ps[0], Complex::new(0.5, 0.0)).re.abs(),
    })
}

/// `phi^(k)(t)` for real `t`.
pub fn flat_derivative(k: usize, t: f64) -> Result<f64> {
    let ps = flat_polynomials(k)?;
    Ok(flat_eval(&ps[k], Complex::new(t, 0.0)).re)
}

/// Outcome of the translation-flow check `x(t)(s) = x0(s + t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportFlowReport {
    /// `max |(x(t+h)(s) - x(t-h)(s)) / 2h - x0'(s + t)|` over the grid.
    pub ode_residual: f64,
    /// `max |x0((s + t1) + t2) - x0(s + (t1 + t2))|`.
    pub flow_law_residual: f64,
}

/// Translation solves `x' = d/ds x`; `x0` is an expression in `s`.
pub fn transport_flow_demo(x0: &str, t: f64, s_grid: &[f64], h: f64) -> Result<TransportFlowReport> {
    let e = Expr::parse(x0)?;
    if let Some(v) = e.variables().into_iter().find(|v| v != "s") {
        return Err(Error::Parse {
            pos: 0,
            msg: format!("unknown variable {v}; the initial profile uses s"),
        });
    }
    let de = e.diff("s");
    let f = |s: f64| e.eval_scalar(&[("s", s)]);
    let mut ode = 0.0f64;
    let mut flow = 0.0f64;
    let t2 = 0.5 * t + 0.25;
    for &s in s_grid {
        let dt = (f(s + (t + h))? - f(s + (t - h))?) / (2.0 * h);
        ode = ode.max((dt - de.eval_scalar(&[("s", s + t)])?).abs());
        flow = flow.max((f((s + t) + t2)? - f(s + (t + t2))?).abs());
    }
    Ok(TransportFlowReport {
        ode_residual: ode,
        flow_law_residual: flow,
    })
}
