//! Clamped cubic B-spline curves over uniform knots.
//!
//! Basis functions follow the Cox-de Boor recursion with the half-open
//! interval convention; the right endpoint is patched so the last basis
//! function equals 1 at the end of the parameter range. Curves are parametric
//! in lambda; `eval_at_q` inverts the (monotone) abscissa by bisection.

use thiserror::Error;

pub const DEGREE: usize = 3;

#[derive(Debug, Error)]
pub enum SplineError {
    #[error("degenerate spline: {control} control points for degree {degree} (need at least degree + 1)")]
    DegenerateSpline { control: usize, degree: usize },
    #[error("control q-coordinates must be strictly increasing")]
    NonIncreasingControls,
    #[error("non-monotone abscissa: dq/dlambda <= 0 near lambda = {lambda}")]
    NonMonotoneAbscissa { lambda: f64 },
    #[error("q = {q} outside curve range [{lo}, {hi}]")]
    OutOfRange { q: f64, lo: f64, hi: f64 },
}

/// Clamped uniform knot vector of length `c + degree + 1`.
///
/// The first and last `degree + 1` knots are pinned to 0 and 1; interior
/// knots are uniform, giving `c - degree + 1` distinct values.
pub fn make_clamped_uniform_knots(c: usize, degree: usize) -> Result<Vec<f64>, SplineError> {
    if c < degree + 1 {
        return Err(SplineError::DegenerateSpline { control: c, degree });
    }
    let mut knots = Vec::with_capacity(c + degree + 1);
    for i in 0..(c + degree + 1) {
        let u = if i <= degree {
            0.0
        } else if i >= c {
            1.0
        } else {
            (i - degree) as f64 / (c - degree) as f64
        };
        knots.push(u);
    }
    Ok(knots)
}

/// Cox-de Boor basis function `B_{i,p}` at `x`, with 0/0 terms taken as 0.
///
/// At the right endpoint the degree-0 indicator treats the final non-empty
/// span as closed, so the basis still sums to 1 at `x = 1`.
pub fn basis(i: usize, p: usize, x: f64, knots: &[f64]) -> f64 {
    debug_assert!(i + p + 1 < knots.len());
    if p == 0 {
        let last = *knots.last().unwrap();
        let in_span = knots[i] <= x && x < knots[i + 1];
        let at_end = x == last && knots[i] < knots[i + 1] && knots[i + 1] == last;
        return if in_span || at_end { 1.0 } else { 0.0 };
    }
    let mut value = 0.0;
    let d1 = knots[i + p] - knots[i];
    if d1 > 0.0 {
        value += (x - knots[i]) / d1 * basis(i, p - 1, x, knots);
    }
    let d2 = knots[i + p + 1] - knots[i + 1];
    if d2 > 0.0 {
        value += (knots[i + p + 1] - x) / d2 * basis(i + 1, p - 1, x, knots);
    }
    value
}

/// A clamped cubic B-spline through control points `(q_i, v_i)`.
#[derive(Debug, Clone)]
pub struct ClampedBSplineCurve {
    control: Vec<(f64, f64)>,
    knots: Vec<f64>,
    /// Scaled control-point differences of the degree-2 derivative spline.
    deriv_control: Vec<(f64, f64)>,
}

impl ClampedBSplineCurve {
    pub fn new(control: Vec<(f64, f64)>) -> Result<Self, SplineError> {
        let c = control.len();
        let knots = make_clamped_uniform_knots(c, DEGREE)?;
        if control.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(SplineError::NonIncreasingControls);
        }
        let p = DEGREE as f64;
        let deriv_control = (0..c - 1)
            .map(|i| {
                let den = knots[i + DEGREE + 1] - knots[i + 1];
                let s = p / den;
                (
                    s * (control[i + 1].0 - control[i].0),
                    s * (control[i + 1].1 - control[i].1),
                )
            })
            .collect();
        Ok(Self {
            control,
            knots,
            deriv_control,
        })
    }

    pub fn control_points(&self) -> &[(f64, f64)] {
        &self.control
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn q_range(&self) -> (f64, f64) {
        (self.control[0].0, self.control[self.control.len() - 1].0)
    }

    /// Curve point at `lambda` in [0, 1]. Clamped endpoints are returned
    /// exactly.
    pub fn eval(&self, lambda: f64) -> (f64, f64) {
        if lambda <= 0.0 {
            return self.control[0];
        }
        if lambda >= 1.0 {
            return self.control[self.control.len() - 1];
        }
        let mut q = 0.0;
        let mut v = 0.0;
        for (i, &(cq, cv)) in self.control.iter().enumerate() {
            let b = basis(i, DEGREE, lambda, &self.knots);
            q += b * cq;
            v += b * cv;
        }
        (q, v)
    }

    /// `(dq/dlambda, dv/dlambda)` via the degree-2 difference spline.
    pub fn eval_derivative(&self, lambda: f64) -> (f64, f64) {
        let lambda = lambda.clamp(0.0, 1.0);
        let knots = &self.knots[1..self.knots.len() - 1];
        let mut dq = 0.0;
        let mut dv = 0.0;
        for (i, &(cq, cv)) in self.deriv_control.iter().enumerate() {
            let b = basis(i, DEGREE - 1, lambda, knots);
            dq += b * cq;
            dv += b * cv;
        }
        (dq, dv)
    }

    /// Parameter `lambda` with `q(lambda) = q_target`, by bisection.
    pub fn lambda_for_q(&self, q_target: f64) -> Result<f64, SplineError> {
        let (q_lo, q_hi) = self.q_range();
        if q_target < q_lo || q_target > q_hi {
            return Err(SplineError::OutOfRange {
                q: q_target,
                lo: q_lo,
                hi: q_hi,
            });
        }
        if q_target == q_lo {
            return Ok(0.0);
        }
        if q_target == q_hi {
            return Ok(1.0);
        }
        // Newton on a monotone abscissa, with a bisection bracket as the
        // safeguard; this sits on the integrator hot path.
        let mut a = 0.0;
        let mut b = 1.0;
        let mut fa = q_lo - q_target;
        let mut x = (q_target - q_lo) / (q_hi - q_lo);
        for _ in 0..200 {
            let fx = self.eval(x).0 - q_target;
            if fx.abs() <= 1e-12 {
                return Ok(x);
            }
            if fa * fx <= 0.0 {
                b = x;
            } else {
                a = x;
                fa = fx;
            }
            if b - a < 1e-16 {
                break;
            }
            let (dq, _) = self.eval_derivative(x);
            let step = fx / dq;
            x = if dq > 0.0 && (a..=b).contains(&(x - step)) {
                x - step
            } else {
                0.5 * (a + b)
            };
        }
        let mid = 0.5 * (a + b);
        if (self.eval(mid).0 - q_target).abs() <= 1e-9 {
            // residual can stall above 1e-12 when dq/dlambda is large
            Ok(mid)
        } else {
            Err(SplineError::NonMonotoneAbscissa { lambda: mid })
        }
    }

    /// `(v, dv/dq)` at the abscissa `q_target`.
    pub fn eval_at_q(&self, q_target: f64) -> Result<(f64, f64), SplineError> {
        let lambda = self.lambda_for_q(q_target)?;
        let v = self.eval(lambda).1;
        let (dq, dv) = self.eval_derivative(lambda);
        if dq <= 0.0 {
            return Err(SplineError::NonMonotoneAbscissa { lambda });
        }
        Ok((v, dv / dq))
    }
}
