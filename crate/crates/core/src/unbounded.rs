//! Unbounded-potential support: extend a monotone decreasing potential on
//! [0, Q] by the unique C^2 cubic P that climbs back to V0 at q = 1, and
//! compute the valid time T up to which the composite trajectory follows the
//! original potential.
//!
//! T = integral over [0, Q] of dq / sqrt(2 (V0 - V(q))). The integrand blows
//! up like 1/sqrt(q) at the left endpoint (V(0) = V0); the substitution
//! q = s^2 removes the singularity exactly, leaving a bounded integrand whose
//! value at s = 0 is the limit 2 / sqrt(-2 V'(0)).

use crate::dynamics::Trajectory;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum UnboundedError {
    #[error("switch point Q = {q_switch} must lie in (0, 1)")]
    InvalidSwitchPoint { q_switch: f64 },
    #[error("cubic extension reaches {value} >= V0 = {v0} at q = {q}")]
    InteriorBoundViolated { q: f64, value: f64, v0: f64 },
    #[error("base potential is not strictly below V0 = {v0}: V({q}) = {value}")]
    NonMonotoneBase { q: f64, value: f64, v0: f64 },
    #[error("quadrature did not reach tolerance {tol} (depth limit {max_depth})")]
    QuadratureFailure { tol: f64, max_depth: usize },
}

/// Composite-potential description: base on [0, Q], cubic on (Q, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionSpec {
    pub q_switch: f64,
    pub v0: f64,
    /// (c3, c2, c1, c0) of `P(q) = c3 q^3 + c2 q^2 + c1 q + c0`.
    pub coeffs: [f64; 4],
}

pub fn eval_cubic(coeffs: &[f64; 4], q: f64) -> f64 {
    ((coeffs[0] * q + coeffs[1]) * q + coeffs[2]) * q + coeffs[3]
}

pub fn eval_cubic_deriv(coeffs: &[f64; 4], q: f64) -> f64 {
    (3.0 * coeffs[0] * q + 2.0 * coeffs[1]) * q + coeffs[2]
}

/// Solve a 4x4 system by Gaussian elimination with partial pivoting.
fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> [f64; 4] {
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for row in (0..4).rev() {
        let mut acc = b[row];
        for k in row + 1..4 {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// The unique cubic with P(1) = V0 and matching value, slope, and curvature
/// at Q. Verifies P < V0 strictly on a 1,001-point interior grid of (Q, 1).
pub fn build_cubic_extension(
    q_switch: f64,
    v0: f64,
    v_q: f64,
    dv_q: f64,
    ddv_q: f64,
) -> Result<[f64; 4], UnboundedError> {
    if !(q_switch > 0.0 && q_switch < 1.0) {
        return Err(UnboundedError::InvalidSwitchPoint { q_switch });
    }
    let s = q_switch;
    let a = [
        [1.0, 1.0, 1.0, 1.0],
        [s * s * s, s * s, s, 1.0],
        [3.0 * s * s, 2.0 * s, 1.0, 0.0],
        [6.0 * s, 2.0, 0.0, 0.0],
    ];
    let coeffs = solve4(a, [v0, v_q, dv_q, ddv_q]);
    for i in 1..=1001 {
        let q = s + i as f64 * (1.0 - s) / 1002.0;
        let value = eval_cubic(&coeffs, q);
        if value >= v0 {
            return Err(UnboundedError::InteriorBoundViolated { q, value, v0 });
        }
    }
    Ok(coeffs)
}

/// Sensor values of the composite potential at m uniform nodes on [0, 1].
pub fn extended_potential(
    spec: &ExtensionSpec,
    base: impl Fn(f64) -> f64,
    m: usize,
) -> Vec<f64> {
    assert!(m >= 2);
    (0..m)
        .map(|j| {
            let q = j as f64 / (m - 1) as f64;
            if q <= spec.q_switch {
                base(q)
            } else {
                eval_cubic(&spec.coeffs, q)
            }
        })
        .collect()
}

const QUAD_TOL: f64 = 1e-9;
const QUAD_MAX_DEPTH: usize = 48;

fn adaptive_simpson(
    f: &mut dyn FnMut(f64) -> Result<f64, UnboundedError>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> Result<f64, UnboundedError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(UnboundedError::QuadratureFailure {
            tol: QUAD_TOL,
            max_depth: QUAD_MAX_DEPTH,
        });
    }
    Ok(
        adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?,
    )
}

/// Time for the trajectory from rest at q = 0 to reach the switch point Q.
///
/// `base` returns `(V(q), V'(q))`; it must satisfy V(0) = V0 and stay
/// strictly below V0 on (0, Q].
pub fn valid_time(
    base: impl Fn(f64) -> (f64, f64),
    v0: f64,
    q_switch: f64,
) -> Result<f64, UnboundedError> {
    if !(q_switch > 0.0 && q_switch < 1.0) {
        return Err(UnboundedError::InvalidSwitchPoint { q_switch });
    }
    // after q = s^2 the integrand is g(s) = 2 s / sqrt(2 (V0 - V(s^2))),
    // with the removable limit g(0) = 2 / sqrt(-2 V'(0))
    let g0 = {
        let (_, slope0) = base(0.0);
        2.0 / (-2.0 * slope0).sqrt()
    };
    let mut g = |s: f64| -> Result<f64, UnboundedError> {
        if s == 0.0 {
            return Ok(g0);
        }
        let q = s * s;
        let (value, _) = base(q);
        let gap = v0 - value;
        if gap <= 0.0 {
            return Err(UnboundedError::NonMonotoneBase { q, value, v0 });
        }
        Ok(2.0 * s / (2.0 * gap).sqrt())
    };
    let (a, b) = (0.0, q_switch.sqrt());
    let fa = g(a)?;
    let fb = g(b)?;
    let fm = g(0.5 * (a + b))?;
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    adaptive_simpson(&mut g, a, b, fa, fm, fb, whole, QUAD_TOL, QUAD_MAX_DEPTH)
}

/// View of a monotone *increasing* base as a decreasing one via q -> Q - q.
///
/// The reflected evaluator satisfies the `valid_time` precondition when the
/// original increases strictly up to V(Q) = V0 with V(0) < V0... reflected,
/// time-to-switch is measured from the high end.
pub fn reflect_increasing(
    base: impl Fn(f64) -> (f64, f64),
    q_switch: f64,
) -> impl Fn(f64) -> (f64, f64) {
    move |q: f64| {
        let (v, dv) = base(q_switch - q);
        (v, -dv)
    }
}

/// Keep the leading nodes with t <= T_valid.
pub fn extract_valid_trajectory(traj: &Trajectory, t_valid: f64) -> Trajectory {
    let n = traj.t.partition_point(|&t| t <= t_valid + 1e-12);
    Trajectory {
        t: traj.t[..n].to_vec(),
        q: traj.q[..n].to_vec(),
        p: traj.p[..n].to_vec(),
        dq: traj.dq[..n].to_vec(),
        dp: traj.dp[..n].to_vec(),
    }
}
