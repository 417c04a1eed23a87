//! Hamilton's equations with unit mass, the RK4 and 4th-order Gauss-Legendre
//! integrators, and the labeling pipeline (fine symplectic solve followed by
//! cubic Hermite resampling onto the sensor grid).

use crate::potgen::BoundedPotential;
use crate::testpots::{eval_named, eval_named_deriv, NamedPotential};
use thiserror::Error;

/// Default fine step for ground-truth labels.
pub const GL4_DT: f64 = 1e-3;
/// Default fixed-point tolerance for the implicit stages.
pub const GL4_FP_TOL: f64 = 1e-13;
/// Default fixed-point iteration cap.
pub const GL4_MAX_ITERS: usize = 100;

/// Margin around the potential domain before a trajectory counts as escaped.
const ESCAPE_MARGIN: f64 = 0.1;

#[derive(Debug, Error)]
pub enum DynError {
    #[error("trajectory escaped domain: q = {q} at t = {t} (allowed [{lo}, {hi}])")]
    DomainEscape { q: f64, t: f64, lo: f64, hi: f64 },
    #[error("implicit stage fixed point failed to reach {tol} within {max_iters} iterations at t = {t}")]
    FixedPointDivergence { t: f64, tol: f64, max_iters: usize },
    #[error("labeling sample {index} failed: {source}")]
    LabelFailure {
        index: u64,
        #[source]
        source: Box<DynError>,
    },
}

/// A 1-D potential the integrators can differentiate.
pub trait Potential: Sync {
    /// `(V(q), dV/dq)`.
    fn value_and_slope(&self, q: f64) -> (f64, f64);
    /// Domain the bounded-motion guard checks against.
    fn domain(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

impl Potential for BoundedPotential {
    fn value_and_slope(&self, q: f64) -> (f64, f64) {
        BoundedPotential::value_and_slope(self, q)
    }
    fn domain(&self) -> (f64, f64) {
        self.curve.q_range()
    }
}

impl Potential for NamedPotential {
    fn value_and_slope(&self, q: f64) -> (f64, f64) {
        (eval_named(self, q), eval_named_deriv(self, q))
    }
}

impl<F: Fn(f64) -> (f64, f64) + Sync> Potential for F {
    fn value_and_slope(&self, q: f64) -> (f64, f64) {
        self(q)
    }
}

/// Unit-mass Hamiltonian system over a potential.
pub struct HamiltonianSystem<P: Potential> {
    pub potential: P,
}

impl<P: Potential> HamiltonianSystem<P> {
    pub fn new(potential: P) -> Self {
        Self { potential }
    }

    /// Total energy `p^2/2 + V(q)`.
    pub fn energy(&self, q: f64, p: f64) -> f64 {
        p * p / 2.0 + self.potential.value_and_slope(q).0
    }

    /// `-dV/dq`, evaluated with q clamped to the domain so intermediate
    /// integrator stages slightly outside stay defined.
    fn force(&self, q: f64) -> f64 {
        let (lo, hi) = self.potential.domain();
        -self.potential.value_and_slope(q.clamp(lo, hi)).1
    }

    fn check_domain(&self, q: f64, t: f64) -> Result<(), DynError> {
        let (lo, hi) = self.potential.domain();
        let (glo, ghi) = (lo - ESCAPE_MARGIN, hi + ESCAPE_MARGIN);
        if q < glo || q > ghi || !q.is_finite() {
            return Err(DynError::DomainEscape {
                q,
                t,
                lo: glo,
                hi: ghi,
            });
        }
        Ok(())
    }
}

/// Time grid with phase-space values and node derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    /// `dq/dt` at nodes; equals `p` by Hamilton's first equation.
    pub dq: Vec<f64>,
    /// `dp/dt = -V'(q)` at nodes.
    pub dp: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }
}

/// One classical RK4 step of `(dq, dp) = (p, -V'(q))`.
pub fn rk4_step<P: Potential>(sys: &HamiltonianSystem<P>, state: (f64, f64), dt: f64) -> (f64, f64) {
    let (q, p) = state;
    let (k1q, k1p) = (p, sys.force(q));
    let (k2q, k2p) = (p + 0.5 * dt * k1p, sys.force(q + 0.5 * dt * k1q));
    let (k3q, k3p) = (p + 0.5 * dt * k2p, sys.force(q + 0.5 * dt * k2q));
    let (k4q, k4p) = (p + dt * k3p, sys.force(q + dt * k3q));
    (
        q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
        p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
    )
}

/// RK4 over [0, T] with exactly `m - 1` steps, recording every node.
pub fn rk4_solve<P: Potential>(
    sys: &HamiltonianSystem<P>,
    t_final: f64,
    m: usize,
    x0: (f64, f64),
) -> Result<Trajectory, DynError> {
    assert!(m >= 2);
    let dt = t_final / (m - 1) as f64;
    let mut traj = Trajectory {
        t: Vec::with_capacity(m),
        q: Vec::with_capacity(m),
        p: Vec::with_capacity(m),
        dq: Vec::with_capacity(m),
        dp: Vec::with_capacity(m),
    };
    let (mut q, mut p) = x0;
    for i in 0..m {
        let t = i as f64 * dt;
        sys.check_domain(q, t)?;
        traj.t.push(t);
        traj.q.push(q);
        traj.p.push(p);
        traj.dq.push(p);
        traj.dp.push(sys.force(q));
        if i + 1 < m {
            (q, p) = rk4_step(sys, (q, p), dt);
        }
    }
    Ok(traj)
}

// Two-stage Gauss-Legendre tableau (order 4).
const GL_A: [[f64; 2]; 2] = [
    [0.25, 0.25 - 0.28867513459481287],
    [0.25 + 0.28867513459481287, 0.25],
];
const GL_B: [f64; 2] = [0.5, 0.5];

/// One GL4 step; stages solved by fixed-point iteration to `fp_tol` in the
/// max norm.
pub fn gl4_step<P: Potential>(
    sys: &HamiltonianSystem<P>,
    state: (f64, f64),
    dt: f64,
    fp_tol: f64,
    max_iters: usize,
    t: f64,
) -> Result<(f64, f64), DynError> {
    let (q, p) = state;
    // stage derivatives k_i = f(y + dt * sum_j a_ij k_j)
    let mut kq = [p, p];
    let mut kp = [sys.force(q), sys.force(q)];
    let mut converged = false;
    for _ in 0..max_iters {
        let mut delta: f64 = 0.0;
        let mut new_kq = [0.0; 2];
        let mut new_kp = [0.0; 2];
        for s in 0..2 {
            let qs = q + dt * (GL_A[s][0] * kq[0] + GL_A[s][1] * kq[1]);
            let ps = p + dt * (GL_A[s][0] * kp[0] + GL_A[s][1] * kp[1]);
            new_kq[s] = ps;
            new_kp[s] = sys.force(qs);
            delta = delta
                .max((new_kq[s] - kq[s]).abs())
                .max((new_kp[s] - kp[s]).abs());
        }
        kq = new_kq;
        kp = new_kp;
        if delta <= fp_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(DynError::FixedPointDivergence {
            t,
            tol: fp_tol,
            max_iters,
        });
    }
    Ok((
        q + dt * (GL_B[0] * kq[0] + GL_B[1] * kq[1]),
        p + dt * (GL_B[0] * kp[0] + GL_B[1] * kp[1]),
    ))
}

/// GL4 over [0, T] at a uniform fine step near `dt`, recording every node
/// with its derivatives. `dt` is rounded so the grid lands on T exactly.
pub fn gl4_solve<P: Potential>(
    sys: &HamiltonianSystem<P>,
    t_final: f64,
    dt: f64,
    fp_tol: f64,
    max_iters: usize,
    x0: (f64, f64),
) -> Result<Trajectory, DynError> {
    assert!(dt > 0.0 && t_final > 0.0);
    let n_steps = (t_final / dt).round().max(1.0) as usize;
    let dt = t_final / n_steps as f64;
    let mut traj = Trajectory {
        t: Vec::with_capacity(n_steps + 1),
        q: Vec::with_capacity(n_steps + 1),
        p: Vec::with_capacity(n_steps + 1),
        dq: Vec::with_capacity(n_steps + 1),
        dp: Vec::with_capacity(n_steps + 1),
    };
    let (mut q, mut p) = x0;
    for i in 0..=n_steps {
        let t = i as f64 * dt;
        sys.check_domain(q, t)?;
        traj.t.push(t);
        traj.q.push(q);
        traj.p.push(p);
        traj.dq.push(p);
        traj.dp.push(sys.force(q));
        if i < n_steps {
            (q, p) = gl4_step(sys, (q, p), dt, fp_tol, max_iters, t)?;
        }
    }
    Ok(traj)
}

fn hermite_eval(t0: f64, t1: f64, y0: f64, y1: f64, d0: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h * h10 * d0 + h01 * y1 + h * h11 * d1
}

/// Resample a fine trajectory onto `m` uniform nodes over [0, T] by piecewise
/// cubic Hermite interpolation using the recorded node derivatives.
pub fn hermite_resample(fine: &Trajectory, m: usize, t_final: f64) -> Trajectory {
    assert!(m >= 2);
    assert!(fine.len() >= 2);
    assert!(t_final <= *fine.t.last().unwrap() + 1e-12);
    let mut out = Trajectory {
        t: Vec::with_capacity(m),
        q: Vec::with_capacity(m),
        p: Vec::with_capacity(m),
        dq: Vec::with_capacity(m),
        dp: Vec::with_capacity(m),
    };
    for j in 0..m {
        let t = j as f64 * t_final / (m - 1) as f64;
        // exact node hits keep interpolation bit-identical to the solver
        let k = match fine.t.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(k) => {
                out.t.push(t);
                out.q.push(fine.q[k]);
                out.p.push(fine.p[k]);
                out.dq.push(fine.p[k]);
                out.dp.push(fine.dp[k]);
                continue;
            }
            Err(k) => k.clamp(1, fine.len() - 1),
        };
        let (i0, i1) = (k - 1, k);
        let q = hermite_eval(
            fine.t[i0], fine.t[i1], fine.q[i0], fine.q[i1], fine.dq[i0], fine.dq[i1], t,
        );
        let p = hermite_eval(
            fine.t[i0], fine.t[i1], fine.p[i0], fine.p[i1], fine.dp[i0], fine.dp[i1], t,
        );
        let dp = hermite_eval(
            fine.t[i0], fine.t[i1], fine.dp[i0], fine.dp[i1], 0.0, 0.0, t,
        );
        out.t.push(t);
        out.q.push(q);
        out.p.push(p);
        out.dq.push(p);
        out.dp.push(dp);
    }
    out
}

/// Ground-truth label: fine GL4 solve then Hermite resample onto `m` nodes.
///
/// If the fixed point fails to converge the fine step is halved, up to 4
/// times.
pub fn generate_label<P: Potential>(
    sys: &HamiltonianSystem<P>,
    m: usize,
    t_final: f64,
    index: u64,
) -> Result<Trajectory, DynError> {
    let mut dt = GL4_DT;
    let mut last = None;
    for _ in 0..5 {
        match gl4_solve(sys, t_final, dt, GL4_FP_TOL, GL4_MAX_ITERS, (0.0, 0.0)) {
            Ok(fine) => return Ok(hermite_resample(&fine, m, t_final)),
            Err(e @ DynError::FixedPointDivergence { .. }) => {
                last = Some(e);
                dt /= 2.0;
            }
            Err(e) => {
                return Err(DynError::LabelFailure {
                    index,
                    source: Box::new(e),
                })
            }
        }
    }
    Err(DynError::LabelFailure {
        index,
        source: Box::new(last.unwrap()),
    })
}
