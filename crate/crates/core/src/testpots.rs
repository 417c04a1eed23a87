//! Named benchmark potentials on [0, 1] with analytic derivatives, plus the
//! closed-form trajectories available for the harmonic oscillator and the
//! mirrored free fall.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TestPotError {
    #[error("t = {0} outside [0, 2], where the closed forms are defined")]
    OutOfRange(f64),
    #[error("unknown potential id {0:?} (expected sho, double-well, morse, mff, smff)")]
    UnknownId(String),
    #[error("no closed-form solution for this potential")]
    NoAnalyticSolution,
}

/// Morse well depth `8 / (sqrt(5) - 1)^2`.
pub fn morse_depth() -> f64 {
    let s = 5f64.sqrt() - 1.0;
    8.0 / (s * s)
}

/// Morse width `3 ln((1 + sqrt(5)) / 2)`.
pub fn morse_width() -> f64 {
    3.0 * ((1.0 + 5f64.sqrt()) / 2.0).ln()
}

pub const SMFF_ALPHA: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedPotential {
    Sho,
    DoubleWell,
    Morse { d_e: f64, a: f64 },
    Mff,
    Smff { alpha: f64 },
}

impl NamedPotential {
    pub fn morse() -> Self {
        Self::Morse {
            d_e: morse_depth(),
            a: morse_width(),
        }
    }

    pub fn smff() -> Self {
        Self::Smff { alpha: SMFF_ALPHA }
    }

    pub fn from_id(id: &str) -> Result<Self, TestPotError> {
        match id {
            "sho" => Ok(Self::Sho),
            "double-well" => Ok(Self::DoubleWell),
            "morse" => Ok(Self::morse()),
            "mff" => Ok(Self::Mff),
            "smff" => Ok(Self::smff()),
            other => Err(TestPotError::UnknownId(other.to_string())),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::Sho => "sho",
            Self::DoubleWell => "double-well",
            Self::Morse { .. } => "morse",
            Self::Mff => "mff",
            Self::Smff { .. } => "smff",
        }
    }
}

fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

/// Potential value at `q`.
pub fn eval_named(pot: &NamedPotential, q: f64) -> f64 {
    match *pot {
        NamedPotential::Sho => 8.0 * (q - 0.5) * (q - 0.5),
        NamedPotential::DoubleWell => {
            let a = q - 0.2;
            let b = q - 0.8;
            625.0 / 8.0 * a * a * b * b
        }
        NamedPotential::Morse { d_e, a } => {
            let e = 1.0 - (-a * (q - 1.0 / 3.0)).exp();
            d_e * e * e
        }
        NamedPotential::Mff => 4.0 * (q - 0.5).abs(),
        NamedPotential::Smff { alpha } => {
            let x = q - 0.5;
            let scale = 4.0 / coth(alpha / 2.0);
            // x*coth(alpha*x) has a removable singularity at x = 0
            if x.abs() < 1e-6 {
                scale * (1.0 / alpha + alpha * x * x / 3.0)
            } else {
                scale * x * coth(alpha * x)
            }
        }
    }
}

/// Analytic derivative `dV/dq`. The mirrored-free-fall kink at `q = 0.5`
/// takes the subgradient midpoint 0.
pub fn eval_named_deriv(pot: &NamedPotential, q: f64) -> f64 {
    match *pot {
        NamedPotential::Sho => 16.0 * (q - 0.5),
        NamedPotential::DoubleWell => 625.0 / 4.0 * (q - 0.2) * (q - 0.8) * (2.0 * q - 1.0),
        NamedPotential::Morse { d_e, a } => {
            let e = (-a * (q - 1.0 / 3.0)).exp();
            2.0 * d_e * (1.0 - e) * a * e
        }
        NamedPotential::Mff => {
            if q > 0.5 {
                4.0
            } else if q < 0.5 {
                -4.0
            } else {
                0.0
            }
        }
        NamedPotential::Smff { alpha } => {
            let x = q - 0.5;
            let scale = 4.0 / coth(alpha / 2.0);
            if x.abs() < 1e-6 {
                scale * (2.0 * alpha * x / 3.0)
            } else {
                let sh = (alpha * x).sinh();
                scale * (coth(alpha * x) - alpha * x / (sh * sh))
            }
        }
    }
}

/// Closed-form `(q, p)` at time `t` for the potentials that admit one.
pub fn analytic_solution(pot: &NamedPotential, t: f64) -> Result<(f64, f64), TestPotError> {
    if !(0.0..=2.0).contains(&t) {
        return Err(TestPotError::OutOfRange(t));
    }
    match pot {
        NamedPotential::Sho => Ok((0.5 * (1.0 - (4.0 * t).cos()), 2.0 * (4.0 * t).sin())),
        NamedPotential::Mff => {
            let (q, p) = if t < 0.5 {
                (2.0 * t * t, 4.0 * t)
            } else if t < 1.5 {
                (-2.0 * t * t + 4.0 * t - 1.0, -4.0 * t + 4.0)
            } else {
                (2.0 * (2.0 - t) * (2.0 - t), -4.0 * (2.0 - t))
            };
            Ok((q, p))
        }
        _ => Err(TestPotError::NoAnalyticSolution),
    }
}

/// Sensor discretization at `m` uniform nodes over `[0, domain_length]`.
pub fn sample_named(pot: &NamedPotential, m: usize, domain_length: f64) -> Vec<f64> {
    assert!(m >= 2);
    (0..m)
        .map(|i| eval_named(pot, i as f64 * domain_length / (m - 1) as f64))
        .collect()
}
