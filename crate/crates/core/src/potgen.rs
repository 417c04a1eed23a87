//! Random bounded potential generation.
//!
//! Pipeline per potential: sample a GRF vector at uniform interior nodes,
//! min-max normalize it into [-V0, V0], draw stratified abscissae, pin the
//! endpoint control values to V0, fit a clamped cubic B-spline, and sample it
//! at m uniform sensors.

use crate::bspline::{ClampedBSplineCurve, SplineError};
use crate::grf::{sample_grf, GrfError, KernelConfig};
use crate::rng::{retry_rng, uniform, Prng};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PotGenError {
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("infeasible stratum: omega = {omega} leaves an empty interval for n_grf = {n_grf}")]
    InfeasibleStratum { omega: f64, n_grf: usize },
    #[error("generation failed for sample {index} after {attempts} attempts: {source}")]
    GenerationFailure {
        index: u64,
        attempts: usize,
        #[source]
        source: SplineError,
    },
    #[error(transparent)]
    Grf(#[from] GrfError),
}

#[derive(Debug, Clone)]
pub struct GeneratorConfig {
    pub domain_length: f64,
    pub potential_scale: f64,
    pub n_grf_range: (usize, usize),
    pub omega: f64,
    pub length_scale_range: (f64, f64),
    pub n_sensors: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            domain_length: 1.0,
            potential_scale: 2.0,
            n_grf_range: (2, 7),
            omega: 0.05,
            length_scale_range: (0.01, 0.2),
            n_sensors: 100,
            seed: 8407,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), PotGenError> {
        let err = |m: String| Err(PotGenError::InvalidConfig(m));
        if !(self.domain_length > 0.0) {
            return err(format!("domain_length must be > 0, got {}", self.domain_length));
        }
        if !(self.potential_scale > 0.0) {
            return err(format!(
                "potential_scale must be > 0, got {}",
                self.potential_scale
            ));
        }
        // n_grf = 1 would leave only 3 control points, below the cubic minimum
        if self.n_grf_range.0 < 2 || self.n_grf_range.0 > self.n_grf_range.1 {
            return err(format!("n_grf_range {:?} invalid (lower bound >= 2)", self.n_grf_range));
        }
        let max_n = self.n_grf_range.1 as f64;
        if !(self.omega > 0.0 && self.omega < 1.0 / (2.0 * max_n)) {
            return err(format!(
                "omega = {} must lie in (0, {})",
                self.omega,
                1.0 / (2.0 * max_n)
            ));
        }
        let (l_lo, l_hi) = self.length_scale_range;
        if !(l_lo > 0.0 && l_lo <= l_hi && l_hi <= 1.0) {
            return err(format!("length_scale_range {:?} invalid", self.length_scale_range));
        }
        if self.n_sensors < 2 {
            return err(format!("n_sensors must be >= 2, got {}", self.n_sensors));
        }
        Ok(())
    }
}

/// Provenance of one generated potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialMeta {
    pub n_grf: usize,
    pub length_scale: f64,
    pub seed: u64,
    pub index: u64,
}

/// A generated bounded potential: spline curve plus its sensor discretization.
#[derive(Debug, Clone)]
pub struct BoundedPotential {
    pub curve: ClampedBSplineCurve,
    pub sensor_q: Vec<f64>,
    pub sensor_v: Vec<f64>,
    pub meta: PotentialMeta,
}

impl BoundedPotential {
    /// `(V, dV/dq)` with `q` clamped to the curve's abscissa range, so ODE
    /// stage evaluations slightly outside [0, L] stay defined.
    pub fn value_and_slope(&self, q: f64) -> (f64, f64) {
        let (lo, hi) = self.curve.q_range();
        self.curve
            .eval_at_q(q.clamp(lo, hi))
            .expect("monotone curve established at generation time")
    }
}

/// Stratified interior abscissae plus pinned endpoints 0 and L.
///
/// Stratum `i` of `n` is `((i-1)/n + omega/2, i/n - omega/2)`, except that
/// the first stratum starts at `omega` and the last ends at `1 - omega`.
pub fn sample_abscissae(
    n_grf: usize,
    omega: f64,
    domain_length: f64,
    rng: &mut Prng,
) -> Result<Vec<f64>, PotGenError> {
    assert!(n_grf >= 2);
    let n = n_grf as f64;
    let mut qs = Vec::with_capacity(n_grf + 2);
    qs.push(0.0);
    for i in 1..=n_grf {
        let (lo, hi) = if i == 1 {
            (omega, 1.0 / n - omega / 2.0)
        } else if i == n_grf {
            ((n - 1.0) / n + omega / 2.0, 1.0 - omega)
        } else {
            let fi = i as f64;
            ((fi - 1.0) / n + omega / 2.0, fi / n - omega / 2.0)
        };
        if !(lo < hi) {
            return Err(PotGenError::InfeasibleStratum { omega, n_grf });
        }
        qs.push(uniform(rng, lo, hi) * domain_length);
    }
    qs.push(domain_length);
    Ok(qs)
}

/// Min-max normalization into [-V0, V0] with the minimum mapped to +V0.
///
/// A degenerate vector (max == min) maps to all zeros, the interval midpoint.
pub fn normalize_grf(values: &[f64], v0: f64) -> Vec<f64> {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if (max - min).abs() < 1e-14 {
        return vec![0.0; values.len()];
    }
    values
        .iter()
        .map(|x| v0 - 2.0 * v0 * (x - min) / (max - min))
        .collect()
}

fn generate_attempt(
    cfg: &GeneratorConfig,
    index: u64,
    rng: &mut Prng,
) -> Result<BoundedPotential, PotGenError> {
    let (n_lo, n_hi) = cfg.n_grf_range;
    let n_grf = n_lo + (uniform(rng, 0.0, (n_hi - n_lo + 1) as f64) as usize).min(n_hi - n_lo);
    let length_scale = uniform(rng, cfg.length_scale_range.0, cfg.length_scale_range.1);

    let grf = sample_grf(n_grf, &KernelConfig::new(length_scale), rng)?;
    let interior_v = normalize_grf(&grf.values, cfg.potential_scale);
    let qs = sample_abscissae(n_grf, cfg.omega, cfg.domain_length, rng)?;

    let mut control = Vec::with_capacity(n_grf + 2);
    control.push((0.0, cfg.potential_scale));
    for i in 0..n_grf {
        control.push((qs[i + 1], interior_v[i]));
    }
    control.push((cfg.domain_length, cfg.potential_scale));

    let curve = ClampedBSplineCurve::new(control).map_err(|e| PotGenError::GenerationFailure {
        index,
        attempts: 1,
        source: e,
    })?;

    let m = cfg.n_sensors;
    let sensor_q: Vec<f64> = (0..m)
        .map(|i| i as f64 * cfg.domain_length / (m - 1) as f64)
        .collect();
    let mut sensor_v = Vec::with_capacity(m);
    for &q in &sensor_q {
        let (v, _) = curve.eval_at_q(q).map_err(|e| PotGenError::GenerationFailure {
            index,
            attempts: 1,
            source: e,
        })?;
        sensor_v.push(v);
    }

    Ok(BoundedPotential {
        curve,
        sensor_q,
        sensor_v,
        meta: PotentialMeta {
            n_grf,
            length_scale,
            seed: cfg.seed,
            index,
        },
    })
}

/// Generate the potential at `index` under `cfg.seed`.
///
/// A rare non-monotone control polygon triggers regeneration from a fresh
/// child generator, up to 10 retries.
pub fn generate_potential(cfg: &GeneratorConfig, index: u64) -> Result<BoundedPotential, PotGenError> {
    cfg.validate()?;
    let mut last = None;
    for attempt in 0..10u64 {
        let mut rng = retry_rng(cfg.seed, index, attempt);
        match generate_attempt(cfg, index, &mut rng) {
            Ok(p) => return Ok(p),
            Err(PotGenError::GenerationFailure { source, .. }) => last = Some(source),
            Err(e) => return Err(e),
        }
    }
    Err(PotGenError::GenerationFailure {
        index,
        attempts: 10,
        source: last.unwrap(),
    })
}

/// Generate `n` potentials with per-index child generators.
///
/// Results are ordered by index and independent of worker scheduling.
pub fn generate_dataset(cfg: &GeneratorConfig, n: usize) -> Result<Vec<BoundedPotential>, PotGenError> {
    cfg.validate()?;
    (0..n as u64)
        .into_par_iter()
        .map(|i| generate_potential(cfg, i))
        .collect()
}
