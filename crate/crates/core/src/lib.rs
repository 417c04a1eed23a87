//! Random bounded 1-D potentials with ground-truth Hamiltonian trajectories,
//! numerical baselines (RK4, Gauss-Legendre), a small DeepONet operator model,
//! and an extension transform for unbounded potentials.

pub mod bspline;
pub mod datafmt;
pub mod deeponet;
pub mod dynamics;
pub mod grf;
pub mod metrics;
pub mod potgen;
pub mod rng;
pub mod testpots;
pub mod unbounded;
