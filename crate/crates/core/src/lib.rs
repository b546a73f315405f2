//! Online joint state and static-parameter estimation for nonlinear
//! state-space models.
//!
//! The centerpiece is the extended parameter filter ([`filters::run_epf`]):
//! each particle carries a fixed-size log-polynomial summary of its
//! parameter posterior, built from a Taylor approximation of the
//! transition density, so the per-step cost does not grow with the length
//! of the observation sequence. Baselines (bootstrap SIR, augmented-state
//! SIR, Liu–West, Storvik) and brute-force grid oracles live alongside it.
//!
//! ```no_run
//! use epf::prelude::*;
//!
//! let model = models::make_sin();
//! let traj = model.simulate(1000, 7).unwrap();
//! let cfg = EpfConfig::new(1000, 7, SamplerConfig::slice_for(&model));
//! let run = run_epf(&model, &traj.observations, &cfg, 7).unwrap();
//! println!("{:?}", run.output.last().unwrap().theta_mean);
//! ```

pub mod cli;
pub mod config;
pub mod diagnostics;
mod error;
pub mod filters;
pub mod model;
pub mod models;
pub mod poly;
pub mod rng;
pub mod samplers;
pub mod selftest;
pub mod suffstats;

pub use error::{Error, Result};

/// Formats a double with 17 significant digits, the precision used by every
/// CSV this crate writes.
pub fn fmt_f64(v: f64) -> String {
    format!("{:.16e}", v)
}

pub mod prelude {
    pub use crate::diagnostics::{
        gibbs_density_approx, gibbs_density_exact, kl_divergence, posterior_moments, Grid,
        GridDensity,
    };
    pub use crate::filters::{
        run_epf, run_liu_west, run_sir, run_sir_augmented, run_storvik, EpfConfig, FilterOutput,
        FilterRun, FilterSettings,
    };
    pub use crate::model::{ModelSpec, Trajectory};
    pub use crate::models;
    pub use crate::poly::Poly;
    pub use crate::samplers::{SamplerConfig, SamplerKind};
    pub use crate::suffstats::{GaussianSuffStat, LogPolyDensity};
}
