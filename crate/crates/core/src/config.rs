//! Experiment configuration: flat `key = value` lines, `#` starts a comment.
//!
//! ```text
//! model = sin
//! filter = epf
//! particles = 1000
//! order = 7
//! steps = 1000
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::filters::{FilterKind, FilterSettings};
use crate::model::{GaussianPrior, ModelSpec};
use crate::models;
use crate::samplers::{SamplerConfig, SamplerKind};
use crate::{Error, Result};

const KEYS: &[&str] = &[
    "model",
    "theta_true",
    "obs_noise_std",
    "trans_noise",
    "prior_mean",
    "prior_std",
    "steps",
    "filter",
    "particles",
    "order",
    "sampler",
    "rw_step_std",
    "slice_width",
    "slice_max_steps",
    "mh_steps_per_call",
    "rho",
    "ess_threshold",
    "seed",
    "trajectory",
    "grid_points",
    "sweep_t",
    "sweep_m",
    "out_dir",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: String,
    pub theta_true: Option<Vec<f64>>,
    pub obs_noise_std: Option<f64>,
    /// Transition noise std (Gaussian) or scale (Cauchy).
    pub trans_noise: Option<f64>,
    pub prior_mean: Option<Vec<f64>>,
    pub prior_std: Option<Vec<f64>>,
    pub steps: usize,
    pub filter: String,
    pub particles: usize,
    pub order: usize,
    pub sampler: Option<SamplerKind>,
    pub rw_step_std: Option<Vec<f64>>,
    pub slice_width: Option<Vec<f64>>,
    pub slice_max_steps: Option<usize>,
    pub mh_steps_per_call: Option<usize>,
    pub rho: f64,
    pub ess_threshold: Option<f64>,
    pub seed: u64,
    pub trajectory: Option<PathBuf>,
    pub grid_points: Option<usize>,
    pub sweep_t: Vec<usize>,
    pub sweep_m: Vec<usize>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            model: "sin".into(),
            theta_true: None,
            obs_noise_std: None,
            trans_noise: None,
            prior_mean: None,
            prior_std: None,
            steps: 1000,
            filter: "epf".into(),
            particles: 1000,
            order: 7,
            sampler: None,
            rw_step_std: None,
            slice_width: None,
            slice_max_steps: None,
            mh_steps_per_call: None,
            rho: 0.9,
            ess_threshold: None,
            seed: 0,
            trajectory: None,
            grid_points: None,
            sweep_t: vec![16, 64, 256, 1024],
            sweep_m: vec![1, 3, 5, 7],
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("bad value `{v}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| parse_one(key, s.trim())).collect()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key `{k}`", n + 1)));
            }
            if seen.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", n + 1)));
            }
        }
        let mut c = Self::default();
        for (k, v) in &seen {
            let v = v.as_str();
            match k.as_str() {
                "model" => c.model = v.to_string(),
                "theta_true" => c.theta_true = Some(parse_list(k, v)?),
                "obs_noise_std" => c.obs_noise_std = Some(parse_one(k, v)?),
                "trans_noise" => c.trans_noise = Some(parse_one(k, v)?),
                "prior_mean" => c.prior_mean = Some(parse_list(k, v)?),
                "prior_std" => c.prior_std = Some(parse_list(k, v)?),
                "steps" => c.steps = parse_one(k, v)?,
                "filter" => c.filter = v.to_string(),
                "particles" => c.particles = parse_one(k, v)?,
                "order" => c.order = parse_one(k, v)?,
                "sampler" => c.sampler = Some(v.parse()?),
                "rw_step_std" => c.rw_step_std = Some(parse_list(k, v)?),
                "slice_width" => c.slice_width = Some(parse_list(k, v)?),
                "slice_max_steps" => c.slice_max_steps = Some(parse_one(k, v)?),
                "mh_steps_per_call" => c.mh_steps_per_call = Some(parse_one(k, v)?),
                "rho" => c.rho = parse_one(k, v)?,
                "ess_threshold" => c.ess_threshold = Some(parse_one(k, v)?),
                "seed" => c.seed = parse_one(k, v)?,
                "trajectory" => c.trajectory = Some(PathBuf::from(v)),
                "grid_points" => c.grid_points = Some(parse_one(k, v)?),
                "sweep_t" => c.sweep_t = parse_list(k, v)?,
                "sweep_m" => c.sweep_m = parse_list(k, v)?,
                "out_dir" => c.out_dir = PathBuf::from(v),
                _ => unreachable!("key list checked above"),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn validate(&self) -> Result<()> {
        models::by_name(&self.model)?;
        if self.particles < 1 {
            return Err(Error::Config("particles must be >= 1".into()));
        }
        if self.order < 1 {
            return Err(Error::Config("order must be >= 1".into()));
        }
        if self.steps < 1 {
            return Err(Error::Config("steps must be >= 1".into()));
        }
        self.filter_kind_name()?;
        Ok(())
    }

    fn filter_kind_name(&self) -> Result<&str> {
        match self.filter.as_str() {
            f @ ("sir" | "sir_augmented" | "liu_west" | "storvik" | "epf") => Ok(f),
            other => Err(Error::Config(format!(
                "unknown filter `{other}` (expected sir, sir_augmented, liu_west, storvik or epf)"
            ))),
        }
    }

    /// The named model with every override applied.
    pub fn build_model(&self) -> Result<ModelSpec> {
        let mut m = models::by_name(&self.model)?;
        let cfg = |e: Error| Error::Config(format!("model override rejected: {e}"));
        if let Some(t) = &self.theta_true {
            m = m.with_theta_true(DVector::from_column_slice(t)).map_err(cfg)?;
        }
        if let Some(s) = self.obs_noise_std {
            m = m.with_obs_noise_std(s).map_err(cfg)?;
        }
        if let Some(s) = self.trans_noise {
            m = m.with_trans_noise_param(s).map_err(cfg)?;
        }
        if self.prior_mean.is_some() || self.prior_std.is_some() {
            let p = m.param_dim();
            let mean = self.prior_mean.clone().unwrap_or_else(|| m.prior().mean().as_slice().to_vec());
            let std = self.prior_std.clone().unwrap_or_else(|| m.prior().std());
            if mean.len() != p || std.len() != p {
                return Err(Error::Config(format!("prior overrides need {p} values")));
            }
            let cov = DMatrix::from_diagonal(&DVector::from_iterator(p, std.iter().map(|s| s * s)));
            let prior = GaussianPrior::new(DVector::from_vec(mean), cov).map_err(cfg)?;
            m = m.with_prior(prior).map_err(cfg)?;
        }
        Ok(m)
    }

    pub fn sampler_config(&self, model: &ModelSpec) -> Result<SamplerConfig> {
        let mut s = SamplerConfig::slice_for(model);
        if let Some(k) = self.sampler {
            s.kind = k;
        }
        if let Some(v) = &self.rw_step_std {
            s.rw_step_std = v.clone();
        }
        if let Some(v) = &self.slice_width {
            s.slice_width = v.clone();
        }
        if let Some(v) = self.slice_max_steps {
            s.slice_max_steps = v;
        }
        if let Some(v) = self.mh_steps_per_call {
            s.mh_steps_per_call = v;
        }
        s.validate(model.param_dim()).map_err(|e| Error::Config(format!("sampler settings: {e}")))?;
        Ok(s)
    }

    pub fn filter_kind(&self, model: &ModelSpec) -> Result<FilterKind> {
        Ok(match self.filter_kind_name()? {
            "sir" => FilterKind::Sir { theta: model.theta_true().as_slice().to_vec() },
            "sir_augmented" => FilterKind::SirAugmented,
            "liu_west" => FilterKind::LiuWest { rho: self.rho },
            "storvik" => FilterKind::Storvik,
            _ => FilterKind::Epf { order: self.order, sampler: self.sampler_config(model)?, center: None },
        })
    }

    pub fn filter_settings(&self) -> FilterSettings {
        FilterSettings { particles: self.particles, ess_threshold: self.ess_threshold }
    }
}
