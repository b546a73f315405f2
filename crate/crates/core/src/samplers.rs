//! Parameter samplers: coordinate-wise slice sampling and random-walk
//! Metropolis–Hastings on a truncated log density, and exact draws from a
//! Gaussian statistic.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::model::{Interval, ModelSpec};
use crate::suffstats::{GaussianSuffStat, LogPolyDensity};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplerKind {
    Slice,
    Rwmh,
    /// Exact draw from the Gaussian the density reduces to; only valid when
    /// the log density is quadratic.
    ExactGaussian,
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "slice" => Ok(Self::Slice),
            "rwmh" => Ok(Self::Rwmh),
            "exact-gaussian" | "exact_gaussian" => Ok(Self::ExactGaussian),
            other => Err(Error::Config(format!("unknown sampler `{other}` (expected slice, rwmh or exact-gaussian)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerConfig {
    pub kind: SamplerKind,
    /// Random-walk proposal std, per dimension.
    pub rw_step_std: Vec<f64>,
    /// Initial slice bracket width, per dimension.
    pub slice_width: Vec<f64>,
    /// Step-out budget per coordinate.
    pub slice_max_steps: usize,
    pub mh_steps_per_call: usize,
}

impl SamplerConfig {
    fn defaults(model: &ModelSpec, kind: SamplerKind) -> Self {
        Self {
            kind,
            rw_step_std: vec![0.05; model.param_dim()],
            slice_width: model.prior().std(),
            slice_max_steps: 50,
            mh_steps_per_call: 1,
        }
    }

    /// One slice scan per call, bracket width = prior std.
    pub fn slice_for(model: &ModelSpec) -> Self {
        Self::defaults(model, SamplerKind::Slice)
    }

    /// One MH step per call with proposal std 0.05 in every dimension.
    pub fn rwmh_for(model: &ModelSpec) -> Self {
        Self::defaults(model, SamplerKind::Rwmh)
    }

    pub fn exact_gaussian_for(model: &ModelSpec) -> Self {
        Self::defaults(model, SamplerKind::ExactGaussian)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.rw_step_std.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: self.rw_step_std.len() });
        }
        if self.slice_width.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: self.slice_width.len() });
        }
        if self.rw_step_std.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::InvalidArgument("rw_step_std must be finite and non-negative".into()));
        }
        if self.slice_width.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidArgument("slice_width must be positive".into()));
        }
        if self.slice_max_steps < 1 || self.mh_steps_per_call < 1 {
            return Err(Error::InvalidArgument("slice_max_steps and mh_steps_per_call must be >= 1".into()));
        }
        Ok(())
    }

    /// Whether every call yields a fresh value almost surely (an MH chain
    /// can reject and return its starting point).
    pub fn is_continuous(&self) -> bool {
        self.kind != SamplerKind::Rwmh
    }
}

/// An unnormalized log density restricted to a box.
pub trait LogTarget {
    fn dim(&self) -> usize;
    fn support(&self) -> &[Interval];
    /// `-inf` outside the support.
    fn log_density(&self, theta: &[f64]) -> f64;
}

impl LogTarget for LogPolyDensity {
    fn dim(&self) -> usize {
        self.space().dim()
    }

    fn support(&self) -> &[Interval] {
        &self.space().support
    }

    fn log_density(&self, theta: &[f64]) -> f64 {
        LogPolyDensity::log_density(self, theta)
    }
}

/// Exact draw from N(m, C). Positive semidefinite `C` is handled through
/// an eigendecomposition when Cholesky fails; `C = 0` returns `m`.
pub fn sample_gaussian<R: Rng + ?Sized>(s: &GaussianSuffStat, rng: &mut R) -> Result<DVector<f64>> {
    let p = s.dim();
    let z = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
    if let Some(chol) = s.cov.clone().cholesky() {
        return Ok(&s.mean + chol.l() * z);
    }
    let eig = s.cov.clone().symmetric_eigen();
    let scale = eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
    if eig.eigenvalues.iter().any(|&l| l < -1e-10 * scale) {
        return Err(Error::NotPositiveSemidefinite);
    }
    let root = eig.eigenvalues.map(|l| l.max(0.0).sqrt());
    Ok(&s.mean + &eig.eigenvectors * root.component_mul(&z))
}

fn check_init<T: LogTarget + ?Sized>(d: &T, theta_init: &[f64]) -> Result<f64> {
    if theta_init.len() != d.dim() {
        return Err(Error::DimensionMismatch { expected: d.dim(), got: theta_init.len() });
    }
    let lp = d.log_density(theta_init);
    if lp == f64::NEG_INFINITY {
        return Err(Error::SupportViolation);
    }
    if !lp.is_finite() {
        return Err(Error::NonFiniteDensity);
    }
    Ok(lp)
}

const MAX_SHRINK: usize = 1000;

/// One scan of univariate slice updates over every coordinate, with
/// randomly positioned step-out (bounded by `slice_max_steps`) and
/// shrinkage. Brackets are clipped to the support.
pub fn sample_slice<T, R>(d: &T, theta_init: &[f64], cfg: &SamplerConfig, rng: &mut R) -> Result<Vec<f64>>
where
    T: LogTarget + ?Sized,
    R: Rng + ?Sized,
{
    let mut lp = check_init(d, theta_init)?;
    let mut theta = theta_init.to_vec();
    let support = d.support();
    for j in 0..theta.len() {
        let iv = support[j];
        let w = cfg.slice_width[j];
        let level = lp - rng.sample::<f64, _>(Exp1);
        let x0 = theta[j];
        let at = |v: f64, theta: &mut Vec<f64>| {
            theta[j] = v;
            d.log_density(theta)
        };

        let mut lo = x0 - w * rng.random::<f64>();
        let mut hi = lo + w;
        let budget = cfg.slice_max_steps;
        let mut left = (budget as f64 * rng.random::<f64>()).floor() as usize;
        let mut right = budget - 1 - left;
        while left > 0 && lo > iv.lo && at(lo, &mut theta) > level {
            lo -= w;
            left -= 1;
        }
        while right > 0 && hi < iv.hi && at(hi, &mut theta) > level {
            hi += w;
            right -= 1;
        }
        if (left == 0 || right == 0) && lo > iv.lo && hi < iv.hi {
            log::debug!("slice step-out budget used up in dim {j}; bracket width {w} may be too small");
        }
        lo = lo.max(iv.lo);
        hi = hi.min(iv.hi);

        let mut accepted = None;
        for _ in 0..MAX_SHRINK {
            let cand = lo + (hi - lo) * rng.random::<f64>();
            let lc = at(cand, &mut theta);
            if lc > level {
                accepted = Some((cand, lc));
                break;
            }
            if cand < x0 {
                lo = cand;
            } else {
                hi = cand;
            }
            if hi - lo <= f64::EPSILON * x0.abs().max(1.0) {
                accepted = Some((x0, at(x0, &mut theta)));
                break;
            }
        }
        let (v, l) = accepted.ok_or(Error::ShrinkExhausted(MAX_SHRINK))?;
        theta[j] = v;
        lp = l;
    }
    Ok(theta)
}

/// `mh_steps_per_call` Gaussian random-walk Metropolis steps. Proposals
/// outside the support are rejected.
pub fn sample_rwmh<T, R>(d: &T, theta_init: &[f64], cfg: &SamplerConfig, rng: &mut R) -> Result<Vec<f64>>
where
    T: LogTarget + ?Sized,
    R: Rng + ?Sized,
{
    let mut lp = check_init(d, theta_init)?;
    let mut theta = theta_init.to_vec();
    let mut prop = theta.clone();
    for _ in 0..cfg.mh_steps_per_call {
        for (j, p) in prop.iter_mut().enumerate() {
            *p = theta[j] + cfg.rw_step_std[j] * rng.sample::<f64, _>(StandardNormal);
        }
        let u: f64 = rng.random();
        let lq = d.log_density(&prop);
        if lq > f64::NEG_INFINITY && u.ln() < lq - lp {
            theta.copy_from_slice(&prop);
            lp = lq;
        }
    }
    Ok(theta)
}

/// Dispatches on `cfg.kind`.
pub fn sample<R: Rng + ?Sized>(d: &LogPolyDensity, theta_init: &[f64], cfg: &SamplerConfig, rng: &mut R) -> Result<Vec<f64>> {
    match cfg.kind {
        SamplerKind::Slice => sample_slice(d, theta_init, cfg, rng),
        SamplerKind::Rwmh => sample_rwmh(d, theta_init, cfg, rng),
        SamplerKind::ExactGaussian => {
            let g = d
                .as_gaussian()
                .ok_or_else(|| Error::Unsupported("exact-gaussian sampling needs a quadratic log density".into()))?;
            Ok(sample_gaussian(&g, rng)?.as_slice().to_vec())
        }
    }
}
