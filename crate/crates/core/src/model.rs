//! State-space model abstraction.
//!
//! Every model has the form
//!
//! ```text
//! x_t = f_θ(x_{t-1}) + v_t      (transition, parameterized by θ)
//! y_t = x_t + w_t,  w_t ~ N(0, σ_obs² I)
//! ```
//!
//! Only the transition depends on θ. The exact laws here are the oracle;
//! polynomial approximations of them live in [`crate::suffstats`] and are
//! mirrored by the direct evaluators at the bottom of this file.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::poly::{log1p_sq_coefficients, logistic_coefficients};
use crate::rng::{self, Purpose};
use crate::{fmt_f64, Error, Result};

/// Maps `x_{t-1}` to the `p × d` matrix `F_t` of a Gaussian system process
/// `x_t = F_tᵀ θ + ε_t`.
pub type FeatureMap = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidArgument(format!("interval [{lo}, {hi}] is empty or infinite")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Multivariate normal prior over θ.
#[derive(Clone, Debug)]
pub struct GaussianPrior {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
    precision: DMatrix<f64>,
    chol_lower: DMatrix<f64>,
    log_norm: f64,
}

impl GaussianPrior {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let p = mean.len();
        if cov.nrows() != p || cov.ncols() != p {
            return Err(Error::DimensionMismatch { expected: p, got: cov.nrows() });
        }
        if (&cov - cov.transpose()).amax() > 1e-12 * cov.amax().max(1.0) {
            return Err(Error::InvalidArgument("prior covariance is not symmetric".into()));
        }
        let chol = cov
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidArgument("prior covariance is not positive definite".into()))?;
        let log_det: f64 = chol.l().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
        Ok(Self {
            precision: chol.inverse(),
            chol_lower: chol.l(),
            log_norm: -(p as f64) * LN_SQRT_2PI - 0.5 * log_det,
            mean,
            cov,
        })
    }

    pub fn isotropic(mean: &[f64], std: f64) -> Result<Self> {
        let p = mean.len();
        Self::new(DVector::from_column_slice(mean), DMatrix::identity(p, p) * (std * std))
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }

    /// Marginal standard deviations.
    pub fn std(&self) -> Vec<f64> {
        self.cov.diagonal().iter().map(|v| v.sqrt()).collect()
    }

    pub fn log_density(&self, theta: &[f64]) -> f64 {
        let p = self.dim();
        let mut quad = 0.0;
        for i in 0..p {
            let di = theta[i] - self.mean[i];
            for j in 0..p {
                quad += di * self.precision[(i, j)] * (theta[j] - self.mean[j]);
            }
        }
        self.log_norm - 0.5 * quad
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let z = DVector::from_fn(self.dim(), |_, _| rng.sample::<f64, _>(StandardNormal));
        &self.mean + &self.chol_lower * z
    }
}

/// Deterministic part `f_θ` of the transition.
#[derive(Clone)]
pub enum Dynamics {
    /// `sin(θ x)`
    Sin,
    /// `a x`
    Autoregressive,
    /// Smooth-transition AR(1): `a1 x (1 - G) + b1 x G` with
    /// `G = 1 / (1 + exp(-γ (x - c)))` and θ = (γ, c).
    Star { a1: f64, b1: f64 },
    /// `F(x)ᵀ θ`, linear in θ.
    GaussianSystem { features: FeatureMap },
}

impl fmt::Debug for Dynamics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dynamics::Sin => write!(f, "Sin"),
            Dynamics::Autoregressive => write!(f, "Autoregressive"),
            Dynamics::Star { a1, b1 } => write!(f, "Star {{ a1: {a1}, b1: {b1} }}"),
            Dynamics::GaussianSystem { .. } => write!(f, "GaussianSystem"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GaussianNoise {
    cov: DMatrix<f64>,
    precision: DMatrix<f64>,
    chol_lower: DMatrix<f64>,
    log_norm: f64,
}

impl GaussianNoise {
    pub fn new(cov: DMatrix<f64>) -> Result<Self> {
        let prior = GaussianPrior::new(DVector::zeros(cov.nrows()), cov)
            .map_err(|_| Error::InvalidArgument("noise covariance must be symmetric positive definite".into()))?;
        Ok(Self {
            cov: prior.cov,
            precision: prior.precision,
            chol_lower: prior.chol_lower,
            log_norm: prior.log_norm,
        })
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn precision(&self) -> &DMatrix<f64> {
        &self.precision
    }
}

#[derive(Clone, Debug)]
pub enum TransitionNoise {
    Gaussian(GaussianNoise),
    /// Cauchy(0, scale), scalar states only.
    Cauchy { scale: f64 },
}

/// A concrete state-space model. Immutable once built.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    name: String,
    dynamics: Dynamics,
    noise: TransitionNoise,
    param_dim: usize,
    state_dim: usize,
    theta_true: DVector<f64>,
    prior: GaussianPrior,
    support: Vec<Interval>,
    obs_noise_std: f64,
    x0: DVector<f64>,
}

impl ModelSpec {
    pub fn new(
        name: impl Into<String>,
        dynamics: Dynamics,
        noise: TransitionNoise,
        theta_true: DVector<f64>,
        prior: GaussianPrior,
        support: Vec<Interval>,
        obs_noise_std: f64,
    ) -> Result<Self> {
        let state_dim = match &noise {
            TransitionNoise::Gaussian(g) => g.cov.nrows(),
            TransitionNoise::Cauchy { .. } => 1,
        };
        let model = Self {
            name: name.into(),
            param_dim: theta_true.len(),
            state_dim,
            x0: DVector::zeros(state_dim),
            dynamics,
            noise,
            theta_true,
            prior,
            support,
            obs_noise_std,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let p = self.param_dim;
        if p == 0 || self.state_dim == 0 {
            return Err(Error::InvalidArgument("param_dim and state_dim must be positive".into()));
        }
        if self.prior.dim() != p {
            return Err(Error::DimensionMismatch { expected: p, got: self.prior.dim() });
        }
        if self.support.len() != p {
            return Err(Error::DimensionMismatch { expected: p, got: self.support.len() });
        }
        for (iv, &v) in self.support.iter().zip(self.theta_true.iter()) {
            if !(iv.lo < iv.hi) || !iv.contains(v) {
                return Err(Error::InvalidArgument(format!(
                    "support [{}, {}] must be non-empty and contain the true value {v}",
                    iv.lo, iv.hi
                )));
            }
        }
        if !(self.obs_noise_std > 0.0 && self.obs_noise_std.is_finite()) {
            return Err(Error::InvalidArgument("obs_noise_std must be positive".into()));
        }
        if self.x0.len() != self.state_dim {
            return Err(Error::DimensionMismatch { expected: self.state_dim, got: self.x0.len() });
        }
        let expected_p = match &self.dynamics {
            Dynamics::Sin | Dynamics::Autoregressive => Some(1),
            Dynamics::Star { .. } => Some(2),
            Dynamics::GaussianSystem { features } => {
                let f = features(&self.x0);
                if f.ncols() != self.state_dim {
                    return Err(Error::DimensionMismatch { expected: self.state_dim, got: f.ncols() });
                }
                Some(f.nrows())
            }
        };
        if let Some(e) = expected_p {
            if e != p {
                return Err(Error::DimensionMismatch { expected: e, got: p });
            }
        }
        match (&self.noise, &self.dynamics) {
            (TransitionNoise::Cauchy { scale }, d) => {
                if !(*scale > 0.0) {
                    return Err(Error::InvalidArgument("Cauchy scale must be positive".into()));
                }
                if matches!(d, Dynamics::GaussianSystem { .. }) {
                    return Err(Error::InvalidArgument("Gaussian system needs Gaussian noise".into()));
                }
            }
            (TransitionNoise::Gaussian(_), Dynamics::GaussianSystem { .. }) => {}
            (TransitionNoise::Gaussian(_), _) if self.state_dim != 1 => {
                return Err(Error::InvalidArgument("scalar dynamics need a scalar state".into()));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_x0(mut self, x0: DVector<f64>) -> Result<Self> {
        self.x0 = x0;
        self.validate()?;
        Ok(self)
    }

    pub fn with_theta_true(mut self, theta: DVector<f64>) -> Result<Self> {
        self.theta_true = theta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_obs_noise_std(mut self, std: f64) -> Result<Self> {
        self.obs_noise_std = std;
        self.validate()?;
        Ok(self)
    }

    pub fn with_prior(mut self, prior: GaussianPrior) -> Result<Self> {
        self.prior = prior;
        self.validate()?;
        Ok(self)
    }

    pub fn with_support(mut self, support: Vec<Interval>) -> Result<Self> {
        self.support = support;
        self.validate()?;
        Ok(self)
    }

    /// Replaces σ (Gaussian, scalar state) or the Cauchy scale.
    pub fn with_trans_noise_param(mut self, value: f64) -> Result<Self> {
        if !(value > 0.0 && value.is_finite()) {
            return Err(Error::InvalidArgument("transition noise parameter must be positive".into()));
        }
        self.noise = match self.noise {
            TransitionNoise::Cauchy { .. } => TransitionNoise::Cauchy { scale: value },
            TransitionNoise::Gaussian(_) if self.state_dim == 1 => {
                TransitionNoise::Gaussian(GaussianNoise::new(DMatrix::from_element(1, 1, value * value))?)
            }
            TransitionNoise::Gaussian(_) => {
                return Err(Error::Unsupported("scalar noise override on a vector state".into()))
            }
        };
        self.validate()?;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn noise(&self) -> &TransitionNoise {
        &self.noise
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn theta_true(&self) -> &DVector<f64> {
        &self.theta_true
    }

    pub fn prior(&self) -> &GaussianPrior {
        &self.prior
    }

    pub fn support(&self) -> &[Interval] {
        &self.support
    }

    pub fn obs_noise_std(&self) -> f64 {
        self.obs_noise_std
    }

    pub fn x0(&self) -> &DVector<f64> {
        &self.x0
    }

    /// σ for scalar Gaussian noise, the scale γ for Cauchy noise.
    pub fn trans_noise_param(&self) -> f64 {
        match &self.noise {
            TransitionNoise::Gaussian(g) => g.cov[(0, 0)].sqrt(),
            TransitionNoise::Cauchy { scale } => *scale,
        }
    }

    pub fn in_support(&self, theta: &[f64]) -> bool {
        theta.len() == self.param_dim && self.support.iter().zip(theta).all(|(iv, &v)| iv.contains(v))
    }

    /// `F(x_{t-1})` when the model is a Gaussian system process.
    pub fn gaussian_features(&self, x_prev: &DVector<f64>) -> Option<DMatrix<f64>> {
        match &self.dynamics {
            Dynamics::GaussianSystem { features } => Some(features(x_prev)),
            _ => None,
        }
    }

    pub fn is_gaussian_system(&self) -> bool {
        matches!(self.dynamics, Dynamics::GaussianSystem { .. })
    }

    fn check_dims(&self, theta: &[f64], x: &[f64]) -> Result<()> {
        if theta.len() != self.param_dim {
            return Err(Error::DimensionMismatch { expected: self.param_dim, got: theta.len() });
        }
        if x.len() != self.state_dim {
            return Err(Error::DimensionMismatch { expected: self.state_dim, got: x.len() });
        }
        Ok(())
    }

    pub fn transition_mean(&self, theta: &[f64], x_prev: &[f64]) -> Result<DVector<f64>> {
        self.check_dims(theta, x_prev)?;
        Ok(self.mean_unchecked(theta, x_prev))
    }

    fn mean_unchecked(&self, theta: &[f64], x_prev: &[f64]) -> DVector<f64> {
        match &self.dynamics {
            Dynamics::Sin => DVector::from_element(1, (theta[0] * x_prev[0]).sin()),
            Dynamics::Autoregressive => DVector::from_element(1, theta[0] * x_prev[0]),
            Dynamics::Star { a1, b1 } => {
                let x = x_prev[0];
                let g = logistic(theta[0] * (x - theta[1]));
                DVector::from_element(1, a1 * x * (1.0 - g) + b1 * x * g)
            }
            Dynamics::GaussianSystem { features } => {
                let f = features(&DVector::from_column_slice(x_prev));
                f.tr_mul(&DVector::from_column_slice(theta))
            }
        }
    }

    /// Exact `log p(x_next | x_prev, θ)`.
    pub fn transition_log_density(&self, theta: &[f64], x_prev: &[f64], x_next: &[f64]) -> Result<f64> {
        self.check_dims(theta, x_prev)?;
        if x_next.len() != self.state_dim {
            return Err(Error::DimensionMismatch { expected: self.state_dim, got: x_next.len() });
        }
        Ok(self.transition_log_density_unchecked(theta, x_prev, x_next))
    }

    pub(crate) fn transition_log_density_unchecked(&self, theta: &[f64], x_prev: &[f64], x_next: &[f64]) -> f64 {
        let mean = self.mean_unchecked(theta, x_prev);
        match &self.noise {
            TransitionNoise::Gaussian(g) => {
                let v = DVector::from_column_slice(x_next) - mean;
                g.log_norm - 0.5 * v.dot(&(&g.precision * &v))
            }
            TransitionNoise::Cauchy { scale } => {
                let w = (x_next[0] - mean[0]) / scale;
                -(PI * scale).ln() - (w * w).ln_1p()
            }
        }
    }

    /// Gaussian log-likelihood of `y` given `x` under `y = x + N(0, σ_obs² I)`.
    pub fn observation_log_density(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        let s = self.obs_noise_std;
        let norm = -(s.ln() + LN_SQRT_2PI);
        x.iter()
            .zip(y)
            .map(|(xi, yi)| {
                let r = (yi - xi) / s;
                norm - 0.5 * r * r
            })
            .sum()
    }

    pub fn sample_transition<R: Rng + ?Sized>(&self, theta: &[f64], x_prev: &[f64], rng: &mut R) -> DVector<f64> {
        let mean = self.mean_unchecked(theta, x_prev);
        match &self.noise {
            TransitionNoise::Gaussian(g) => {
                let z = DVector::from_fn(self.state_dim, |_, _| rng.sample::<f64, _>(StandardNormal));
                mean + &g.chol_lower * z
            }
            TransitionNoise::Cauchy { scale } => {
                // inverse CDF; u in (0, 1) keeps tan finite
                let u: f64 = rng.random_range(f64::EPSILON..1.0);
                DVector::from_element(1, mean[0] + scale * (PI * (u - 0.5)).tan())
            }
        }
    }

    pub fn sample_observation<R: Rng + ?Sized>(&self, x: &DVector<f64>, rng: &mut R) -> DVector<f64> {
        x.map(|xi| xi + self.obs_noise_std * rng.sample::<f64, _>(StandardNormal))
    }

    /// Forward-simulates `T` steps from `x_0` at the true parameter.
    pub fn simulate(&self, steps: usize, seed: u64) -> Result<Trajectory> {
        if steps < 1 {
            return Err(Error::InvalidArgument("simulate needs T >= 1".into()));
        }
        let mut rng = rng::stream(seed, Purpose::Simulate, 0, 0);
        let theta = self.theta_true.as_slice();
        let mut states = Vec::with_capacity(steps + 1);
        let mut observations = Vec::with_capacity(steps + 1);
        let mut x = self.x0.clone();
        observations.push(self.sample_observation(&x, &mut rng));
        states.push(x.clone());
        for _ in 0..steps {
            x = self.sample_transition(theta, x.as_slice(), &mut rng);
            observations.push(self.sample_observation(&x, &mut rng));
            states.push(x.clone());
        }
        Ok(Trajectory { states, observations, seed: Some(seed) })
    }

    /// Order-`order` Taylor approximation of `f_θ(x_prev)` evaluated
    /// directly, without building polynomials. `center` is the expansion
    /// point in θ for the sinusoid; other models expand in their natural
    /// variable and ignore it.
    pub fn approx_transition_mean(
        &self,
        theta: &[f64],
        x_prev: &[f64],
        order: usize,
        center: &[f64],
    ) -> Result<DVector<f64>> {
        self.check_dims(theta, x_prev)?;
        match &self.dynamics {
            Dynamics::Sin => {
                let x = x_prev[0];
                let d = theta[0] - center[0];
                let phase = center[0] * x;
                let mut acc = 0.0;
                let mut term = 1.0; // x^i d^i / i!
                for i in 0..=order {
                    if i > 0 {
                        term *= x * d / i as f64;
                    }
                    acc += term * (phase + i as f64 * FRAC_PI_2).sin();
                }
                Ok(DVector::from_element(1, acc))
            }
            Dynamics::Star { a1, b1 } => {
                let x = x_prev[0];
                let u = theta[0] * (theta[1] - x);
                let coeffs = logistic_coefficients(order)?;
                // G = σ(-u)
                let g: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, c)| if k % 2 == 1 { -c } else { *c } * u.powi(k as i32))
                    .sum();
                Ok(DVector::from_element(1, a1 * x * (1.0 - g) + b1 * x * g))
            }
            Dynamics::Autoregressive | Dynamics::GaussianSystem { .. } => Ok(self.mean_unchecked(theta, x_prev)),
        }
    }

    /// θ-dependent part of `-log p̂(x_next | x_prev, θ)` for the order-`order`
    /// approximation; this is the quantity the log-polynomial tracker
    /// accumulates. Gaussian noise: `½ f̂ᵀ P f̂ - x_nextᵀ P f̂` with `P` the
    /// noise precision. Cauchy noise: the truncated series of `log(1 + w²)`
    /// at `w = (x_next - a x_prev) / γ`.
    pub fn approx_neg_log_kernel(
        &self,
        theta: &[f64],
        x_prev: &[f64],
        x_next: &[f64],
        order: usize,
        center: &[f64],
    ) -> Result<f64> {
        match &self.noise {
            TransitionNoise::Gaussian(g) => {
                let f = self.approx_transition_mean(theta, x_prev, order, center)?;
                let pf = &g.precision * &f;
                Ok(0.5 * f.dot(&pf) - DVector::from_column_slice(x_next).dot(&pf))
            }
            TransitionNoise::Cauchy { scale } => {
                self.check_dims(theta, x_prev)?;
                let mean = self.mean_unchecked(theta, x_prev);
                let w = (x_next[0] - mean[0]) / scale;
                let coeffs = log1p_sq_coefficients(order)?;
                Ok(coeffs.iter().enumerate().map(|(k, c)| c * w.powi(2 * (k as i32 + 1))).sum())
            }
        }
    }

    /// Full approximate log transition density (normalizer of the exact
    /// noise law kept, so it is comparable to [`Self::transition_log_density`]).
    pub fn approx_transition_log_density(
        &self,
        theta: &[f64],
        x_prev: &[f64],
        x_next: &[f64],
        order: usize,
        center: &[f64],
    ) -> Result<f64> {
        let kernel = self.approx_neg_log_kernel(theta, x_prev, x_next, order, center)?;
        Ok(match &self.noise {
            TransitionNoise::Gaussian(g) => {
                let x = DVector::from_column_slice(x_next);
                g.log_norm - 0.5 * x.dot(&(&g.precision * &x)) - kernel
            }
            TransitionNoise::Cauchy { scale } => -(PI * scale).ln() - kernel,
        })
    }
}

/// `1 / (1 + exp(-z))`.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Simulated (or loaded) states and observations, indices `0..=T`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub states: Vec<DVector<f64>>,
    pub observations: Vec<DVector<f64>>,
    pub seed: Option<u64>,
}

impl Trajectory {
    /// Number of time indices, `T + 1`.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Number of transitions, `T`.
    pub fn steps(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.states.first().map_or(1, |s| s.len());
        if d == 1 {
            writeln!(w, "t,x,y")?;
        } else {
            let xs: Vec<String> = (1..=d).map(|j| format!("x_{j}")).collect();
            let ys: Vec<String> = (1..=d).map(|j| format!("y_{j}")).collect();
            writeln!(w, "t,{},{}", xs.join(","), ys.join(","))?;
        }
        for (t, (x, y)) in self.states.iter().zip(&self.observations).enumerate() {
            let mut row = t.to_string();
            for v in x.iter().chain(y.iter()) {
                row.push(',');
                row.push_str(&fmt_f64(*v));
            }
            writeln!(w, "{row}")?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_csv(file)
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty trajectory file".into()))??;
        let cols: Vec<&str> = header.trim().split(',').collect();
        if cols.first() != Some(&"t") || cols.len() < 3 || !(cols.len() - 1).is_multiple_of(2) {
            return Err(Error::Parse(format!("bad trajectory header `{header}`")));
        }
        let d = (cols.len() - 1) / 2;
        let mut states = Vec::new();
        let mut observations = Vec::new();
        for (row, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let vals: Vec<&str> = line.trim().split(',').collect();
            if vals.len() != cols.len() {
                return Err(Error::Parse(format!("row {} has {} fields, expected {}", row + 1, vals.len(), cols.len())));
            }
            let t: usize = vals[0].parse().map_err(|_| Error::Parse(format!("bad t `{}`", vals[0])))?;
            if t != states.len() {
                return Err(Error::Parse(format!("expected t = {}, found {t}", states.len())));
            }
            let nums = vals[1..]
                .iter()
                .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}`"))))
                .collect::<Result<Vec<f64>>>()?;
            states.push(DVector::from_column_slice(&nums[..d]));
            observations.push(DVector::from_column_slice(&nums[d..]));
        }
        if states.is_empty() {
            return Err(Error::Parse("trajectory has no rows".into()));
        }
        Ok(Self { states, observations, seed: None })
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::read_csv(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
