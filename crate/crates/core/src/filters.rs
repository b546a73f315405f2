//! Particle filters for joint state and static-parameter estimation.
//!
//! All five algorithms share one engine. At step `t` each particle
//!
//! 1. refreshes its parameter (kept fixed, perturbed, or drawn from its
//!    own posterior statistic),
//! 2. propagates its state through the exact transition,
//! 3. is weighted by the observation likelihood,
//! 4. folds `(x_{t-1}, x_t)` into its statistic,
//!
//! and then the population is resampled jointly with the statistics.
//! Observations are indexed `0..=T`; `x_0` is known, so `y_0` is unused.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;

use crate::model::{ModelSpec, TransitionNoise};
use crate::rng::{stream, Purpose};
use crate::samplers::{self, sample_gaussian, SamplerConfig};
use crate::suffstats::{GaussianSuffStat, LogPolyDensity, ParamSpace};
use crate::{fmt_f64, Error, Result};

/// Per-particle summary of `p(θ | x_{0:t})`.
#[derive(Clone, Debug)]
pub enum ParticleStat {
    None,
    Gaussian(GaussianSuffStat),
    LogPoly(LogPolyDensity),
}

impl ParticleStat {
    /// Unnormalized log posterior at θ; `-inf` when the particle carries no
    /// statistic.
    pub fn log_density(&self, theta: &[f64]) -> f64 {
        match self {
            ParticleStat::None => f64::NEG_INFINITY,
            ParticleStat::Gaussian(g) => g.log_density(theta),
            ParticleStat::LogPoly(d) => d.log_density(theta),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Particle {
    pub x: DVector<f64>,
    pub theta: DVector<f64>,
    pub stat: ParticleStat,
    /// Normalized weight.
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    pub theta_mean: Vec<f64>,
    pub theta_std: Vec<f64>,
    pub x_mean: Vec<f64>,
    pub ess: f64,
    /// Distinct parameter vectors among the weighted particles, counted
    /// before resampling.
    pub unique_theta: usize,
}

/// One record per step `t = 1..=T`. Moments are weighted and taken
/// before resampling.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FilterOutput {
    pub records: Vec<StepRecord>,
}

impl FilterOutput {
    pub fn last(&self) -> Option<&StepRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let Some(first) = self.records.first() else {
            return Err(Error::InvalidArgument("empty filter output".into()));
        };
        let p = first.theta_mean.len();
        let d = first.x_mean.len();
        let mut header = vec!["t".to_string()];
        header.extend((1..=p).map(|j| format!("theta_mean_{j}")));
        header.extend((1..=p).map(|j| format!("theta_std_{j}")));
        if d == 1 {
            header.push("x_mean".into());
        } else {
            header.extend((1..=d).map(|j| format!("x_mean_{j}")));
        }
        header.push("ess".into());
        header.push("unique_theta".into());
        writeln!(w, "{}", header.join(","))?;
        for r in &self.records {
            let mut row = r.t.to_string();
            for v in r.theta_mean.iter().chain(&r.theta_std).chain(&r.x_mean).chain(std::iter::once(&r.ess)) {
                row.push(',');
                row.push_str(&fmt_f64(*v));
            }
            row.push(',');
            row.push_str(&r.unique_theta.to_string());
            writeln!(w, "{row}")?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

#[derive(Clone, Debug)]
pub struct FilterRun {
    pub output: FilterOutput,
    /// Population after the final step.
    pub particles: Vec<Particle>,
    /// Wall time of each step in seconds.
    pub step_seconds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilterSettings {
    pub particles: usize,
    /// Resample only when ESS < threshold · N. `None` resamples every step.
    pub ess_threshold: Option<f64>,
}

impl FilterSettings {
    pub fn new(particles: usize) -> Self {
        Self { particles, ess_threshold: None }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FilterKind {
    /// Bootstrap filter with the parameter known.
    Sir { theta: Vec<f64> },
    /// Parameter drawn once from the prior and carried as a static state.
    SirAugmented,
    /// Augmented SIR with shrink-and-jitter parameter moves.
    LiuWest { rho: f64 },
    /// Exact conjugate statistics; Gaussian system processes only.
    Storvik,
    Epf { order: usize, sampler: SamplerConfig, center: Option<Vec<f64>> },
}

impl FilterKind {
    pub fn name(&self) -> &'static str {
        match self {
            FilterKind::Sir { .. } => "sir",
            FilterKind::SirAugmented => "sir_augmented",
            FilterKind::LiuWest { .. } => "liu_west",
            FilterKind::Storvik => "storvik",
            FilterKind::Epf { .. } => "epf",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpfConfig {
    pub particles: usize,
    pub order: usize,
    pub sampler: SamplerConfig,
    /// Taylor center; zero by default.
    pub center: Option<Vec<f64>>,
    pub ess_threshold: Option<f64>,
}

impl EpfConfig {
    pub fn new(particles: usize, order: usize, sampler: SamplerConfig) -> Self {
        Self { particles, order, sampler, center: None, ess_threshold: None }
    }

    fn split(&self) -> (FilterKind, FilterSettings) {
        (
            FilterKind::Epf { order: self.order, sampler: self.sampler.clone(), center: self.center.clone() },
            FilterSettings { particles: self.particles, ess_threshold: self.ess_threshold },
        )
    }
}

/// Indices of `n` multinomial draws proportional to `weights`.
pub fn resample_indices<R: Rng + ?Sized>(weights: &[f64], n: usize, rng: &mut R) -> Result<Vec<usize>> {
    if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(Error::InvalidArgument("weights must be finite and non-negative".into()));
    }
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in weights {
        acc += w;
        cdf.push(acc);
    }
    if acc <= 0.0 {
        return Err(Error::WeightUnderflow);
    }
    let last = weights.len() - 1;
    Ok((0..n)
        .map(|_| {
            let u = rng.random::<f64>() * acc;
            cdf.partition_point(|&c| c <= u).min(last)
        })
        .collect())
}

/// Multinomial resampling; states, parameters and statistics travel
/// together and every output weight is `1/N`.
pub fn resample_multinomial<R: Rng + ?Sized>(particles: &[Particle], rng: &mut R) -> Result<Vec<Particle>> {
    let weights: Vec<f64> = particles.iter().map(|p| p.weight).collect();
    let n = particles.len();
    let idx = resample_indices(&weights, n, rng)?;
    Ok(idx
        .into_iter()
        .map(|i| Particle { weight: 1.0 / n as f64, ..particles[i].clone() })
        .collect())
}

pub fn run_sir(model: &ModelSpec, ys: &[DVector<f64>], n: usize, seed: u64, theta_known: &[f64]) -> Result<FilterRun> {
    run_filter(model, ys, &FilterKind::Sir { theta: theta_known.to_vec() }, &FilterSettings::new(n), seed)
}

pub fn run_sir_augmented(model: &ModelSpec, ys: &[DVector<f64>], n: usize, seed: u64) -> Result<FilterRun> {
    run_filter(model, ys, &FilterKind::SirAugmented, &FilterSettings::new(n), seed)
}

/// Liu–West filter with shrinkage `rho` in `(0, 1]`; `rho = 1` is the
/// augmented SIR filter.
pub fn run_liu_west(model: &ModelSpec, ys: &[DVector<f64>], n: usize, rho: f64, seed: u64) -> Result<FilterRun> {
    run_filter(model, ys, &FilterKind::LiuWest { rho }, &FilterSettings::new(n), seed)
}

pub fn run_storvik(model: &ModelSpec, ys: &[DVector<f64>], n: usize, seed: u64) -> Result<FilterRun> {
    run_filter(model, ys, &FilterKind::Storvik, &FilterSettings::new(n), seed)
}

pub fn run_epf(model: &ModelSpec, ys: &[DVector<f64>], cfg: &EpfConfig, seed: u64) -> Result<FilterRun> {
    let (kind, settings) = cfg.split();
    run_filter(model, ys, &kind, &settings, seed)
}

pub fn run_filter(
    model: &ModelSpec,
    ys: &[DVector<f64>],
    kind: &FilterKind,
    settings: &FilterSettings,
    seed: u64,
) -> Result<FilterRun> {
    run_filter_observed(model, ys, kind, settings, seed, |_, _| {})
}

/// Draw from the prior restricted to the support, by rejection.
fn truncated_prior_draw<R: Rng + ?Sized>(model: &ModelSpec, rng: &mut R) -> Result<DVector<f64>> {
    for _ in 0..10_000 {
        let theta = model.prior().sample(rng);
        if model.in_support(theta.as_slice()) {
            return Ok(theta);
        }
    }
    Err(Error::Precondition("prior puts almost no mass on the parameter support".into()))
}

fn validate(model: &ModelSpec, ys: &[DVector<f64>], kind: &FilterKind, settings: &FilterSettings) -> Result<()> {
    if settings.particles < 1 {
        return Err(Error::InvalidArgument("need at least one particle".into()));
    }
    if let Some(thr) = settings.ess_threshold {
        if !(0.0..=1.0).contains(&thr) {
            return Err(Error::InvalidArgument("ess_threshold must lie in [0, 1]".into()));
        }
    }
    if ys.len() < 2 {
        return Err(Error::InvalidArgument("need observations y_0..y_T with T >= 1".into()));
    }
    if let Some(y) = ys.iter().find(|y| y.len() != model.state_dim()) {
        return Err(Error::DimensionMismatch { expected: model.state_dim(), got: y.len() });
    }
    let p = model.param_dim();
    match kind {
        FilterKind::Sir { theta } if theta.len() != p => Err(Error::DimensionMismatch { expected: p, got: theta.len() }),
        FilterKind::LiuWest { rho } if !(*rho > 0.0 && *rho <= 1.0) => {
            Err(Error::InvalidArgument(format!("rho must lie in (0, 1], got {rho}")))
        }
        FilterKind::Storvik if !model.is_gaussian_system() => Err(Error::Unsupported(format!(
            "the Storvik filter needs a Gaussian system process; `{}` is not one",
            model.name()
        ))),
        FilterKind::Epf { order, sampler, center } => {
            if *order < 1 {
                return Err(Error::InvalidArgument("approximation order must be at least 1".into()));
            }
            if let Some(c) = center {
                if c.len() != p {
                    return Err(Error::DimensionMismatch { expected: p, got: c.len() });
                }
            }
            sampler.validate(p)
        }
        _ => Ok(()),
    }
}

fn initial_particles(model: &ModelSpec, kind: &FilterKind, n: usize, seed: u64) -> Result<Vec<Particle>> {
    let space = match kind {
        FilterKind::Epf { center, .. } => {
            let s = ParamSpace::from_model(model);
            Some(Arc::new(match center {
                Some(c) => s.with_center(c.clone())?,
                None => s,
            }))
        }
        _ => None,
    };
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, Purpose::Init, 0, i as u64);
            let theta = match kind {
                FilterKind::Sir { theta } => DVector::from_column_slice(theta),
                _ => truncated_prior_draw(model, &mut rng)?,
            };
            let stat = match kind {
                FilterKind::Storvik => ParticleStat::Gaussian(GaussianSuffStat::from_prior(model.prior())),
                FilterKind::Epf { order, .. } => {
                    ParticleStat::LogPoly(LogPolyDensity::new(space.clone().expect("epf space"), *order)?)
                }
                _ => ParticleStat::None,
            };
            Ok(Particle { x: model.x0().clone(), theta, stat, weight: 1.0 / n as f64 })
        })
        .collect()
}

/// Weighted per-dimension mean and standard deviation.
fn weighted_moments<'a>(items: impl Iterator<Item = (&'a DVector<f64>, f64)> + Clone, dim: usize) -> (Vec<f64>, Vec<f64>) {
    let mut mean = vec![0.0; dim];
    for (v, w) in items.clone() {
        for j in 0..dim {
            mean[j] += w * v[j];
        }
    }
    let mut var = vec![0.0; dim];
    for (v, w) in items {
        for j in 0..dim {
            var[j] += w * (v[j] - mean[j]).powi(2);
        }
    }
    (mean, var.into_iter().map(f64::sqrt).collect())
}

fn count_unique(particles: &[Particle]) -> usize {
    let mut keys: Vec<Vec<u64>> = particles.iter().map(|p| p.theta.iter().map(|v| v.to_bits()).collect()).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

/// [`run_filter`] with a callback invoked after every step with `t` and the
/// population at the end of that step.
pub fn run_filter_observed<F>(
    model: &ModelSpec,
    ys: &[DVector<f64>],
    kind: &FilterKind,
    settings: &FilterSettings,
    seed: u64,
    mut observer: F,
) -> Result<FilterRun>
where
    F: FnMut(usize, &[Particle]),
{
    validate(model, ys, kind, settings)?;
    let n = settings.particles;
    let p = model.param_dim();
    let q = match model.noise() {
        TransitionNoise::Gaussian(g) => Some(g.cov().clone()),
        TransitionNoise::Cauchy { .. } => None,
    };
    let mut particles = initial_particles(model, kind, n, seed)?;
    let mut log_w = vec![0.0; n];
    let steps = ys.len() - 1;
    let mut output = FilterOutput { records: Vec::with_capacity(steps) };
    let mut step_seconds = Vec::with_capacity(steps);

    for t in 1..=steps {
        let started = Instant::now();
        let y = &ys[t];
        let jitter = match kind {
            FilterKind::LiuWest { rho } => {
                let (mean, std) = weighted_moments(particles.iter().map(|q| (&q.theta, q.weight)), p);
                Some((*rho, mean, std))
            }
            _ => None,
        };

        particles.par_iter_mut().zip(log_w.par_iter_mut()).enumerate().try_for_each(|(i, (part, lw))| -> Result<()> {
            let (t64, i64) = (t as u64, i as u64);
            match (kind, &part.stat) {
                (FilterKind::LiuWest { .. }, _) => {
                    let (rho, mean, std) = jitter.as_ref().expect("liu-west moments");
                    let mut rng = stream(seed, Purpose::Perturb, t64, i64);
                    let shrink = (1.0 - rho * rho).sqrt();
                    for j in 0..p {
                        let z: f64 = rng.sample(rand_distr::StandardNormal);
                        part.theta[j] = rho * part.theta[j] + (1.0 - rho) * mean[j] + shrink * std[j] * z;
                    }
                }
                (FilterKind::Storvik, ParticleStat::Gaussian(g)) => {
                    part.theta = sample_gaussian(g, &mut stream(seed, Purpose::Theta, t64, i64))?;
                }
                (FilterKind::Epf { sampler, .. }, ParticleStat::LogPoly(d)) => {
                    let mut rng = stream(seed, Purpose::Theta, t64, i64);
                    part.theta = DVector::from_vec(samplers::sample(d, part.theta.as_slice(), sampler, &mut rng)?);
                }
                _ => {}
            }

            let mut rng = stream(seed, Purpose::Propagate, t64, i64);
            let x_new = model.sample_transition(part.theta.as_slice(), part.x.as_slice(), &mut rng);
            *lw = part.weight.ln() + model.observation_log_density(x_new.as_slice(), y.as_slice());

            match &mut part.stat {
                ParticleStat::Gaussian(g) => {
                    let f = model.gaussian_features(&part.x).expect("gaussian system");
                    *g = g.update(&f, q.as_ref().expect("gaussian noise"), &x_new)?;
                }
                ParticleStat::LogPoly(d) => d.update(model, part.x.as_slice(), x_new.as_slice())?,
                ParticleStat::None => {}
            }
            part.x = x_new;
            Ok(())
        })?;

        let max = log_w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::WeightUnderflow);
        }
        let total: f64 = log_w.iter().map(|l| (l - max).exp()).sum();
        for (part, l) in particles.iter_mut().zip(&log_w) {
            part.weight = (l - max).exp() / total;
        }
        let ess = 1.0 / particles.iter().map(|q| q.weight * q.weight).sum::<f64>();
        let (theta_mean, theta_std) = weighted_moments(particles.iter().map(|q| (&q.theta, q.weight)), p);
        let (x_mean, _) = weighted_moments(particles.iter().map(|q| (&q.x, q.weight)), model.state_dim());
        output.records.push(StepRecord { t, theta_mean, theta_std, x_mean, ess, unique_theta: count_unique(&particles) });

        if settings.ess_threshold.is_none_or(|thr| ess < thr * n as f64) {
            particles = resample_multinomial(&particles, &mut stream(seed, Purpose::Resample, t as u64, 0))?;
        }
        step_seconds.push(started.elapsed().as_secs_f64());
        observer(t, &particles);
    }
    Ok(FilterRun { output, particles, step_seconds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_cauchy, make_linear_gaussian, make_sin, make_star};
    use crate::samplers::SamplerKind;

    fn particle(x: f64, w: f64) -> Particle {
        Particle { x: DVector::from_element(1, x), theta: DVector::from_element(1, x), stat: ParticleStat::None, weight: w }
    }

    #[test]
    fn degenerate_weights_copy_one_particle() {
        let ps: Vec<Particle> = (0..5).map(|i| particle(i as f64, if i == 3 { 1.0 } else { 0.0 })).collect();
        let out = resample_multinomial(&ps, &mut stream(1, Purpose::Test, 0, 0)).unwrap();
        assert!(out.iter().all(|q| q.x[0] == 3.0 && (q.weight - 0.2).abs() < 1e-15));
        let zero: Vec<Particle> = (0..3).map(|i| particle(i as f64, 0.0)).collect();
        assert!(matches!(resample_multinomial(&zero, &mut stream(1, Purpose::Test, 0, 0)), Err(Error::WeightUnderflow)));
    }

    #[test]
    fn uniform_weights_pass_chi_square() {
        // counts pooled over 1000 trials of N = 10 draws
        let n = 10;
        let weights = vec![1.0; n];
        let mut counts = vec![0usize; n];
        for trial in 0..1000 {
            for i in resample_indices(&weights, n, &mut stream(2, Purpose::Test, trial, 0)).unwrap() {
                counts[i] += 1;
            }
        }
        let expected = 1000.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 99th percentile of chi-square with 9 degrees of freedom
        assert!(chi2 < 21.666, "{chi2}");
    }

    #[test]
    fn two_point_weights_binomial() {
        let idx = resample_indices(&[0.75, 0.25], 10_000, &mut stream(3, Purpose::Test, 0, 0)).unwrap();
        let first = idx.iter().filter(|&&i| i == 0).count() as f64;
        assert!((first - 7500.0).abs() < 130.0, "{first}");
    }

    fn kalman_means(ys: &[DVector<f64>], a: f64, q: f64, r: f64) -> Vec<f64> {
        let (mut m, mut p) = (0.0, 0.0);
        ys[1..]
            .iter()
            .map(|y| {
                let (mp, pp) = (a * m, a * a * p + q);
                let k = pp / (pp + r);
                m = mp + k * (y[0] - mp);
                p = (1.0 - k) * pp;
                m
            })
            .collect()
    }

    #[test]
    fn sir_tracks_kalman_filter() {
        let model = make_linear_gaussian();
        let traj = model.simulate(200, 17).unwrap();
        let run = run_sir(&model, &traj.observations, 5000, 17, &[0.7]).unwrap();
        let kf = kalman_means(&traj.observations, 0.7, 1.0, 0.01);
        let mse = run.output.records.iter().zip(&kf).map(|(r, k)| (r.x_mean[0] - k).powi(2)).sum::<f64>() / kf.len() as f64;
        assert!(mse.sqrt() < 0.05, "rmse {}", mse.sqrt());
        for r in &run.output.records {
            assert!(r.ess > 0.0 && r.ess <= 5000.0 + 1e-9);
        }
    }

    #[test]
    fn uninformative_observations_spread_the_state() {
        let model = make_linear_gaussian().with_obs_noise_std(1e6).unwrap();
        let traj = model.simulate(30, 5).unwrap();
        let run = run_sir(&model, &traj.observations, 2000, 5, &[0.7]).unwrap();
        let spread = |t: usize| run.output.records[t].ess;
        assert!(spread(29) > 1990.0);
    }

    #[test]
    fn deterministic_given_seed() {
        let model = make_sin();
        let traj = model.simulate(40, 1).unwrap();
        let cfg = EpfConfig::new(200, 7, SamplerConfig::slice_for(&model));
        let a = run_epf(&model, &traj.observations, &cfg, 9).unwrap();
        let b = run_epf(&model, &traj.observations, &cfg, 9).unwrap();
        assert_eq!(a.output, b.output);
        let c = run_epf(&model, &traj.observations, &cfg, 10).unwrap();
        assert_ne!(a.output, c.output);
    }

    #[test]
    fn weights_normalized_and_ess_in_range() {
        let model = make_sin();
        let traj = model.simulate(30, 2).unwrap();
        let mut checked = 0;
        let settings = FilterSettings { particles: 300, ess_threshold: Some(0.5) };
        run_filter_observed(&model, &traj.observations, &FilterKind::SirAugmented, &settings, 3, |_, ps| {
            let s: f64 = ps.iter().map(|q| q.weight).sum();
            assert!((s - 1.0).abs() < 1e-12);
            checked += 1;
        })
        .unwrap();
        assert_eq!(checked, 30);
    }

    #[test]
    fn augmented_sir_loses_parameter_diversity() {
        let model = make_sin();
        let traj = model.simulate(300, 4).unwrap();
        let run = run_sir_augmented(&model, &traj.observations, 500, 4).unwrap();
        let counts: Vec<usize> = run.output.records.iter().map(|r| r.unique_theta).collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0]));
        assert!(*counts.last().unwrap() < 50);

        let init: Vec<f64> = (0..500)
            .map(|i| truncated_prior_draw(&model, &mut stream(4, Purpose::Init, 0, i)).unwrap()[0])
            .collect();
        assert!(run.particles.iter().all(|q| init.contains(&q.theta[0])));
    }

    #[test]
    fn liu_west_with_unit_rho_is_augmented_sir() {
        let model = make_sin();
        let traj = model.simulate(60, 6).unwrap();
        let a = run_liu_west(&model, &traj.observations, 200, 1.0, 8).unwrap();
        let b = run_sir_augmented(&model, &traj.observations, 200, 8).unwrap();
        assert_eq!(a.output, b.output);
        assert!(run_liu_west(&model, &traj.observations, 10, 0.0, 8).is_err());
    }

    #[test]
    fn liu_west_single_particle_keeps_theta() {
        let model = make_sin();
        let traj = model.simulate(20, 6).unwrap();
        let run = run_liu_west(&model, &traj.observations, 1, 0.9, 1).unwrap();
        let first = run.output.records[0].theta_mean[0];
        assert!(run.output.records.iter().all(|r| r.theta_mean[0] == first));
    }

    #[test]
    fn liu_west_perturbation_preserves_population_mean() {
        // average of the deterministic part ρθ + (1-ρ)θ̄ over particles is θ̄;
        // the jitter averages to zero with standard error std·√((1-ρ²)/N)
        let model = make_sin().with_obs_noise_std(1e6).unwrap();
        let traj = model.simulate(1, 3).unwrap();
        let n = 20_000;
        let lw = run_liu_west(&model, &traj.observations, n, 0.9, 5).unwrap();
        let sa = run_sir_augmented(&model, &traj.observations, n, 5).unwrap();
        let (a, b) = (lw.output.records[0].theta_mean[0], sa.output.records[0].theta_mean[0]);
        let se = 0.2 * (0.19f64 / n as f64).sqrt();
        assert!((a - b).abs() < 4.0 * se, "{a} vs {b}");
    }

    #[test]
    fn storvik_rejects_non_gaussian_models() {
        let model = make_sin();
        let traj = model.simulate(5, 1).unwrap();
        assert!(matches!(run_storvik(&model, &traj.observations, 10, 1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn storvik_concentrates_and_keeps_diversity() {
        let model = make_linear_gaussian();
        let traj = model.simulate(2000, 11).unwrap();
        let run = run_storvik(&model, &traj.observations, 500, 11).unwrap();
        let last = run.output.last().unwrap();
        assert!((last.theta_mean[0] - 0.7).abs() < 0.05, "{}", last.theta_mean[0]);
        assert!(run.output.records.iter().all(|r| r.unique_theta == 500));
    }

    #[test]
    fn storvik_first_draws_follow_prior() {
        let model = make_linear_gaussian();
        let traj = model.simulate(1, 3).unwrap();
        let run = run_storvik(&model, &traj.observations, 20_000, 3).unwrap();
        // before any data, θ ~ N(0, 0.5²); weights only see y_1 through x_1
        let thetas: Vec<f64> = (0..20_000)
            .map(|i| {
                let g = GaussianSuffStat::from_prior(model.prior());
                sample_gaussian(&g, &mut stream(3, Purpose::Theta, 1, i)).unwrap()[0]
            })
            .collect();
        let m = thetas.iter().sum::<f64>() / 20_000.0;
        let v = thetas.iter().map(|t| (t - m).powi(2)).sum::<f64>() / 20_000.0;
        assert!(m.abs() < 0.015 && (v.sqrt() - 0.5).abs() < 0.015);
        assert_eq!(run.output.records[0].unique_theta, 20_000);
    }

    fn grid_masses(f: impl Fn(f64) -> f64, grid: &[f64]) -> Vec<f64> {
        let logs: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
        let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|v| v / z).collect()
    }

    #[test]
    fn first_order_epf_reproduces_storvik() {
        let model = make_linear_gaussian();
        let traj = model.simulate(80, 21).unwrap();
        let cfg = EpfConfig::new(40, 1, SamplerConfig::exact_gaussian_for(&model));
        let (kind, settings) = cfg.split();
        let mut epf_stats = Vec::new();
        let epf = run_filter_observed(&model, &traj.observations, &kind, &settings, 21, |_, ps| {
            epf_stats.push(ps.iter().map(|q| q.stat.clone()).collect::<Vec<_>>())
        })
        .unwrap();
        let mut storvik_stats = Vec::new();
        let storvik = run_filter_observed(&model, &traj.observations, &FilterKind::Storvik, &settings, 21, |_, ps| {
            storvik_stats.push(ps.iter().map(|q| q.stat.clone()).collect::<Vec<_>>())
        })
        .unwrap();
        let grid: Vec<f64> = (0..=600).map(|i| -3.0 + 0.01 * i as f64).collect();
        let mut worst: f64 = 0.0;
        for (a, b) in epf_stats.iter().zip(&storvik_stats).step_by(5) {
            for (sa, sb) in a.iter().zip(b) {
                let pa = grid_masses(|t| sa.log_density(&[t]), &grid);
                let pb = grid_masses(|t| sb.log_density(&[t]), &grid);
                worst = pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).fold(worst, f64::max);
            }
        }
        assert!(worst < 1e-6, "{worst}");
        let (ea, sb) = (epf.output.last().unwrap(), storvik.output.last().unwrap());
        assert!((ea.theta_mean[0] - sb.theta_mean[0]).abs() < 1e-9);
    }

    #[test]
    fn epf_never_impoverishes_with_slice_sampler() {
        let model = make_sin();
        let traj = model.simulate(100, 13).unwrap();
        let run = run_epf(&model, &traj.observations, &EpfConfig::new(200, 7, SamplerConfig::slice_for(&model)), 13).unwrap();
        assert!(run.output.records.iter().all(|r| r.unique_theta == 200));
    }

    #[test]
    fn epf_runs_on_every_model() {
        for (model, order, sampler) in [
            (make_cauchy(), 10, SamplerKind::Slice),
            (make_star(), 9, SamplerKind::Rwmh),
            (make_linear_gaussian(), 1, SamplerKind::ExactGaussian),
        ] {
            let traj = model.simulate(30, 2).unwrap();
            let mut cfg = EpfConfig::new(50, order, SamplerConfig::slice_for(&model));
            cfg.sampler.kind = sampler;
            let run = run_epf(&model, &traj.observations, &cfg, 2).unwrap();
            assert_eq!(run.output.len(), 30);
            assert!(run.particles.iter().all(|q| q.theta.iter().all(|v| v.is_finite())));
        }
    }

    #[test]
    fn csv_layout() {
        let model = make_star();
        let traj = model.simulate(3, 2).unwrap();
        let run = run_epf(&model, &traj.observations, &EpfConfig::new(20, 3, SamplerConfig::rwmh_for(&model)), 2).unwrap();
        let mut buf = Vec::new();
        run.output.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,theta_mean_1,theta_mean_2,theta_std_1,theta_std_2,x_mean,ess,unique_theta");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("1,"));
        assert_eq!(lines[1].split(',').count(), 8);
    }

    #[test]
    fn bad_inputs() {
        let model = make_sin();
        let traj = model.simulate(3, 2).unwrap();
        assert!(run_sir(&model, &traj.observations, 0, 1, &[0.7]).is_err());
        assert!(run_sir(&model, &traj.observations, 10, 1, &[0.7, 1.0]).is_err());
        assert!(run_sir(&model, &traj.observations[..1], 10, 1, &[0.7]).is_err());
        assert!(run_epf(&model, &traj.observations, &EpfConfig::new(10, 0, SamplerConfig::slice_for(&model)), 1).is_err());
    }
}
