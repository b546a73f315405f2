//! Oracle-equivalence checks runnable from the binary.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::{accumulate_logpoly, gibbs_density_approx, gibbs_density_approx_direct, Grid};
use crate::filters::{run_filter_observed, FilterKind, FilterSettings, ParticleStat};
use crate::models::{make_linear_gaussian, make_sin};
use crate::rng::{stream, Purpose};
use crate::samplers::{sample_rwmh, sample_slice, SamplerConfig, SamplerKind};
use crate::suffstats::{GaussianSuffStat, LogPolyDensity};
use crate::Result;

/// Deliberate corruption used to show that a check can fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Scales the Kalman-form covariance by `1 + 1e-6`.
    KalmanCoefficient,
}

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

/// Largest relative gap between the recursive and batch conjugate
/// posteriors of a scalar AR(1) after `steps` updates.
pub fn recursion_vs_batch(steps: usize, seed: u64) -> Result<f64> {
    let model = make_linear_gaussian();
    let traj = model.simulate(steps, seed)?;
    let (m0, c0) = (model.prior().mean()[0], model.prior().cov()[(0, 0)]);
    let q = DMatrix::from_element(1, 1, 1.0);
    let mut s = GaussianSuffStat::from_prior(model.prior());
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for w in traj.states.windows(2) {
        s = s.update(&DMatrix::from_element(1, 1, w[0][0]), &q, &w[1])?;
        sxx += w[0][0] * w[0][0];
        sxy += w[0][0] * w[1][0];
    }
    let c = 1.0 / (1.0 / c0 + sxx);
    let m = c * (m0 / c0 + sxy);
    Ok(((s.cov[(0, 0)] - c) / c).abs().max(((s.mean[0] - m) / m).abs()))
}

/// Largest componentwise gap between the direct and Kalman-form updates
/// over `trials` random instances with three parameters.
pub fn recursion_vs_kalman(trials: usize, seed: u64, fault: Option<Fault>) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spd = |n: usize, rng: &mut ChaCha8Rng| {
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        &a * a.transpose() + DMatrix::identity(n, n) * 0.5
    };
    let mut worst: f64 = 0.0;
    for k in 0..trials {
        let (p, d) = (3, 1 + k % 3);
        let cov = spd(p, &mut rng);
        let s = GaussianSuffStat::new(DVector::from_fn(p, |_, _| rng.random_range(-2.0..2.0)), cov)?;
        let f = DMatrix::from_fn(p, d, |_, _| rng.random_range(-2.0..2.0));
        let q = spd(d, &mut rng);
        let x = DVector::from_fn(d, |_, _| rng.random_range(-3.0..3.0));
        let a = s.update(&f, &q, &x)?;
        let mut b = s.update_as_kalman(&f, &q, &x)?;
        if fault == Some(Fault::KalmanCoefficient) {
            b.cov *= 1.0 + 1e-6;
        }
        worst = worst.max((a.mean - b.mean).amax()).max((a.cov - b.cov).amax());
    }
    Ok(worst)
}

/// Largest relative gap between the accumulated η and the direct sum of
/// per-step approximate kernels, on 20 interior grid points of the SIN
/// support.
pub fn eta_vs_direct(steps: usize, order: usize, seed: u64) -> Result<f64> {
    let model = make_sin();
    let traj = model.simulate(steps, seed)?;
    let d = accumulate_logpoly(&model, &traj.states, order)?;
    let iv = model.support()[0];
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let theta = [iv.lo + iv.width() * (k as f64 + 0.5) / 20.0];
        let a = d.eta().eval(&theta)?;
        let mut b = 0.0;
        for w in traj.states.windows(2) {
            b += model.approx_neg_log_kernel(&theta, w[0].as_slice(), w[1].as_slice(), order, &[0.0])?;
        }
        worst = worst.max((a - b).abs() / b.abs().max(1.0));
    }
    Ok(worst)
}

/// Largest grid-mass gap between the order-1 EPF (exact Gaussian draws)
/// and the Storvik filter, per particle, over a linear-Gaussian run.
pub fn epf_first_order_vs_storvik(steps: usize, particles: usize, seed: u64) -> Result<f64> {
    let model = make_linear_gaussian();
    let traj = model.simulate(steps, seed)?;
    let settings = FilterSettings::new(particles);
    let epf_kind = FilterKind::Epf { order: 1, sampler: SamplerConfig::exact_gaussian_for(&model), center: None };
    let mut epf = Vec::new();
    run_filter_observed(&model, &traj.observations, &epf_kind, &settings, seed, |_, ps| {
        epf.push(ps.iter().map(|p| p.stat.clone()).collect::<Vec<_>>())
    })?;
    let mut storvik = Vec::new();
    run_filter_observed(&model, &traj.observations, &FilterKind::Storvik, &settings, seed, |_, ps| {
        storvik.push(ps.iter().map(|p| p.stat.clone()).collect::<Vec<_>>())
    })?;
    let grid = Grid::for_model(&model, 601)?;
    let masses = |s: &ParticleStat| -> Result<Vec<f64>> {
        let logs: Vec<f64> = (0..grid.len()).map(|k| s.log_density(&grid.point(k))).collect();
        Ok(crate::diagnostics::GridDensity::from_log_values(grid.clone(), &logs)?.masses)
    };
    let mut worst: f64 = 0.0;
    for (a, b) in epf.iter().zip(&storvik) {
        for (sa, sb) in a.iter().zip(b) {
            let (pa, pb) = (masses(sa)?, masses(sb)?);
            worst = pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).fold(worst, f64::max);
        }
    }
    Ok(worst)
}

/// Largest grid-mass gap between the η and direct-product constructions
/// of the approximate Gibbs density.
pub fn approx_paths_agree(steps: usize, order: usize, seed: u64) -> Result<f64> {
    let model = make_sin();
    let traj = model.simulate(steps, seed)?;
    let grid = Grid::for_model(&model, 2001)?;
    let a = gibbs_density_approx(&model, &traj.states, &grid, order)?;
    let b = gibbs_density_approx_direct(&model, &traj.states, &grid, order)?;
    Ok(a.masses.iter().zip(&b.masses).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug)]
pub struct MomentCheck {
    pub mean_z: f64,
    pub var_z: f64,
    pub ess: f64,
}

/// Runs a chain of `kind` on a log-quadratic target until the AR(1)
/// estimate of the effective sample size reaches `target_ess`, and reports
/// mean and variance errors in units of their Monte Carlo standard errors.
pub fn sampler_moments(kind: SamplerKind, target_ess: f64, seed: u64) -> Result<MomentCheck> {
    let model = make_linear_gaussian();
    let traj = model.simulate(30, seed)?;
    let mut d = LogPolyDensity::for_model(&model, 1)?;
    for w in traj.states.windows(2) {
        d.update(&model, w[0].as_slice(), w[1].as_slice())?;
    }
    let g = d.as_gaussian().expect("quadratic density");
    let (mu, var) = (g.mean[0], g.cov[(0, 0)]);
    let mut cfg = SamplerConfig::slice_for(&model);
    cfg.kind = kind;
    cfg.rw_step_std = vec![2.4 * var.sqrt()];
    let mut rng = stream(seed, Purpose::Test, kind as u64, 0);
    let mut theta = vec![mu];
    let mut xs: Vec<f64> = Vec::new();
    loop {
        for _ in 0..10_000 {
            theta = match kind {
                SamplerKind::Rwmh => sample_rwmh(&d, &theta, &cfg, &mut rng)?,
                _ => sample_slice(&d, &theta, &cfg, &mut rng)?,
            };
            xs.push(theta[0]);
        }
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        let r1 = xs.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum::<f64>() / ((n - 1.0) * v);
        let ess = n * (1.0 - r1) / (1.0 + r1);
        if ess >= target_ess {
            return Ok(MomentCheck {
                mean_z: (m - mu) / (var / ess).sqrt(),
                var_z: (v - var) / (var * (2.0 / ess).sqrt()),
                ess,
            });
        }
    }
}

fn timed<F>(name: &'static str, f: F) -> CheckResult
where
    F: FnOnce() -> Result<(bool, String)>,
{
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult { name, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_checks(fault: Option<Fault>) -> Vec<CheckResult> {
    vec![
        timed("conjugate recursion = batch posterior", || {
            let gap = recursion_vs_batch(500, 1)?;
            Ok((gap < 1e-8, format!("max relative gap {gap:.3e} (limit 1e-8)")))
        }),
        timed("conjugate recursion = Kalman form", || {
            let gap = recursion_vs_kalman(100, 2, fault)?;
            Ok((gap < 1e-10, format!("max gap {gap:.3e} over 100 instances (limit 1e-10)")))
        }),
        timed("accumulated eta = direct product", || {
            let gap = eta_vs_direct(500, 7, 3)?;
            Ok((gap < 1e-8, format!("max relative gap {gap:.3e} (limit 1e-8)")))
        }),
        timed("eta grid density = direct grid density", || {
            let gap = approx_paths_agree(256, 7, 4)?;
            Ok((gap < 1e-8, format!("max mass gap {gap:.3e} (limit 1e-8)")))
        }),
        timed("first-order EPF = Storvik", || {
            let gap = epf_first_order_vs_storvik(60, 40, 5)?;
            Ok((gap < 1e-6, format!("max mass gap {gap:.3e} (limit 1e-6)")))
        }),
        timed("slice sampler moments", || {
            let m = sampler_moments(SamplerKind::Slice, 10_000.0, 6)?;
            Ok((m.mean_z.abs() < 3.0 && m.var_z.abs() < 3.0, format!("z(mean) {:.2}, z(var) {:.2}, ess {:.0}", m.mean_z, m.var_z, m.ess)))
        }),
        timed("random-walk MH moments", || {
            let m = sampler_moments(SamplerKind::Rwmh, 10_000.0, 7)?;
            Ok((m.mean_z.abs() < 3.0 && m.var_z.abs() < 3.0, format!("z(mean) {:.2}, z(var) {:.2}, ess {:.0}", m.mean_z, m.var_z, m.ess)))
        }),
    ]
}
