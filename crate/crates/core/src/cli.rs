//! Command implementations behind the `epf` binary. Each writes CSV
//! artifacts under the configured output directory and a short report to
//! `log`.

use std::io::Write;
use std::path::PathBuf;

use crate::config::ExperimentConfig;
use crate::diagnostics::{gibbs_density_approx, gibbs_density_exact, kl_divergence, posterior_moments, write_kl_sweep_csv, Grid, KlSweepRow};
use crate::filters::{run_filter, FilterOutput};
use crate::model::{ModelSpec, Trajectory};
use crate::selftest::{run_checks, Fault};
use crate::{fmt_f64, Error, Result};

fn out_dir(cfg: &ExperimentConfig) -> Result<PathBuf> {
    std::fs::create_dir_all(&cfg.out_dir)?;
    Ok(cfg.out_dir.clone())
}

/// Loads the configured trajectory, or simulates `steps` transitions from
/// the model with the configured seed.
fn trajectory(cfg: &ExperimentConfig, model: &ModelSpec, steps: usize) -> Result<Trajectory> {
    match &cfg.trajectory {
        Some(path) => {
            let t = Trajectory::load_csv(path)?;
            if t.states[0].len() != model.state_dim() {
                return Err(Error::Config(format!(
                    "trajectory {} has state dimension {}, model `{}` needs {}",
                    path.display(),
                    t.states[0].len(),
                    model.name(),
                    model.state_dim()
                )));
            }
            Ok(t)
        }
        None => model.simulate(steps, cfg.seed),
    }
}

/// Writes `trajectory.csv` (`t,x,y`, rows `0..=T`).
pub fn cmd_simulate(cfg: &ExperimentConfig, log: &mut dyn Write) -> Result<PathBuf> {
    let model = cfg.build_model()?;
    let traj = model.simulate(cfg.steps, cfg.seed)?;
    let path = out_dir(cfg)?.join("trajectory.csv");
    traj.save_csv(&path)?;
    writeln!(log, "simulated {} steps of `{}` with seed {} -> {}", cfg.steps, model.name(), cfg.seed, path.display())?;
    Ok(path)
}

/// Runs the configured filter and writes `<filter>.csv`.
pub fn cmd_filter(cfg: &ExperimentConfig, log: &mut dyn Write) -> Result<FilterOutput> {
    let model = cfg.build_model()?;
    let kind = cfg.filter_kind(&model)?;
    let traj = trajectory(cfg, &model, cfg.steps)?;
    let run = run_filter(&model, &traj.observations, &kind, &cfg.filter_settings(), cfg.seed).map_err(|e| match e {
        Error::Unsupported(m) => Error::Config(m),
        other => other,
    })?;
    let path = out_dir(cfg)?.join(format!("{}.csv", kind.name()));
    run.output.save_csv(&path)?;
    let last = run.output.last().expect("at least one step");
    for (j, (m, s)) in last.theta_mean.iter().zip(&last.theta_std).enumerate() {
        writeln!(log, "theta_{} = {m:.4} ± {s:.4} (true {})", j + 1, model.theta_true()[j])?;
    }
    writeln!(
        log,
        "{} on `{}`: N = {}, T = {}, seed {}, unique theta at T = {} -> {}",
        kind.name(),
        model.name(),
        cfg.particles,
        last.t,
        cfg.seed,
        last.unique_theta,
        path.display()
    )?;
    Ok(run.output)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    /// `(T, posterior mean, posterior std)` for each T.
    pub shrinkage: Vec<(usize, Vec<f64>, Vec<f64>)>,
    pub kl: Vec<KlSweepRow>,
}

/// Grid Gibbs densities for every `T` in `sweep_t` (`gibbs_T<T>.csv`), their
/// moments (`shrinkage.csv`), and the KL from the exact to each order in
/// `sweep_m` (`kl_sweep.csv`).
pub fn cmd_gibbs_sweep(cfg: &ExperimentConfig, log: &mut dyn Write) -> Result<SweepSummary> {
    if cfg.sweep_t.is_empty() || cfg.sweep_m.is_empty() {
        return Err(Error::Config("sweep_t and sweep_m must both be non-empty".into()));
    }
    if cfg.sweep_m.contains(&0) {
        return Err(Error::Config("orders in sweep_m must be >= 1".into()));
    }
    let model = cfg.build_model()?;
    let t_max = *cfg.sweep_t.iter().max().expect("non-empty");
    let traj = trajectory(cfg, &model, t_max.max(1))?;
    if t_max > traj.steps() {
        return Err(Error::Config(format!("sweep_t reaches {t_max} but the trajectory has {} steps", traj.steps())));
    }
    let points = cfg.grid_points.unwrap_or(if model.param_dim() == 1 { 2001 } else { 201 });
    let grid = Grid::for_model(&model, points).map_err(|e| Error::Config(e.to_string()))?;
    let dir = out_dir(cfg)?;

    let mut shrinkage = Vec::new();
    let mut kl = Vec::new();
    for &t in &cfg.sweep_t {
        let xs = &traj.states[..=t];
        let exact = gibbs_density_exact(&model, xs, &grid)?;
        exact.save_csv(&dir.join(format!("gibbs_T{t}.csv")))?;
        let (mean, std) = posterior_moments(&exact);
        for &m in &cfg.sweep_m {
            let approx = gibbs_density_approx(&model, xs, &grid, m)?;
            kl.push(KlSweepRow { t, order: m, kl: kl_divergence(&exact, &approx)? });
        }
        shrinkage.push((t, mean, std));
    }

    let p = model.param_dim();
    let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join("shrinkage.csv"))?);
    let cols: Vec<String> = (1..=p).map(|j| format!("mean_{j}")).chain((1..=p).map(|j| format!("std_{j}"))).collect();
    writeln!(f, "T,{}", cols.join(","))?;
    for (t, mean, std) in &shrinkage {
        let vals: Vec<String> = mean.iter().chain(std).map(|v| fmt_f64(*v)).collect();
        writeln!(f, "{t},{}", vals.join(","))?;
    }
    f.flush()?;
    write_kl_sweep_csv(&kl, std::io::BufWriter::new(std::fs::File::create(dir.join("kl_sweep.csv"))?))?;

    for (t, mean, std) in &shrinkage {
        writeln!(log, "T = {t:>5}: posterior mean {:?}, std {:?}", mean, std)?;
    }
    for r in &kl {
        writeln!(log, "T = {:>5}, M = {:>2}: KL = {:.4e}", r.t, r.order, r.kl)?;
    }
    writeln!(log, "wrote {} density files, shrinkage.csv and kl_sweep.csv to {}", cfg.sweep_t.len(), dir.display())?;
    Ok(SweepSummary { shrinkage, kl })
}

/// Prints one line per check; returns whether all passed.
pub fn cmd_selftest(fault: Option<Fault>, log: &mut dyn Write) -> Result<bool> {
    let results = run_checks(fault);
    for r in &results {
        writeln!(log, "{} {} ({:.2}s): {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.seconds, r.detail)?;
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(log, "{} of {} checks passed", results.len() - failed, results.len())?;
    Ok(failed == 0)
}
