//! Baselines on the sinusoidal model: SIR with θ known, SIR with θ as a
//! static state component, Liu–West kernel smoothing and the EPF.
//!
//! `cargo run --release --example degeneracy_baselines`

use epf::prelude::*;

fn main() -> epf::Result<()> {
    let model = models::make_sin();
    let (n, seed) = (1000, 2);
    let traj = model.simulate(1000, seed)?;
    let ys = &traj.observations;

    let runs = [
        ("sir (θ known)", run_sir(&model, ys, n, seed, &[0.7])?),
        ("sir augmented", run_sir_augmented(&model, ys, n, seed)?),
        ("liu-west ρ=0.9", run_liu_west(&model, ys, n, 0.9, seed)?),
        ("epf M=7", run_epf(&model, ys, &EpfConfig::new(n, 7, SamplerConfig::slice_for(&model)), seed)?),
    ];
    let truth: Vec<f64> = traj.states.iter().map(|x| x[0]).collect();
    for (name, run) in &runs {
        let last = run.output.last().unwrap();
        let xs: Vec<f64> = run.output.records.iter().map(|r| r.x_mean[0]).collect();
        let state_rmse = epf::diagnostics::rmse(&xs, &truth[1..])?;
        println!(
            "{name:<16} θ = {:.4} ± {:.4}, unique θ at T: {:>4}, state RMSE {state_rmse:.4}",
            last.theta_mean[0], last.theta_std[0], last.unique_theta
        );
    }
    Ok(())
}
