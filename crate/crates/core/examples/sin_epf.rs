//! Extended parameter filter on the sinusoidal model with a 7th-order
//! expansion and slice sampling.
//!
//! `cargo run --release --example sin_epf -- [particles] [steps] [seed]`

use epf::prelude::*;

fn main() -> epf::Result<()> {
    let args: Vec<u64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = *args.first().unwrap_or(&1000) as usize;
    let steps = *args.get(1).unwrap_or(&1000) as usize;
    let seed = *args.get(2).unwrap_or(&1);

    let model = models::make_sin();
    let traj = model.simulate(steps, seed)?;
    let cfg = EpfConfig::new(n, 7, SamplerConfig::slice_for(&model));
    let start = std::time::Instant::now();
    let run = run_epf(&model, &traj.observations, &cfg, seed)?;
    for r in run.output.records.iter().filter(|r| r.t % (steps / 10).max(1) == 0) {
        println!("t = {:>5}: θ = {:.4} ± {:.4}, ESS {:>7.1}, unique θ {}", r.t, r.theta_mean[0], r.theta_std[0], r.ess, r.unique_theta);
    }
    println!("true θ = 0.7; {:.2}s for N = {n}, T = {steps}", start.elapsed().as_secs_f64());
    Ok(())
}
