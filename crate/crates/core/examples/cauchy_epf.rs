//! EPF on the Cauchy-transition model. The transition log-density is
//! expanded through the series of `log(1 + v²)`.
//!
//! `cargo run --release --example cauchy_epf -- [seed]`

use epf::prelude::*;

fn main() -> epf::Result<()> {
    let seed = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    let model = models::make_cauchy();
    let traj = model.simulate(1000, seed)?;
    let cfg = EpfConfig::new(100, 10, SamplerConfig::slice_for(&model));
    let run = run_epf(&model, &traj.observations, &cfg, seed)?;
    let last = run.output.last().unwrap();
    println!("a = {:.4} ± {:.4} (true 0.7), ESS at T {:.1}", last.theta_mean[0], last.theta_std[0], last.ess);
    Ok(())
}
