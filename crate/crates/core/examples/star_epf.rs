//! EPF on the smooth-transition autoregression with two parameters (γ, c),
//! sampled by one random-walk Metropolis step per particle.
//!
//! `cargo run --release --example star_epf -- [seed]`

use epf::prelude::*;

fn main() -> epf::Result<()> {
    let seed = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    let model = models::make_star();
    let traj = model.simulate(1000, seed)?;
    let cfg = EpfConfig::new(100, 9, SamplerConfig::rwmh_for(&model));
    let run = run_epf(&model, &traj.observations, &cfg, seed)?;
    for r in run.output.records.iter().filter(|r| r.t % 200 == 0) {
        println!("t = {:>4}: γ = {:.3} ± {:.3}, c = {:.3} ± {:.3}", r.t, r.theta_mean[0], r.theta_std[0], r.theta_mean[1], r.theta_std[1]);
    }
    println!("true (γ, c) = (1, 3)");
    Ok(())
}
