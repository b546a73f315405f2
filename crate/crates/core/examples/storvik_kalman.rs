//! On a linear-Gaussian model the conjugate statistic is a Kalman update in
//! parameter space, and the first-order EPF with exact Gaussian draws
//! reproduces Storvik's filter.
//!
//! `cargo run --release --example storvik_kalman`

use epf::prelude::*;
use nalgebra::DMatrix;

fn main() -> epf::Result<()> {
    let model = models::make_linear_gaussian();
    let traj = model.simulate(2000, 4)?;

    let mut s = GaussianSuffStat::from_prior(model.prior());
    let mut k = s.clone();
    let q = DMatrix::from_element(1, 1, 1.0);
    for w in traj.states.windows(2) {
        let f = DMatrix::from_element(1, 1, w[0][0]);
        s = s.update(&f, &q, &w[1])?;
        k = k.update_as_kalman(&f, &q, &w[1])?;
    }
    println!("conjugate posterior: {:.5} ± {:.5}", s.mean[0], s.cov[(0, 0)].sqrt());
    println!("kalman form:         {:.5} ± {:.5}", k.mean[0], k.cov[(0, 0)].sqrt());

    let storvik = run_storvik(&model, &traj.observations, 500, 4)?;
    let cfg = EpfConfig::new(500, 1, SamplerConfig::exact_gaussian_for(&model));
    let epf = run_epf(&model, &traj.observations, &cfg, 4)?;
    let (a, b) = (storvik.output.last().unwrap(), epf.output.last().unwrap());
    println!("storvik: θ = {:.6} ± {:.6}", a.theta_mean[0], a.theta_std[0]);
    println!("epf M=1: θ = {:.6} ± {:.6}", b.theta_mean[0], b.theta_std[0]);
    Ok(())
}
