//! Slice sampling and random-walk Metropolis on a log-polynomial density,
//! compared with its exact Gaussian form.
//!
//! `cargo run --release --example samplers`

use epf::prelude::*;
use epf::samplers::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> epf::Result<()> {
    let model = models::make_linear_gaussian();
    let traj = model.simulate(25, 5)?;
    let mut d = LogPolyDensity::for_model(&model, 1)?;
    for w in traj.states.windows(2) {
        d.update(&model, w[0].as_slice(), w[1].as_slice())?;
    }
    let g = d.as_gaussian().expect("first-order density is Gaussian");
    println!("exact: mean {:.4}, std {:.4}", g.mean[0], g.cov[(0, 0)].sqrt());

    for kind in [SamplerKind::Slice, SamplerKind::Rwmh, SamplerKind::ExactGaussian] {
        let mut cfg = SamplerConfig::slice_for(&model);
        cfg.kind = kind;
        cfg.rw_step_std = vec![2.4 * g.cov[(0, 0)].sqrt()];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut theta = g.mean.as_slice().to_vec();
        let draws: Vec<f64> = (0..50_000)
            .map(|_| {
                theta = sample(&d, &theta, &cfg, &mut rng)?;
                Ok(theta[0])
            })
            .collect::<epf::Result<_>>()?;
        let n = draws.len() as f64;
        let m = draws.iter().sum::<f64>() / n;
        let s = (draws.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        println!("{kind:?}: mean {m:.4}, std {s:.4}");
    }
    Ok(())
}
