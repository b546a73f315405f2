//! Grid evaluation of the exact Gibbs density `p(θ | x_{0:T})` on the
//! sinusoidal model: it concentrates as T grows, and higher expansion
//! orders approach it in KL.
//!
//! `cargo run --release --example gibbs_shrinkage`

use epf::prelude::*;

fn main() -> epf::Result<()> {
    let model = models::make_sin();
    let traj = model.simulate(1024, 3)?;
    let grid = Grid::for_model(&model, 2001)?;
    for t in [16, 64, 256, 1024] {
        let xs = &traj.states[..=t];
        let exact = gibbs_density_exact(&model, xs, &grid)?;
        let (mean, std) = posterior_moments(&exact);
        let kls: Vec<String> = [1, 3, 5, 7]
            .iter()
            .map(|&m| Ok(format!("M={m}: {:.2e}", kl_divergence(&exact, &gibbs_density_approx(&model, xs, &grid, m)?)?)))
            .collect::<epf::Result<_>>()?;
        println!("T = {t:>4}: mean {:.4}, std {:.4}; KL {}", mean[0], std[0], kls.join(", "));
    }
    Ok(())
}
