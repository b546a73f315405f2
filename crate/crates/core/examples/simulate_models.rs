//! Simulates each built-in model and prints the first few states and
//! observations.
//!
//! `cargo run --release --example simulate_models`

use epf::models::by_name;

fn main() -> epf::Result<()> {
    for name in ["sin", "cauchy", "star", "linear"] {
        let model = by_name(name)?;
        let traj = model.simulate(200, 1)?;
        let support: Vec<String> = model.support().iter().map(|i| format!("[{}, {}]", i.lo, i.hi)).collect();
        println!("{name}: θ* = {:?}, support {}", model.theta_true().as_slice(), support.join(" × "));
        for t in 0..4 {
            println!("  t = {t}: x = {:?}, y = {:?}", traj.states[t].as_slice(), traj.observations[t].as_slice());
        }
        let tail: Vec<f64> = traj.states.iter().map(|x| x[0].abs()).collect();
        println!("  max |x_1| over 200 steps: {:.3}", tail.iter().cloned().fold(0.0, f64::max));
    }
    Ok(())
}
