//! If `|S - P| ≤ ε` everywhere then `KL(e^S ‖ e^P) ≤ 2ε`. Checked for
//! `S = -x² + 5 sin²x` against its truncated series.
//!
//! `cargo run --release --example taylor_kl_bound`

use epf::diagnostics::kl_bound_check;
use epf::model::Interval;
use epf::poly::taylor_sin;
use epf::prelude::*;

fn main() -> epf::Result<()> {
    let grid = Grid::uniform(&[Interval::new(-3.0, 3.0)?], &[2001])?;
    let xs: Vec<f64> = (0..grid.len()).map(|k| grid.point(k)[0]).collect();
    let s: Vec<f64> = xs.iter().map(|x| -x * x + 5.0 * x.sin().powi(2)).collect();
    for m in [4, 8, 12, 16] {
        let series = taylor_sin(1.0, m)?.poly;
        let sq = series.mul(&series)?.truncate(m as u32);
        let p: Vec<f64> = xs.iter().map(|x| Ok(-x * x + 5.0 * sq.eval(&[*x])?)).collect::<epf::Result<_>>()?;
        let eps = s.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let r = kl_bound_check(&s, &p, eps, &grid)?;
        println!("M = {m:>2}: ε = {eps:.3e}, KL = {:.3e}, 2ε = {:.3e}, holds: {}", r.kl, r.bound, r.holds());
    }
    Ok(())
}
