//! Truncated Taylor expansions and their accuracy as the order grows.
//!
//! `cargo run --release --example polynomial_taylor`

use epf::poly::{remainder_bound, taylor_log1p_sq, taylor_logistic, taylor_sin, Poly};

/// Human-readable form of a polynomial, for example `1 - 0.5 v^2`.
fn pretty(p: &Poly, var: &str) -> String {
    let terms: Vec<String> = p
        .terms()
        .map(|(e, c)| match e[0] {
            0 => format!("{c:+.6}"),
            1 => format!("{c:+.6} {var}"),
            k => format!("{c:+.6} {var}^{k}"),
        })
        .collect();
    terms.join(" ")
}

fn main() -> epf::Result<()> {
    let x_prev = 1.5;
    println!("sin(θ·{x_prev}) around θ = 0");
    for order in [1, 3, 5, 7, 9] {
        let s = taylor_sin(x_prev, order)?;
        let theta = 0.7;
        let err = (s.eval(&[theta])? - (theta * x_prev).sin()).abs();
        let bound = remainder_bound(1.0, (theta * x_prev).abs(), order);
        println!("  M = {order}: |error| at θ = {theta} is {err:.2e} (Lagrange bound {bound:.2e})");
    }
    println!("order 5 series: {}", pretty(&taylor_sin(x_prev, 5)?.poly, "θ"));

    let l = taylor_log1p_sq(8)?;
    println!("log(1 + v²) through v⁸: {}", pretty(&l, "v"));
    let v = 0.5;
    println!("  at v = {v}: {:.6} vs {:.6}", l.eval(&[v])?, (1.0 + v * v).ln());

    let g = taylor_logistic(2.0, 5)?;
    println!("logistic(γ(c - x)) at x = 2 to order 5 has {} terms in (γ, c)", g.poly.len());

    let a = Poly::univariate(&[1.0, 2.0]);
    println!("(1 + 2θ)³ = {}", pretty(&a.mul(&a)?.mul(&a)?, "θ"));
    Ok(())
}
