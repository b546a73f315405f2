//! Brute-force grid oracles for the parameter posterior, KL divergences
//! between grid densities, and small error metrics.
//!
//! These routines cost `O(T · G)` and exist to check the constant-size
//! trackers, not to run inside a filter.

use std::io::Write;
use std::path::Path;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::model::{Interval, ModelSpec};
use crate::suffstats::{LogPolyDensity, ParamSpace};
use crate::{fmt_f64, Error, Result};

/// Tensor grid of uniformly spaced points.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    axes: Vec<Vec<f64>>,
}

impl Grid {
    pub fn uniform(intervals: &[Interval], points: &[usize]) -> Result<Self> {
        if intervals.len() != points.len() || intervals.is_empty() {
            return Err(Error::DimensionMismatch { expected: intervals.len(), got: points.len() });
        }
        let axes = intervals
            .iter()
            .zip(points)
            .map(|(iv, &g)| {
                if g < 2 {
                    return Err(Error::InvalidArgument("a grid axis needs at least 2 points".into()));
                }
                let h = iv.width() / (g - 1) as f64;
                Ok((0..g).map(|k| if k == g - 1 { iv.hi } else { iv.lo + k as f64 * h }).collect())
            })
            .collect::<Result<_>>()?;
        Ok(Self { axes })
    }

    /// Covers the model's parameter support with `points` per dimension.
    pub fn for_model(model: &ModelSpec, points: usize) -> Result<Self> {
        Self::uniform(model.support(), &vec![points; model.param_dim()])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Vec::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis indices of flat index `k`; the last axis varies fastest.
    fn unravel(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for (j, axis) in self.axes.iter().enumerate().rev() {
            idx[j] = k % axis.len();
            k /= axis.len();
        }
        idx
    }

    pub fn point(&self, k: usize) -> Vec<f64> {
        self.unravel(k).iter().zip(&self.axes).map(|(&i, a)| a[i]).collect()
    }

    /// Trapezoid quadrature weight of point `k`.
    pub fn weight(&self, k: usize) -> f64 {
        self.unravel(k)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| {
                let h = (a[a.len() - 1] - a[0]) / (a.len() - 1) as f64;
                if i == 0 || i == a.len() - 1 {
                    0.5 * h
                } else {
                    h
                }
            })
            .product()
    }
}

/// Normalized probability masses on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridDensity {
    pub grid: Grid,
    pub masses: Vec<f64>,
    /// `ln` of each mass, kept separately so that masses far below the
    /// smallest positive `f64` still compare in KL.
    pub log_masses: Vec<f64>,
    /// Log of the trapezoid estimate of `∫ exp(log_values)`.
    pub log_norm: f64,
}

impl GridDensity {
    /// Normalizes unnormalized log density values, one per grid point.
    pub fn from_log_values(grid: Grid, log_values: &[f64]) -> Result<Self> {
        if log_values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), got: log_values.len() });
        }
        if log_values.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::NonFiniteDensity);
        }
        let max = log_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::NonFiniteDensity);
        }
        let z: f64 = log_values.iter().enumerate().map(|(k, l)| grid.weight(k) * (l - max).exp()).sum();
        let log_masses: Vec<f64> = log_values
            .iter()
            .enumerate()
            .map(|(k, l)| grid.weight(k).ln() + (l - max) - z.ln())
            .collect();
        let masses = log_masses.iter().map(|l| l.exp()).collect();
        Ok(Self { grid, masses, log_masses, log_norm: max + z.ln() })
    }

    pub fn mode(&self) -> Vec<f64> {
        let k = self
            .masses
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .unwrap_or(0);
        self.grid.point(k)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = (1..=self.grid.dim()).map(|j| format!("theta_{j}")).collect();
        writeln!(w, "{},mass", header.join(","))?;
        for (k, m) in self.masses.iter().enumerate() {
            let mut row: Vec<String> = self.grid.point(k).into_iter().map(fmt_f64).collect();
            row.push(fmt_f64(*m));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

fn check_states(model: &ModelSpec, xs: &[DVector<f64>]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::InvalidArgument("need at least x_0".into()));
    }
    match xs.iter().find(|x| x.len() != model.state_dim()) {
        Some(x) => Err(Error::DimensionMismatch { expected: model.state_dim(), got: x.len() }),
        None => Ok(()),
    }
}

fn evaluate<F>(grid: &Grid, f: F) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    (0..grid.len()).into_par_iter().map(|k| f(&grid.point(k))).collect()
}

/// `log p(θ) + Σ_t log p(x_t | x_{t-1}, θ)` at every grid point, `-inf`
/// outside the support.
pub fn gibbs_log_values_exact(model: &ModelSpec, xs: &[DVector<f64>], grid: &Grid) -> Result<Vec<f64>> {
    check_states(model, xs)?;
    if grid.dim() != model.param_dim() {
        return Err(Error::DimensionMismatch { expected: model.param_dim(), got: grid.dim() });
    }
    Ok(evaluate(grid, |theta| {
        if !model.in_support(theta) {
            return f64::NEG_INFINITY;
        }
        model.prior().log_density(theta)
            + xs.windows(2)
                .map(|w| model.transition_log_density_unchecked(theta, w[0].as_slice(), w[1].as_slice()))
                .sum::<f64>()
    }))
}

/// Exact Gibbs density `p(θ | x_{0:T})` on a grid.
pub fn gibbs_density_exact(model: &ModelSpec, xs: &[DVector<f64>], grid: &Grid) -> Result<GridDensity> {
    let logs = gibbs_log_values_exact(model, xs, grid)?;
    GridDensity::from_log_values(grid.clone(), &logs)
}

/// Builds the order-`order` log-polynomial tracker over the whole
/// trajectory.
pub fn accumulate_logpoly(model: &ModelSpec, xs: &[DVector<f64>], order: usize) -> Result<LogPolyDensity> {
    check_states(model, xs)?;
    let mut d = LogPolyDensity::for_model(model, order)?;
    for w in xs.windows(2) {
        d.update(model, w[0].as_slice(), w[1].as_slice())?;
    }
    Ok(d)
}

/// Approximate Gibbs density through the accumulated polynomial η.
pub fn gibbs_density_approx(model: &ModelSpec, xs: &[DVector<f64>], grid: &Grid, order: usize) -> Result<GridDensity> {
    let d = accumulate_logpoly(model, xs, order)?;
    let logs = evaluate(grid, |theta| d.log_density(theta));
    GridDensity::from_log_values(grid.clone(), &logs)
}

/// Approximate Gibbs density as a direct product of approximate
/// transition densities, without any polynomial bookkeeping.
pub fn gibbs_density_approx_direct(
    model: &ModelSpec,
    xs: &[DVector<f64>],
    grid: &Grid,
    order: usize,
) -> Result<GridDensity> {
    check_states(model, xs)?;
    let center = ParamSpace::from_model(model).center;
    // surface bad orders before the parallel sweep swallows them
    if xs.len() > 1 {
        model.approx_transition_log_density(&grid.point(0), xs[0].as_slice(), xs[1].as_slice(), order, &center)?;
    }
    let logs = evaluate(grid, |theta| {
        if !model.in_support(theta) {
            return f64::NEG_INFINITY;
        }
        model.prior().log_density(theta)
            + xs.windows(2)
                .map(|w| {
                    model
                        .approx_transition_log_density(theta, w[0].as_slice(), w[1].as_slice(), order, &center)
                        .unwrap_or(f64::NAN)
                })
                .sum::<f64>()
    });
    GridDensity::from_log_values(grid.clone(), &logs)
}

/// `Σ p_i log(p_i / q_i)` over grid masses, evaluated in log space.
pub fn kl_divergence(p: &GridDensity, q: &GridDensity) -> Result<f64> {
    if p.grid != q.grid {
        return Err(Error::InvalidArgument("KL divergence needs identical grids".into()));
    }
    let mut kl = 0.0;
    for ((&a, &la), &lb) in p.masses.iter().zip(&p.log_masses).zip(&q.log_masses) {
        if la > f64::NEG_INFINITY {
            if lb == f64::NEG_INFINITY {
                return Err(Error::SupportViolation);
            }
            kl += a * (la - lb);
        }
    }
    Ok(kl)
}

/// Half the L1 distance between mass vectors.
pub fn total_variation(p: &GridDensity, q: &GridDensity) -> Result<f64> {
    if p.grid != q.grid {
        return Err(Error::InvalidArgument("total variation needs identical grids".into()));
    }
    Ok(0.5 * p.masses.iter().zip(&q.masses).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KlBound {
    /// Measured `D_KL(exp S ‖ exp P)` on the grid.
    pub kl: f64,
    /// `2ε`.
    pub bound: f64,
    /// `max |S - P|` on the grid.
    pub gap: f64,
}

impl KlBound {
    pub fn holds(&self) -> bool {
        self.kl <= self.bound
    }
}

/// Measures the KL divergence between the grid densities `∝ exp(S)` and
/// `∝ exp(P)` and compares it with `2ε`. Fails if `|S - P| ≤ ε` does not
/// hold pointwise.
pub fn kl_bound_check(s_values: &[f64], p_values: &[f64], epsilon: f64, grid: &Grid) -> Result<KlBound> {
    if s_values.len() != p_values.len() {
        return Err(Error::DimensionMismatch { expected: s_values.len(), got: p_values.len() });
    }
    let gap = s_values.iter().zip(p_values).map(|(s, p)| (s - p).abs()).fold(0.0, f64::max);
    if gap > epsilon * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("|S - P| reaches {gap}, above ε = {epsilon}")));
    }
    let p = GridDensity::from_log_values(grid.clone(), s_values)?;
    let q = GridDensity::from_log_values(grid.clone(), p_values)?;
    Ok(KlBound { kl: kl_divergence(&p, &q)?, bound: 2.0 * epsilon, gap })
}

pub fn rmse(estimates: &[f64], truth: &[f64]) -> Result<f64> {
    if estimates.len() != truth.len() || estimates.is_empty() {
        return Err(Error::DimensionMismatch { expected: truth.len(), got: estimates.len() });
    }
    let sse: f64 = estimates.iter().zip(truth).map(|(a, b)| (a - b).powi(2)).sum();
    Ok((sse / truth.len() as f64).sqrt())
}

/// Per-dimension mean and standard deviation under the grid masses.
pub fn posterior_moments(d: &GridDensity) -> (Vec<f64>, Vec<f64>) {
    let p = d.grid.dim();
    let mut mean = vec![0.0; p];
    let mut second = vec![0.0; p];
    for (k, m) in d.masses.iter().enumerate() {
        for (j, v) in d.grid.point(k).into_iter().enumerate() {
            mean[j] += m * v;
            second[j] += m * v * v;
        }
    }
    let std = mean.iter().zip(&second).map(|(m, s)| (s - m * m).max(0.0).sqrt()).collect();
    (mean, std)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KlSweepRow {
    pub t: usize,
    pub order: usize,
    pub kl: f64,
}

pub fn write_kl_sweep_csv<W: Write>(rows: &[KlSweepRow], mut w: W) -> Result<()> {
    writeln!(w, "T,M,kl")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.t, r.order, fmt_f64(r.kl))?;
    }
    Ok(())
}

/// `D_KL(p_T ‖ p̂_{T,M})` for every `T` in `ts` (prefixes of `xs`) and `M`
/// in `orders`.
pub fn kl_sweep(model: &ModelSpec, xs: &[DVector<f64>], grid: &Grid, ts: &[usize], orders: &[usize]) -> Result<Vec<KlSweepRow>> {
    let mut rows = Vec::with_capacity(ts.len() * orders.len());
    for &t in ts {
        if t + 1 > xs.len() {
            return Err(Error::InvalidArgument(format!("T = {t} exceeds the trajectory length {}", xs.len() - 1)));
        }
        let exact = gibbs_density_exact(model, &xs[..=t], grid)?;
        for &m in orders {
            let approx = gibbs_density_approx(model, &xs[..=t], grid, m)?;
            rows.push(KlSweepRow { t, order: m, kl: kl_divergence(&exact, &approx)? });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_linear_gaussian, make_sin};
    use crate::poly::taylor_sin;
    use approx::assert_relative_eq;

    fn line(lo: f64, hi: f64, g: usize) -> Grid {
        Grid::uniform(&[Interval::new(lo, hi).unwrap()], &[g]).unwrap()
    }

    fn normal_logs(grid: &Grid, mu: f64, s: f64) -> Vec<f64> {
        (0..grid.len()).map(|k| -0.5 * ((grid.point(k)[0] - mu) / s).powi(2)).collect()
    }

    #[test]
    fn grid_geometry() {
        let g = Grid::uniform(&[Interval::new(0.0, 1.0).unwrap(), Interval::new(-1.0, 1.0).unwrap()], &[3, 5]).unwrap();
        assert_eq!(g.len(), 15);
        assert_eq!(g.point(0), vec![0.0, -1.0]);
        assert_eq!(g.point(7), vec![0.5, 0.0]);
        let total: f64 = (0..g.len()).map(|k| g.weight(k)).sum();
        assert_relative_eq!(total, 2.0, epsilon = 1e-14);
        assert!(Grid::uniform(&[Interval::new(0.0, 1.0).unwrap()], &[1]).is_err());
    }

    #[test]
    fn masses_normalize() {
        let g = line(-5.0, 5.0, 1001);
        let d = GridDensity::from_log_values(g, &normal_logs(&line(-5.0, 5.0, 1001), 0.0, 1.0)).unwrap();
        assert!((d.masses.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!(d.masses.iter().all(|m| *m >= 0.0));
        // ∫ exp(-x²/2) = √(2π)
        assert_relative_eq!(d.log_norm, (2.0 * std::f64::consts::PI).sqrt().ln(), epsilon = 1e-6);
        assert!(GridDensity::from_log_values(line(0.0, 1.0, 3), &[f64::NEG_INFINITY; 3]).is_err());
    }

    #[test]
    fn moments_of_standard_normal() {
        let g = line(-8.0, 8.0, 4001);
        let d = GridDensity::from_log_values(g.clone(), &normal_logs(&g, 0.0, 1.0)).unwrap();
        let (m, s) = posterior_moments(&d);
        assert!(m[0].abs() < 1e-3 && (s[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn kl_of_shifted_gaussians() {
        let g = line(-10.0, 10.0, 4001);
        let p = GridDensity::from_log_values(g.clone(), &normal_logs(&g, 0.0, 1.0)).unwrap();
        let q = GridDensity::from_log_values(g.clone(), &normal_logs(&g, 0.5, 1.0)).unwrap();
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        assert!((kl_divergence(&p, &q).unwrap() - 0.125).abs() < 1e-3);
        let mut zeroed = q.clone();
        zeroed.masses[2000] = 0.0;
        zeroed.log_masses[2000] = f64::NEG_INFINITY;
        assert!(matches!(kl_divergence(&p, &zeroed), Err(Error::SupportViolation)));
        assert!(kl_divergence(&p, &GridDensity::from_log_values(line(-1.0, 1.0, 3), &[0.0; 3]).unwrap()).is_err());
    }

    #[test]
    fn kl_survives_mass_underflow() {
        let g = line(-10.0, 10.0, 4001);
        let p = GridDensity::from_log_values(g.clone(), &normal_logs(&g, -5.0, 0.2)).unwrap();
        let q = GridDensity::from_log_values(g.clone(), &normal_logs(&g, 5.0, 0.2)).unwrap();
        assert!(q.masses[1000] == 0.0);
        assert_relative_eq!(kl_divergence(&p, &q).unwrap(), 100.0 / (2.0 * 0.04), max_relative = 1e-6);
    }

    #[test]
    fn rmse_basics() {
        let x = [1.0, 2.0, 3.0];
        assert_eq!(rmse(&x, &x).unwrap(), 0.0);
        assert_relative_eq!(rmse(&[2.0, 3.0, 4.0], &x).unwrap(), 1.0);
        assert!(rmse(&x, &[1.0]).is_err());
    }

    #[test]
    fn empty_history_gives_prior() {
        let model = make_sin();
        let grid = Grid::for_model(&model, 2001).unwrap();
        let d = gibbs_density_exact(&model, &[model.x0().clone()], &grid).unwrap();
        let (m, s) = posterior_moments(&d);
        assert!(m[0].abs() < 1e-12);
        assert!((s[0] - 0.2).abs() < 1e-6);
    }

    #[test]
    fn exact_grid_matches_conjugate_posterior() {
        let model = make_linear_gaussian();
        let traj = model.simulate(200, 8).unwrap();
        let grid = Grid::for_model(&model, 2001).unwrap();
        let d = gibbs_density_exact(&model, &traj.states, &grid).unwrap();
        let (mut sxx, mut sxy) = (0.0, 0.0);
        for w in traj.states.windows(2) {
            sxx += w[0][0] * w[0][0];
            sxy += w[0][0] * w[1][0];
        }
        let c = 1.0 / (4.0 + sxx);
        let m = c * sxy;
        let logs: Vec<f64> = (0..grid.len()).map(|k| -0.5 * (grid.point(k)[0] - m).powi(2) / c).collect();
        let closed = GridDensity::from_log_values(grid.clone(), &logs).unwrap();
        let sup = d.masses.iter().zip(&closed.masses).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(sup < 1e-6, "{sup}");
    }

    #[test]
    fn first_order_approx_is_exact_for_linear_model() {
        let model = make_linear_gaussian();
        let traj = model.simulate(300, 1).unwrap();
        let grid = Grid::for_model(&model, 2001).unwrap();
        let a = gibbs_density_exact(&model, &traj.states, &grid).unwrap();
        let b = gibbs_density_approx(&model, &traj.states, &grid, 1).unwrap();
        let sup = a.masses.iter().zip(&b.masses).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(sup < 1e-10, "{sup}");
    }

    #[test]
    fn eta_and_direct_paths_agree() {
        let model = make_sin();
        let traj = model.simulate(256, 3).unwrap();
        let grid = Grid::for_model(&model, 2001).unwrap();
        for order in [1, 3, 7] {
            let a = gibbs_density_approx(&model, &traj.states, &grid, order).unwrap();
            let b = gibbs_density_approx_direct(&model, &traj.states, &grid, order).unwrap();
            let sup = a.masses.iter().zip(&b.masses).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(sup < 1e-8, "M={order}: {sup}");
        }
    }

    #[test]
    fn high_order_approx_converges_for_sin() {
        let model = make_sin();
        let traj = model.simulate(1024, 5).unwrap();
        let grid = Grid::for_model(&model, 2001).unwrap();
        let exact = gibbs_density_exact(&model, &traj.states, &grid).unwrap();
        let approx = gibbs_density_approx(&model, &traj.states, &grid, 13).unwrap();
        assert!(total_variation(&exact, &approx).unwrap() < 0.01);
    }

    #[test]
    fn sin_posterior_shrinks_and_nests() {
        let model = make_sin();
        let traj = model.simulate(1024, 12).unwrap();
        let grid = Grid::for_model(&model, 2001).unwrap();
        let mut prev: Option<(f64, f64)> = None;
        for t in [16, 64, 256, 1024] {
            let d = gibbs_density_exact(&model, &traj.states[..=t], &grid).unwrap();
            let (m, s) = posterior_moments(&d);
            let mode = d.mode()[0];
            if let Some((pm, ps)) = prev {
                assert!(s[0] < ps, "T={t}");
                assert!((mode - pm).abs() < 4.0 * ps, "T={t}: mode {mode} outside earlier interval");
            }
            prev = Some((m[0], s[0]));
            if t == 1024 {
                assert!((mode - 0.7).abs() < 0.1);
            }
        }
    }

    #[test]
    fn approx_is_order_independent() {
        let model = make_sin();
        let traj = model.simulate(200, 6).unwrap();
        let grid = Grid::for_model(&model, 601).unwrap();
        let a = accumulate_logpoly(&model, &traj.states, 7).unwrap();
        let mut b = LogPolyDensity::for_model(&model, 7).unwrap();
        for w in traj.states.windows(2).rev() {
            b.update(&model, w[0].as_slice(), w[1].as_slice()).unwrap();
        }
        let pa = GridDensity::from_log_values(grid.clone(), &evaluate(&grid, |t| a.log_density(t))).unwrap();
        let pb = GridDensity::from_log_values(grid.clone(), &evaluate(&grid, |t| b.log_density(t))).unwrap();
        let sup = pa.masses.iter().zip(&pb.masses).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(sup < 1e-6);
    }

    fn bound_example(order: usize) -> KlBound {
        let grid = line(-3.0, 3.0, 2001);
        let sin = taylor_sin(1.0, order).unwrap().poly;
        let sin_sq = sin.mul(&sin).unwrap().truncate(order as u32);
        let s: Vec<f64> = (0..grid.len()).map(|k| {
            let x = grid.point(k)[0];
            -x * x + 5.0 * x.sin().powi(2)
        }).collect();
        let p: Vec<f64> = (0..grid.len()).map(|k| {
            let x = grid.point(k)[0];
            -x * x + 5.0 * sin_sq.eval(&[x]).unwrap()
        }).collect();
        let eps = s.iter().zip(&p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        kl_bound_check(&s, &p, eps, &grid).unwrap()
    }

    #[test]
    fn kl_bound_on_taylor_example() {
        for order in [4, 8, 12] {
            let r = bound_example(order);
            assert!(r.holds(), "M={order}: {r:?}");
        }
    }

    #[test]
    fn kl_bound_on_synthetic_perturbation() {
        let grid = line(-3.0, 3.0, 2001);
        let s: Vec<f64> = (0..grid.len()).map(|k| -grid.point(k)[0].powi(2)).collect();
        assert_eq!(kl_bound_check(&s, &s, 0.0, &grid).unwrap().kl, 0.0);
        for eps in [1e-3, 0.1, 1.0] {
            let p: Vec<f64> = s.iter().enumerate().map(|(k, v)| v + eps * grid.point(k)[0].cos()).collect();
            assert!(kl_bound_check(&s, &p, eps, &grid).unwrap().holds());
            assert!(matches!(kl_bound_check(&s, &p, eps / 2.0, &grid), Err(Error::Precondition(_))));
        }
    }

    #[test]
    fn kl_is_nonnegative() {
        let g = line(-3.0, 3.0, 301);
        for (a, b) in [(0.0, 0.3), (1.0, -1.0), (0.2, 0.2)] {
            let p = GridDensity::from_log_values(g.clone(), &normal_logs(&g, a, 0.7)).unwrap();
            let q = GridDensity::from_log_values(g.clone(), &normal_logs(&g, b, 1.1)).unwrap();
            assert!(kl_divergence(&p, &q).unwrap() >= 0.0);
        }
    }

    #[test]
    fn csv_outputs() {
        let g = line(0.0, 1.0, 3);
        let d = GridDensity::from_log_values(g, &[0.0, 0.0, 0.0]).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("theta_1,mass\n"));
        assert_eq!(text.lines().count(), 4);
        let mut buf = Vec::new();
        write_kl_sweep_csv(&[KlSweepRow { t: 16, order: 3, kl: 0.5 }], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("T,M,kl\n16,3,{}\n", fmt_f64(0.5)));
    }
}
