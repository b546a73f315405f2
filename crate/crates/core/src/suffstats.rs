//! Fixed-size sufficient statistics for the parameter posterior
//! `p(θ | x_{0:t})`.
//!
//! * [`GaussianSuffStat`]: exact conjugate recursion for Gaussian system
//!   processes `x_t = F_tᵀ θ + N(0, Q)`, in two algebraically equivalent
//!   forms (direct mean/covariance update and Kalman gain form).
//! * [`SeparableSuffStat`]: the `(S1, S2)` accumulators for separable
//!   transitions `l(x)ᵀ h(θ)` with log-quadratic noise.
//! * [`LogPolyDensity`]: the approximate posterior `log p(θ) - η(θ)` whose
//!   polynomial `η` grows by one approximate transition term per step.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, RowDVector};

use crate::model::{Dynamics, GaussianPrior, Interval, ModelSpec, TransitionNoise};
use crate::poly::{taylor_log1p_sq, taylor_logistic, taylor_sin_at, Poly};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianSuffStat {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

impl GaussianSuffStat {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let p = mean.len();
        if cov.nrows() != p || cov.ncols() != p {
            return Err(Error::DimensionMismatch { expected: p, got: cov.nrows() });
        }
        Ok(Self { mean, cov })
    }

    pub fn from_prior(prior: &GaussianPrior) -> Self {
        Self { mean: prior.mean().clone(), cov: prior.cov().clone() }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    fn check(&self, f: &DMatrix<f64>, q: &DMatrix<f64>, x: &DVector<f64>) -> Result<()> {
        let p = self.dim();
        if f.nrows() != p {
            return Err(Error::DimensionMismatch { expected: p, got: f.nrows() });
        }
        let d = f.ncols();
        if q.nrows() != d || q.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: q.nrows() });
        }
        if x.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.len() });
        }
        Ok(())
    }

    /// ```text
    /// D_t = F_tᵀ C_{t-1} F_t + Q
    /// C_t = C_{t-1} - C_{t-1} F_t D_t⁻¹ F_tᵀ C_{t-1}
    /// m_t = m_{t-1} + C_{t-1} F_t D_t⁻¹ (x_t - F_tᵀ m_{t-1})
    /// ```
    pub fn update(&self, f: &DMatrix<f64>, q: &DMatrix<f64>, x: &DVector<f64>) -> Result<Self> {
        self.check(f, q, x)?;
        let cf = &self.cov * f;
        let d = f.tr_mul(&cf) + q;
        let d_inv = d.cholesky().ok_or(Error::Singular("D_t"))?.inverse();
        let gain = &cf * d_inv;
        let cov = &self.cov - &gain * cf.transpose();
        let mean = &self.mean + &gain * (x - f.tr_mul(&self.mean));
        Ok(Self { mean, cov: symmetrize(&cov) })
    }

    /// Same contract as [`Self::update`], computed as a Kalman filter
    /// measurement update in parameter space: identity dynamics, zero
    /// process noise, observation matrix `H = F_tᵀ`, observation noise `Q`.
    pub fn update_as_kalman(&self, f: &DMatrix<f64>, q: &DMatrix<f64>, x: &DVector<f64>) -> Result<Self> {
        self.check(f, q, x)?;
        let p = self.dim();
        let h = f.transpose();
        // prediction with A = I and zero process noise leaves (m, P) unchanged
        let p_pred = &self.cov;
        let innovation_cov = &h * p_pred * h.transpose() + q;
        let s_inv = innovation_cov.try_inverse().ok_or(Error::Singular("innovation covariance"))?;
        let k = p_pred * h.transpose() * s_inv;
        let mean = &self.mean + &k * (x - &h * &self.mean);
        let cov = (DMatrix::identity(p, p) - &k * &h) * p_pred;
        Ok(Self { mean, cov })
    }

    /// Log density of N(mean, cov) at θ; `-inf` if the covariance is singular.
    pub fn log_density(&self, theta: &[f64]) -> f64 {
        let Some(chol) = self.cov.clone().cholesky() else {
            return f64::NEG_INFINITY;
        };
        let r = DVector::from_column_slice(theta) - &self.mean;
        let z = chol.solve(&r);
        let log_det: f64 = chol.l().diagonal().iter().map(|v| 2.0 * v.ln()).sum();
        -0.5 * (r.dot(&z) + log_det + self.dim() as f64 * (2.0 * std::f64::consts::PI).ln())
    }
}

pub fn gaussian_update(
    s: &GaussianSuffStat,
    f: &DMatrix<f64>,
    q: &DMatrix<f64>,
    x: &DVector<f64>,
) -> Result<GaussianSuffStat> {
    s.update(f, q, x)
}

pub fn gaussian_update_as_kalman(
    s: &GaussianSuffStat,
    f: &DMatrix<f64>,
    q: &DMatrix<f64>,
    x: &DVector<f64>,
) -> Result<GaussianSuffStat> {
    s.update_as_kalman(f, q, x)
}

/// Accumulators for a separable transition `x_t = l(x_{t-1})ᵀ h(θ) + v_t`
/// with `log p(v) = Λ1 v + vᵀ Λ2 v + const`:
///
/// ```text
/// log p(θ | x_{0:t}) = log p(θ) + S1 h(θ) + h(θ)ᵀ S2 h(θ) + const
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableSuffStat {
    pub s1: RowDVector<f64>,
    pub s2: DMatrix<f64>,
    pub steps: usize,
}

impl SeparableSuffStat {
    /// Empty statistic for an `m`-dimensional feature vector `h(θ)`.
    pub fn new(m: usize) -> Self {
        Self { s1: RowDVector::zeros(m), s2: DMatrix::zeros(m, m), steps: 0 }
    }

    /// `l_x` is the `m × d` matrix `l(x_{t-1})`, `x` is `x_t`, `lambda1` is
    /// `1 × d` and `lambda2` is `d × d`.
    pub fn update(
        &self,
        l_x: &DMatrix<f64>,
        x: &DVector<f64>,
        lambda1: &RowDVector<f64>,
        lambda2: &DMatrix<f64>,
    ) -> Result<Self> {
        let m = self.s1.len();
        let d = x.len();
        if l_x.nrows() != m {
            return Err(Error::DimensionMismatch { expected: m, got: l_x.nrows() });
        }
        if l_x.ncols() != d || lambda1.len() != d {
            return Err(Error::DimensionMismatch { expected: d, got: l_x.ncols() });
        }
        if lambda2.nrows() != d || lambda2.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: lambda2.nrows() });
        }
        let coef = -(lambda1 + 2.0 * x.transpose() * lambda2);
        Ok(Self {
            s1: &self.s1 + coef * l_x.transpose(),
            s2: &self.s2 + l_x * lambda2 * l_x.transpose(),
            steps: self.steps + 1,
        })
    }

    /// `S1 h + hᵀ S2 h`, the data term of the log posterior.
    pub fn log_kernel(&self, h: &DVector<f64>) -> f64 {
        (&self.s1 * h)[0] + h.dot(&(&self.s2 * h))
    }
}

pub fn separable_update(
    s: &SeparableSuffStat,
    l_x: &DMatrix<f64>,
    x: &DVector<f64>,
    lambda1: &RowDVector<f64>,
    lambda2: &DMatrix<f64>,
) -> Result<SeparableSuffStat> {
    s.update(l_x, x, lambda1, lambda2)
}

/// Prior, support and Taylor center shared by every particle's
/// [`LogPolyDensity`].
#[derive(Clone, Debug)]
pub struct ParamSpace {
    pub prior: GaussianPrior,
    pub support: Vec<Interval>,
    pub center: Vec<f64>,
}

impl ParamSpace {
    pub fn from_model(model: &ModelSpec) -> Self {
        Self {
            prior: model.prior().clone(),
            support: model.support().to_vec(),
            center: vec![0.0; model.param_dim()],
        }
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Result<Self> {
        if center.len() != self.support.len() {
            return Err(Error::DimensionMismatch { expected: self.support.len(), got: center.len() });
        }
        self.center = center;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.support.len()
    }

    pub fn in_support(&self, theta: &[f64]) -> bool {
        self.support.iter().zip(theta).all(|(iv, &v)| iv.contains(v))
    }
}

/// Approximate Gibbs density `log p̂(θ | x_{0:t}) = log p(θ) - η(θ - θ_c) + const`
/// restricted to the parameter support.
#[derive(Clone, Debug)]
pub struct LogPolyDensity {
    eta: Poly,
    space: Arc<ParamSpace>,
    order: usize,
    updates: usize,
}

impl LogPolyDensity {
    pub fn new(space: Arc<ParamSpace>, order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidArgument("approximation order must be at least 1".into()));
        }
        Ok(Self { eta: Poly::zero(space.dim()), space, order, updates: 0 })
    }

    pub fn for_model(model: &ModelSpec, order: usize) -> Result<Self> {
        Self::new(Arc::new(ParamSpace::from_model(model)), order)
    }

    pub fn eta(&self) -> &Poly {
        &self.eta
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    pub fn space(&self) -> &Arc<ParamSpace> {
        &self.space
    }

    /// Folds the approximate transition `x_prev → x_next` into η.
    pub fn update(&mut self, model: &ModelSpec, x_prev: &[f64], x_next: &[f64]) -> Result<()> {
        let term = transition_poly(model, x_prev, x_next, self.order, &self.space.center)?;
        self.eta.add_scaled_assign(&term, 1.0)?;
        let bound = 2 * self.order as u32;
        let degree = self.eta.max_exponent();
        if degree > bound {
            return Err(Error::DegreeOverflow { degree, bound });
        }
        self.updates += 1;
        Ok(())
    }

    /// Unnormalized log density; `-inf` outside the support.
    pub fn log_density(&self, theta: &[f64]) -> f64 {
        if theta.len() != self.space.dim() || !self.space.in_support(theta) {
            return f64::NEG_INFINITY;
        }
        let shifted: smallvec::SmallVec<[f64; 2]> = theta.iter().zip(&self.space.center).map(|(t, c)| t - c).collect();
        self.space.prior.log_density(theta) - self.eta.eval_unchecked(&shifted)
    }

    /// The untruncated Gaussian this density equals when η is at most
    /// quadratic; `None` otherwise or when the precision is not positive
    /// definite.
    pub fn as_gaussian(&self) -> Option<GaussianSuffStat> {
        if self.eta.degree() > 2 {
            return None;
        }
        let p = self.space.dim();
        let mut a = DMatrix::<f64>::zeros(p, p);
        let mut b = DVector::<f64>::zeros(p);
        for (e, c) in self.eta.terms() {
            let nz: Vec<usize> = (0..p).filter(|&j| e[j] > 0).collect();
            match (e.iter().sum::<u32>(), nz.as_slice()) {
                (1, [j]) => b[*j] += c,
                (2, [j]) => a[(*j, *j)] += c,
                (2, [j, k]) => {
                    a[(*j, *k)] += 0.5 * c;
                    a[(*k, *j)] += 0.5 * c;
                }
                _ => {}
            }
        }
        let prior = &self.space.prior;
        let precision = prior.precision() + &a * 2.0;
        let center = DVector::from_column_slice(&self.space.center);
        let linear = prior.precision() * prior.mean() - b + &a * center * 2.0;
        let chol = precision.cholesky()?;
        Some(GaussianSuffStat { mean: chol.solve(&linear), cov: symmetrize(&chol.inverse()) })
    }
}

pub fn logpoly_update(d: &LogPolyDensity, model: &ModelSpec, x_prev: &[f64], x_next: &[f64]) -> Result<LogPolyDensity> {
    let mut out = d.clone();
    out.update(model, x_prev, x_next)?;
    Ok(out)
}

pub fn logpoly_eval(d: &LogPolyDensity, theta: &[f64]) -> f64 {
    d.log_density(theta)
}

/// The η increment for one transition, as a polynomial in `θ - center`:
/// the θ-dependent part of `-log p̂(x_next | x_prev, θ)`.
///
/// Gaussian noise with precision `P` and approximate mean `Ĥ(θ)`:
/// `½ ĤᵀPĤ - x_nextᵀ P Ĥ`. Cauchy noise: the order-`order` series of
/// `log(1 + w²)` composed with `w = (x_next - a x_prev) / γ`.
pub fn transition_poly(model: &ModelSpec, x_prev: &[f64], x_next: &[f64], order: usize, center: &[f64]) -> Result<Poly> {
    let p = model.param_dim();
    let d = model.state_dim();
    if x_prev.len() != d || x_next.len() != d {
        return Err(Error::DimensionMismatch { expected: d, got: x_prev.len().min(x_next.len()) });
    }
    if center.len() != p {
        return Err(Error::DimensionMismatch { expected: p, got: center.len() });
    }
    match model.noise() {
        TransitionNoise::Gaussian(g) => {
            let h = mean_polys(model, x_prev, order, center)?;
            let prec = g.precision();
            let mut out = Poly::zero(p);
            for i in 0..d {
                for j in 0..d {
                    let pij = prec[(i, j)];
                    if pij == 0.0 {
                        continue;
                    }
                    out.add_scaled_assign(&h[i].mul(&h[j])?, 0.5 * pij)?;
                    out.add_scaled_assign(&h[j], -pij * x_next[i])?;
                }
            }
            Ok(out)
        }
        TransitionNoise::Cauchy { scale } => {
            if !matches!(model.dynamics(), Dynamics::Autoregressive) {
                return Err(Error::Unsupported("Cauchy noise is only approximated for autoregressive dynamics".into()));
            }
            // a = φ + c  ⇒  w = (x_next - c x_prev)/γ - (x_prev/γ) φ
            let w = Poly::from_terms(1, [(vec![0], (x_next[0] - center[0] * x_prev[0]) / scale), (vec![1], -x_prev[0] / scale)])?;
            taylor_log1p_sq(order)?.compose(&w)
        }
    }
}

/// Polynomial approximations `Ĥ_i(θ - center)` of each component of `f_θ(x_prev)`.
fn mean_polys(model: &ModelSpec, x_prev: &[f64], order: usize, center: &[f64]) -> Result<Vec<Poly>> {
    match model.dynamics() {
        Dynamics::Sin => Ok(vec![taylor_sin_at(x_prev[0], order, center[0])?.poly]),
        Dynamics::Autoregressive => {
            let x = x_prev[0];
            Ok(vec![Poly::from_terms(1, [(vec![0], center[0] * x), (vec![1], x)])?])
        }
        Dynamics::Star { a1, b1 } => {
            if center.iter().any(|&c| c != 0.0) {
                return Err(Error::Unsupported("the logistic expansion is centered at γ = 0".into()));
            }
            let x = x_prev[0];
            let g = taylor_logistic(x, order)?.poly;
            // a1 x (1 - G) + b1 x G = a1 x + (b1 - a1) x G
            let mut f = g.scale((b1 - a1) * x);
            f.add_scaled_assign(&Poly::constant(2, a1 * x), 1.0)?;
            Ok(vec![f])
        }
        Dynamics::GaussianSystem { features } => {
            let f = features(&DVector::from_column_slice(x_prev));
            let p = f.nrows();
            Ok((0..f.ncols())
                .map(|j| {
                    let mut h = Poly::zero(p);
                    let mut offset = 0.0;
                    for k in 0..p {
                        h.add_scaled_assign(&Poly::variable(p, k), f[(k, j)]).expect("same dim");
                        offset += f[(k, j)] * center[k];
                    }
                    h.add_scaled_assign(&Poly::constant(p, offset), 1.0).expect("same dim");
                    h
                })
                .collect())
        }
    }
}
