//! Sparse multivariate polynomials with `f64` coefficients and the Taylor
//! expansions the log-polynomial tracker is built from.
//!
//! A [`Poly`] maps exponent vectors to coefficients. Zero coefficients are
//! never stored, so two polynomials are equal iff their term maps are.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::{fmt_f64, Error, Result};

/// Exponent vector of a monomial, one entry per variable.
pub type Exponents = SmallVec<[u32; 2]>;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<Exponents, f64>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(SmallVec::from_elem(0, dim), c);
        p
    }

    /// The polynomial `θ_var`.
    pub fn variable(dim: usize, var: usize) -> Self {
        assert!(var < dim, "variable index out of range");
        let mut e: Exponents = SmallVec::from_elem(0, dim);
        e[var] = 1;
        let mut p = Self::zero(dim);
        p.add_term(e, 1.0);
        p
    }

    pub fn monomial(exponents: &[u32], coeff: f64) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(SmallVec::from_slice(exponents), coeff);
        p
    }

    /// Univariate polynomial from ascending coefficients `c_0, c_1, ...`.
    pub fn univariate(coeffs: &[f64]) -> Self {
        let mut p = Self::zero(1);
        for (k, &c) in coeffs.iter().enumerate() {
            p.add_term(SmallVec::from_elem(k as u32, 1), c);
        }
        p
    }

    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: e.len() });
            }
            p.add_term(SmallVec::from_vec(e), c);
        }
        Ok(p)
    }

    fn add_term(&mut self, e: Exponents, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = *o.get() + c;
                if s == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored (nonzero) terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn coeff(&self, exponents: &[u32]) -> f64 {
        self.terms.get(exponents).copied().unwrap_or(0.0)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    /// Largest exponent of any single variable.
    pub fn max_exponent(&self) -> u32 {
        self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0)
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other });
        }
        Ok(())
    }

    pub fn add(&self, other: &Poly) -> Result<Poly> {
        let mut out = self.clone();
        out.add_scaled_assign(other, 1.0)?;
        Ok(out)
    }

    /// `self += k * other`, in place.
    pub fn add_scaled_assign(&mut self, other: &Poly, k: f64) -> Result<()> {
        self.check_dim(other.dim)?;
        for (e, &c) in &other.terms {
            self.add_term(e.clone(), k * c);
        }
        Ok(())
    }

    pub fn scale(&self, k: f64) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (e, &c) in &self.terms {
            out.add_term(e.clone(), k * c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly> {
        self.check_dim(other.dim)?;
        let mut out = Poly::zero(self.dim);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn eval(&self, theta: &[f64]) -> Result<f64> {
        self.check_dim(theta.len())?;
        Ok(self.eval_unchecked(theta))
    }

    pub(crate) fn eval_unchecked(&self, theta: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, &c)| e.iter().zip(theta).fold(c, |acc, (&k, &t)| if k == 0 { acc } else { acc * t.powi(k as i32) }))
            .sum()
    }

    /// Drops every term of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> Poly {
        Poly {
            dim: self.dim,
            terms: self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() <= max_degree).map(|(e, &c)| (e.clone(), c)).collect(),
        }
    }

    /// Substitutes `inner` for the single variable of a univariate `self`,
    /// by Horner's rule.
    pub fn compose(&self, inner: &Poly) -> Result<Poly> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: self.dim });
        }
        let degree = self.degree();
        let mut acc = Poly::zero(inner.dim);
        for k in (0..=degree).rev() {
            acc = acc.mul(inner)?;
            acc.add_term(SmallVec::from_elem(0, inner.dim), self.coeff(&[k]));
        }
        Ok(acc)
    }

    /// Renders one term per line as `e1 e2 … ep : coeff`, sorted
    /// lexicographically by exponent vector.
    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, &c) in &self.terms {
            let exps: Vec<String> = e.iter().map(|k| k.to_string()).collect();
            writeln!(f, "{} : {}", exps.join(" "), fmt_f64(c))?;
        }
        Ok(())
    }
}

impl FromStr for Poly {
    type Err = Error;

    /// Parses the [`Poly::to_text`] format. An empty string is rejected
    /// because it carries no dimension.
    fn from_str(s: &str) -> Result<Self> {
        let mut dim = None;
        let mut terms = Vec::new();
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (lhs, rhs) = line.split_once(':').ok_or_else(|| Error::Parse(format!("missing `:` in `{line}`")))?;
            let e = lhs
                .split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent `{t}`"))))
                .collect::<Result<Vec<u32>>>()?;
            let c = rhs.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad coefficient `{}`", rhs.trim())))?;
            if *dim.get_or_insert(e.len()) != e.len() {
                return Err(Error::Parse("inconsistent exponent vector lengths".into()));
            }
            terms.push((e, c));
        }
        let dim = dim.ok_or_else(|| Error::Parse("empty polynomial text".into()))?;
        Poly::from_terms(dim, terms)
    }
}

pub fn poly_add(a: &Poly, b: &Poly) -> Result<Poly> {
    a.add(b)
}

pub fn poly_scale(a: &Poly, k: f64) -> Poly {
    a.scale(k)
}

pub fn poly_mul(a: &Poly, b: &Poly) -> Result<Poly> {
    a.mul(b)
}

pub fn poly_eval(a: &Poly, theta: &[f64]) -> Result<f64> {
    a.eval(theta)
}

/// A truncated Taylor series: `poly` is a polynomial in `θ - center`
/// (for the logistic expansion, in θ directly with the series variable
/// `u = γ (c - x)` truncated at `order`).
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorExpansion {
    pub center: Vec<f64>,
    pub order: usize,
    pub poly: Poly,
}

impl TaylorExpansion {
    /// Evaluates at θ (not at the offset `θ - center`).
    pub fn eval(&self, theta: &[f64]) -> Result<f64> {
        if theta.len() != self.center.len() {
            return Err(Error::DimensionMismatch { expected: self.center.len(), got: theta.len() });
        }
        let shifted: SmallVec<[f64; 2]> = theta.iter().zip(&self.center).map(|(t, c)| t - c).collect();
        self.poly.eval(&shifted)
    }
}

/// Taylor series of `sin(θ x)` in θ around 0, through order `order`.
pub fn taylor_sin(x_prev: f64, order: usize) -> Result<TaylorExpansion> {
    taylor_sin_at(x_prev, order, 0.0)
}

/// Taylor series of `sin(θ x)` in `θ - center`:
/// `Σ_i x^i sin(center·x + iπ/2) / i! · (θ - center)^i`.
pub fn taylor_sin_at(x_prev: f64, order: usize, center: f64) -> Result<TaylorExpansion> {
    if order < 1 {
        return Err(Error::InvalidArgument("Taylor order must be at least 1".into()));
    }
    let phase = center * x_prev;
    let (s, c) = phase.sin_cos();
    let mut poly = Poly::zero(1);
    let mut fact = 1.0;
    for i in 0..=order {
        if i > 0 {
            fact *= i as f64;
        }
        let deriv = match i % 4 {
            0 => s,
            1 => c,
            2 => -s,
            _ => -c,
        };
        poly.add_term(SmallVec::from_elem(i as u32, 1), deriv * x_prev.powi(i as i32) / fact);
    }
    Ok(TaylorExpansion { center: vec![center], order, poly })
}

/// Coefficients of `v^2, v^4, …, v^order` in the Maclaurin series of
/// `log(1 + v²)`: `(-1)^{k+1} / k`.
pub fn log1p_sq_coefficients(order: usize) -> Result<Vec<f64>> {
    if order < 2 || !order.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("log(1+v²) order must be even and >= 2, got {order}")));
    }
    Ok((1..=order / 2).map(|k| if k % 2 == 1 { 1.0 / k as f64 } else { -1.0 / k as f64 }).collect())
}

/// `Σ_{k=1}^{order/2} (-1)^{k+1} v^{2k} / k`, univariate in `v`.
pub fn taylor_log1p_sq(order: usize) -> Result<Poly> {
    let coeffs = log1p_sq_coefficients(order)?;
    let mut p = Poly::zero(1);
    for (k, c) in coeffs.iter().enumerate() {
        p.add_term(SmallVec::from_elem(2 * (k as u32 + 1), 1), *c);
    }
    Ok(p)
}

/// Largest order the exact-rational logistic recursion supports in `i128`.
pub const MAX_LOGISTIC_ORDER: usize = 25;

/// Exact Maclaurin coefficients of `σ(u) = 1 / (1 + e^{-u})` through
/// `u^order`.
///
/// Derivatives satisfy `σ' = σ(1 - σ)`, so `σ^{(n)} = p_n(σ)` for a
/// polynomial `p_n` with `p_0(s) = s` and `p_{n+1}(s) = p_n'(s)·s(1 - s)`.
/// The n-th coefficient is `p_n(1/2) / n!`.
pub fn logistic_coefficients_exact(order: usize) -> Result<Vec<Ratio<i128>>> {
    if order > MAX_LOGISTIC_ORDER {
        return Err(Error::InvalidArgument(format!("logistic order {order} exceeds {MAX_LOGISTIC_ORDER}")));
    }
    type Q = Ratio<i128>;
    let overflow = || Error::InvalidArgument("logistic coefficient overflow".into());
    let half = Q::new(1, 2);
    // p as ascending coefficients in s
    let mut p: Vec<Q> = vec![Q::zero(), Q::one()];
    let mut fact = Q::one();
    let mut out = Vec::with_capacity(order + 1);
    for n in 0..=order {
        if n > 0 {
            fact = fact.checked_mul(&Q::from_integer(n as i128)).ok_or_else(overflow)?;
            // derivative, then multiply by s - s²
            let dp: Vec<Q> = p
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.checked_mul(&Q::from_integer(k as i128)))
                .collect::<Option<_>>()
                .ok_or_else(overflow)?;
            let mut next = vec![Q::zero(); dp.len() + 2];
            for (k, c) in dp.iter().enumerate() {
                next[k + 1] = next[k + 1].checked_add(c).ok_or_else(overflow)?;
                next[k + 2] = next[k + 2].checked_sub(c).ok_or_else(overflow)?;
            }
            p = next;
        }
        let mut value = Q::zero();
        for c in p.iter().rev() {
            value = value.checked_mul(&half).and_then(|v| v.checked_add(c)).ok_or_else(overflow)?;
        }
        out.push(value / fact);
    }
    Ok(out)
}

/// [`logistic_coefficients_exact`] converted to doubles.
pub fn logistic_coefficients(order: usize) -> Result<Vec<f64>> {
    Ok(logistic_coefficients_exact(order)?
        .iter()
        .map(|r| r.numer().to_f64().unwrap() / r.denom().to_f64().unwrap())
        .collect())
}

/// Taylor expansion of the logistic gate `G(x; γ, c) = σ(-u)`,
/// `u = γ (c - x_prev)`, truncated at `u^order` and expanded into
/// monomials `γ^k c^j`. The result is a polynomial in θ = (γ, c) with
/// per-variable degree at most `order`.
pub fn taylor_logistic(x_prev: f64, order: usize) -> Result<TaylorExpansion> {
    let coeffs = logistic_coefficients(order)?;
    let series: Vec<f64> = coeffs.iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c } else { *c }).collect();
    let series = Poly::univariate(&series);
    // u = γ c - x_prev γ
    let u = Poly::from_terms(2, [(vec![1, 1], 1.0), (vec![1, 0], -x_prev)])?;
    Ok(TaylorExpansion { center: vec![0.0, 0.0], order, poly: series.compose(&u)? })
}

/// Lagrange remainder bound `U a^{M+1} / (M+1)!`, evaluated in log space.
pub fn remainder_bound(u: f64, a: f64, order: usize) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let m1 = order + 1;
    let ln_fact: f64 = (2..=m1).map(|k| (k as f64).ln()).sum();
    (u.ln() + m1 as f64 * a.ln() - ln_fact).exp()
}
