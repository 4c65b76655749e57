//! Polynomial approximation of the derivative of a scalar function on
//! `[-1/2, 1/2]`, plus the separable objectives built from one such function.
//!
//! Series are stored in the Chebyshev basis of the rescaled variable
//! `t = 2x`, so `P(x) = sum_k c_k T_k(2x)`. The error attached to a fit is
//! measured on a dense grid; it is not a proof.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::blockcalc::ScalarPolynomial;
use crate::polyfunc::{DOMAIN_HALF_WIDTH, DOMAIN_TOL};

/// Highest degree tried before giving up.
pub const MAX_DEGREE: usize = 512;

/// Points in the Chebyshev-Lobatto grid used to measure sup errors.
pub const ERROR_GRID: usize = 4096;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChebError {
    #[error("tolerance must lie in (0, 1/4], got {0}")]
    InvalidTolerance(f64),
    #[error("no degree up to {cap} reaches tolerance {eps}; best error {best}")]
    DegreeCapExceeded { cap: usize, eps: f64, best: f64 },
    #[error("x = {0} lies outside [-1/2, 1/2]")]
    DomainViolation(f64),
    #[error("function scale must be finite, got {0}")]
    InvalidScale(f64),
    #[error("polynomial coefficients must be finite")]
    NonFiniteCoefficient,
    #[error("separable objective needs n > 0")]
    ZeroVariables,
    #[error("gradient bound M must be finite and positive, got {0}")]
    InvalidGradientBound(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedFunction {
    /// `sin(s x)`
    Sin,
    /// `cos(s x)`
    Cos,
    /// `exp(s x)`
    Exp,
    /// `exp(-s x^2)`
    Gaussian,
    /// `1 / (1 + exp(-s x))`
    Logistic,
}

fn default_scale() -> f64 {
    1.0
}

/// Shared one-variable function `F` of a separable objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScalarFunction {
    /// `sum_j coeffs[j] x^j`
    Poly { coeffs: Vec<f64> },
    Named {
        name: NamedFunction,
        #[serde(default = "default_scale")]
        scale: f64,
    },
}

impl ScalarFunction {
    pub fn named(name: NamedFunction, scale: f64) -> Self {
        Self::Named { name, scale }
    }

    pub fn poly(coeffs: Vec<f64>) -> Self {
        Self::Poly { coeffs }
    }

    pub fn validate(&self) -> Result<(), ChebError> {
        match self {
            Self::Poly { coeffs } => {
                if coeffs.iter().all(|c| c.is_finite()) {
                    Ok(())
                } else {
                    Err(ChebError::NonFiniteCoefficient)
                }
            }
            Self::Named { scale, .. } => {
                if scale.is_finite() {
                    Ok(())
                } else {
                    Err(ChebError::InvalidScale(*scale))
                }
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::Poly { ref coeffs } => horner(coeffs, x),
            Self::Named { name, scale: s } => match name {
                NamedFunction::Sin => (s * x).sin(),
                NamedFunction::Cos => (s * x).cos(),
                NamedFunction::Exp => (s * x).exp(),
                NamedFunction::Gaussian => (-s * x * x).exp(),
                NamedFunction::Logistic => logistic(s * x),
            },
        }
    }

    /// Closed-form `F'(x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Self::Poly { ref coeffs } => horner(&poly_derivative(coeffs), x),
            Self::Named { name, scale: s } => match name {
                NamedFunction::Sin => s * (s * x).cos(),
                NamedFunction::Cos => -s * (s * x).sin(),
                NamedFunction::Exp => s * (s * x).exp(),
                NamedFunction::Gaussian => -2.0 * s * x * (-s * x * x).exp(),
                NamedFunction::Logistic => {
                    let l = logistic(s * x);
                    s * l * (1.0 - l)
                }
            },
        }
    }
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, &c)| j as f64 * c)
        .collect()
}

/// Chebyshev series `sum_k c_k T_k(2x)` with its measured error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevPoly {
    coeffs: Vec<f64>,
    sup_error_bound: f64,
}

impl ChebyshevPoly {
    /// Wraps coefficients; an empty list is the zero polynomial.
    pub fn new(coeffs: Vec<f64>, sup_error_bound: f64) -> Self {
        let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
        Self {
            coeffs,
            sup_error_bound,
        }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Grid-measured `sup |P - F'|` on the domain.
    pub fn sup_error_bound(&self) -> f64 {
        self.sup_error_bound
    }

    /// Clenshaw evaluation at any real `x` (the series extends beyond the
    /// fitting interval as a polynomial).
    pub fn eval_unchecked(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs, 2.0 * x)
    }

    /// Same polynomial in the monomial basis of `x`.
    pub fn to_monomial(&self) -> Vec<f64> {
        // T_k(t) as monomials in t, then t = 2x.
        let mut out = vec![0.0; self.coeffs.len()];
        let mut prev = vec![1.0];
        let mut cur = vec![0.0, 1.0];
        for (k, &c) in self.coeffs.iter().enumerate() {
            let basis = match k {
                0 => prev.clone(),
                1 => cur.clone(),
                _ => {
                    let mut next = vec![0.0; k + 1];
                    for (j, &v) in cur.iter().enumerate() {
                        next[j + 1] += 2.0 * v;
                    }
                    for (j, &v) in prev.iter().enumerate() {
                        next[j] -= v;
                    }
                    prev = std::mem::replace(&mut cur, next);
                    cur.clone()
                }
            };
            for (j, &b) in basis.iter().enumerate() {
                out[j] += c * b;
            }
        }
        let mut pow = 1.0;
        for o in out.iter_mut() {
            *o *= pow;
            pow *= 2.0;
        }
        out
    }

    /// Largest `|P|` on the Chebyshev-Lobatto grid over `[lo, hi]`.
    pub fn sup_abs_on(&self, lo: f64, hi: f64) -> f64 {
        lobatto(ERROR_GRID, lo, hi)
            .map(|x| self.eval_unchecked(x).abs())
            .fold(0.0, f64::max)
    }

    /// View of `factor * P` usable as a transformation polynomial.
    pub fn scaled(&self, factor: f64) -> ScaledChebyshev<'_> {
        ScaledChebyshev { poly: self, factor }
    }
}

/// `factor * P(x)` for a borrowed series.
#[derive(Debug, Clone, Copy)]
pub struct ScaledChebyshev<'a> {
    poly: &'a ChebyshevPoly,
    factor: f64,
}

impl ScalarPolynomial for ScaledChebyshev<'_> {
    fn degree(&self) -> usize {
        self.poly.degree()
    }

    fn eval(&self, x: f64) -> f64 {
        self.factor * self.poly.eval_unchecked(x)
    }
}

impl ScalarPolynomial for ChebyshevPoly {
    fn degree(&self) -> usize {
        ChebyshevPoly::degree(self)
    }

    fn eval(&self, x: f64) -> f64 {
        self.eval_unchecked(x)
    }
}

fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + coeffs[0]
}

fn lobatto(points: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let last = (points - 1) as f64;
    let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
    (0..points).map(move |k| mid + half * (PI * k as f64 / last).cos())
}

/// Clenshaw evaluation on the domain.
pub fn eval_poly(p: &ChebyshevPoly, x: f64) -> Result<f64, ChebError> {
    if !(x.abs() <= DOMAIN_HALF_WIDTH + DOMAIN_TOL) {
        return Err(ChebError::DomainViolation(x));
    }
    Ok(p.eval_unchecked(x))
}

/// `sup |P - F'|` over the error grid on the domain.
pub fn measure_error(f: &ScalarFunction, p: &ChebyshevPoly) -> f64 {
    lobatto(ERROR_GRID, -DOMAIN_HALF_WIDTH, DOMAIN_HALF_WIDTH)
        .map(|x| (p.eval_unchecked(x) - f.derivative(x)).abs())
        .fold(0.0, f64::max)
}

/// Interpolant of `F'` at the `degree + 1` Chebyshev points of the domain.
pub fn interpolate(f: &ScalarFunction, degree: usize) -> ChebyshevPoly {
    let m = degree + 1;
    let nodes: Vec<f64> = (0..m)
        .map(|j| (PI * (j as f64 + 0.5) / m as f64).cos())
        .collect();
    let values: Vec<f64> = nodes.iter().map(|t| f.derivative(t / 2.0)).collect();
    // cos(pi k (2j+1) / 2m) with the angle reduced exactly mod 2 pi
    let period = 4 * m;
    let coeffs: Vec<f64> = (0..m)
        .map(|k| {
            let s = neumaier_sum((0..m).map(|j| {
                let r = (k * (2 * j + 1)) % period;
                values[j] * (PI * r as f64 / (2 * m) as f64).cos()
            }));
            let w = if k == 0 { 1.0 } else { 2.0 };
            w * s / m as f64
        })
        .collect();
    let mut coeffs = coeffs;
    // coefficients at rounding level carry no information
    let floor = 4.0 * f64::EPSILON * coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    for c in coeffs.iter_mut() {
        if c.abs() < floor {
            *c = 0.0;
        }
    }
    let mut p = ChebyshevPoly::new(coeffs, 0.0);
    p.sup_error_bound = measure_error(f, &p);
    p
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Exact Chebyshev series of the derivative of a monomial-basis polynomial.
fn exact_derivative(coeffs: &[f64]) -> ChebyshevPoly {
    let mut d = poly_derivative(coeffs);
    while d.len() > 1 && d.last() == Some(&0.0) {
        d.pop();
    }
    if d.is_empty() {
        return ChebyshevPoly::new(vec![0.0], 0.0);
    }
    // x^j = (t/2)^j; Horner in t, multiplying the series by t each step.
    let mut series = vec![0.0; d.len()];
    for (j, &c) in d.iter().enumerate().rev() {
        let mut next = vec![0.0; series.len()];
        for (k, &v) in series.iter().enumerate().filter(|(_, v)| **v != 0.0) {
            if k == 0 {
                next[1] += v;
            } else {
                next[k + 1] += v / 2.0;
                next[k - 1] += v / 2.0;
            }
        }
        series = next;
        series[0] += c / 2f64.powi(j as i32);
    }
    ChebyshevPoly::new(series, 0.0)
}

/// Low-degree Chebyshev approximation of `F'` within `eps` on the grid.
///
/// Polynomials are differentiated exactly. Other functions are interpolated
/// at degrees 2, 4, 8, ... up to [`MAX_DEGREE`]; the first degree that meets
/// `eps` is kept and trailing coefficients below `eps / (10 degree)` are
/// dropped when that keeps the error within `eps`.
pub fn approx_derivative(f: &ScalarFunction, eps: f64) -> Result<ChebyshevPoly, ChebError> {
    if !(eps > 0.0 && eps <= 0.25) {
        return Err(ChebError::InvalidTolerance(eps));
    }
    f.validate()?;
    if let ScalarFunction::Poly { coeffs } = f {
        return Ok(exact_derivative(coeffs));
    }
    let mut best = f64::INFINITY;
    let mut degree = 2;
    while degree <= MAX_DEGREE {
        let p = interpolate(f, degree);
        best = best.min(p.sup_error_bound);
        if p.sup_error_bound <= eps {
            return Ok(trim(f, p, eps));
        }
        degree *= 2;
    }
    Err(ChebError::DegreeCapExceeded {
        cap: MAX_DEGREE,
        eps,
        best,
    })
}

fn trim(f: &ScalarFunction, p: ChebyshevPoly, eps: f64) -> ChebyshevPoly {
    let cut = eps / (10.0 * p.degree().max(1) as f64);
    let mut coeffs = p.coeffs.clone();
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() < cut) {
        coeffs.pop();
    }
    if coeffs.len() == p.coeffs.len() {
        return p;
    }
    let mut trimmed = ChebyshevPoly::new(coeffs, 0.0);
    trimmed.sup_error_bound = measure_error(f, &trimmed);
    if trimmed.sup_error_bound <= eps {
        trimmed
    } else {
        p
    }
}

/// `f(x) = F(x_0) + ... + F(x_{n-1})` with one shared `F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeparableObjective {
    pub n: usize,
    #[serde(rename = "M")]
    pub grad_bound: f64,
    pub function: ScalarFunction,
}

impl SeparableObjective {
    pub fn new(n: usize, function: ScalarFunction, grad_bound: f64) -> Result<Self, ChebError> {
        if n == 0 {
            return Err(ChebError::ZeroVariables);
        }
        if !(grad_bound.is_finite() && grad_bound > 0.0) {
            return Err(ChebError::InvalidGradientBound(grad_bound));
        }
        function.validate()?;
        Ok(Self {
            n,
            grad_bound,
            function,
        })
    }

    pub fn evaluate_unchecked(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| self.function.eval(v)).sum()
    }

    pub fn gradient_unchecked(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&v| self.function.derivative(v)).collect()
    }
}
