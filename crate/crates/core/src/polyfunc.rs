//! Objective functions written as sums of monomials over `n` variables.
//!
//! Everything here lives on the fixed box domain `[-1/2, 1/2]^n`. Terms are
//! stored with their full exponent tuples; duplicate tuples are merged when an
//! objective is built so the term count `K` is minimal.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Half-width of the domain box.
pub const DOMAIN_HALF_WIDTH: f64 = 0.5;

/// Slack allowed when checking membership of the closed domain.
pub const DOMAIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("coordinate {index} = {value} lies outside [-1/2, 1/2]")]
    DomainViolation { index: usize, value: f64 },
    #[error("variable index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("term {term} has {got} exponents, expected {expected}")]
    ExponentLength { term: usize, expected: usize, got: usize },
    #[error("objective needs at least one term")]
    EmptyObjective,
    #[error("variable count n must be positive")]
    ZeroVariables,
    #[error("gradient bound M must be finite and positive, got {0}")]
    InvalidGradientBound(f64),
    #[error("coefficient of term {0} is not finite")]
    NonFiniteCoefficient(usize),
    #[error("sampling budget of {cap} points exceeded ({needed} grid points) and Monte-Carlo sampling is disabled")]
    BudgetExceeded { needed: u128, cap: u64 },
}

/// One monomial `coeff * x_0^{e_0} * ... * x_{n-1}^{e_{n-1}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonomialTerm {
    pub coeff: f64,
    pub exponents: Vec<u32>,
}

impl MonomialTerm {
    pub fn new(coeff: f64, exponents: Vec<u32>) -> Self {
        Self { coeff, exponents }
    }

    /// Total degree `d(f_i)`.
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    /// Number of variables that actually occur, `v(f_i)`.
    pub fn var_count(&self) -> usize {
        self.exponents.iter().filter(|&&e| e > 0).count()
    }

    /// Indices of the variables that occur, `s(f_i)`, in increasing order.
    pub fn support(&self) -> Vec<usize> {
        self.exponents
            .iter()
            .enumerate()
            .filter_map(|(m, &e)| (e > 0).then_some(m))
            .collect()
    }

    pub fn is_constant(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    /// Value of the monomial without its coefficient. `0^0` is 1.
    pub fn eval_monomial(&self, x: &[f64]) -> f64 {
        self.exponents
            .iter()
            .zip(x)
            .filter(|(&e, _)| e > 0)
            .map(|(&e, &xm)| xm.powi(e as i32))
            .product()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeff * self.eval_monomial(x)
    }
}

/// `f(x) = sum_i a_i f_i(x)` together with the user-supplied gradient bound `M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveFunction {
    n: usize,
    terms: Vec<MonomialTerm>,
    #[serde(rename = "M")]
    grad_bound: f64,
}

impl ObjectiveFunction {
    /// Builds an objective, merging duplicate exponent tuples.
    pub fn new(n: usize, terms: Vec<MonomialTerm>, grad_bound: f64) -> Result<Self, PolyError> {
        if n == 0 {
            return Err(PolyError::ZeroVariables);
        }
        if terms.is_empty() {
            return Err(PolyError::EmptyObjective);
        }
        if !(grad_bound.is_finite() && grad_bound > 0.0) {
            return Err(PolyError::InvalidGradientBound(grad_bound));
        }
        for (i, t) in terms.iter().enumerate() {
            if t.exponents.len() != n {
                return Err(PolyError::ExponentLength {
                    term: i,
                    expected: n,
                    got: t.exponents.len(),
                });
            }
            if !t.coeff.is_finite() {
                return Err(PolyError::NonFiniteCoefficient(i));
            }
        }
        Ok(Self {
            n,
            terms: merge_duplicates(terms),
            grad_bound,
        })
    }

    /// The zero function on `n` variables (empty term list).
    pub fn zero(n: usize, grad_bound: f64) -> Self {
        Self {
            n,
            terms: Vec::new(),
            grad_bound,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[MonomialTerm] {
        &self.terms
    }

    /// Gradient-norm bound `M` assumed on the domain.
    pub fn grad_bound(&self) -> f64 {
        self.grad_bound
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms whose gradient is not identically zero.
    pub fn nonconstant_terms(&self) -> impl Iterator<Item = (usize, &MonomialTerm)> {
        self.terms
            .iter()
            .enumerate()
            .filter(|(_, t)| !t.is_constant() && t.coeff != 0.0)
    }

    fn check_point(&self, x: &[f64]) -> Result<(), PolyError> {
        if x.len() != self.n {
            return Err(PolyError::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        check_domain(x)
    }

    /// Evaluates `f` at a point of the domain.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64, PolyError> {
        self.check_point(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// Exact partial derivative with respect to variable `m` (0-based).
    pub fn partial(&self, m: usize) -> Result<ObjectiveFunction, PolyError> {
        if m >= self.n {
            return Err(PolyError::IndexOutOfRange {
                index: m,
                n: self.n,
            });
        }
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exponents[m] >= 1)
            .filter_map(|t| {
                let coeff = t.coeff * f64::from(t.exponents[m]);
                if coeff == 0.0 {
                    return None;
                }
                let mut exponents = t.exponents.clone();
                exponents[m] -= 1;
                Some(MonomialTerm { coeff, exponents })
            })
            .collect();
        Ok(Self {
            n: self.n,
            terms: merge_duplicates(terms),
            grad_bound: self.grad_bound,
        })
    }

    /// All `n` partial derivatives.
    pub fn gradient_field(&self) -> Vec<ObjectiveFunction> {
        (0..self.n)
            .map(|m| self.partial(m).expect("index in range"))
            .collect()
    }

    /// Symbolic gradient evaluated at a domain point.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>, PolyError> {
        self.check_point(x)?;
        Ok(self.gradient_unchecked(x))
    }

    pub(crate) fn gradient_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        for t in &self.terms {
            for m in t.support() {
                let e = t.exponents[m];
                let mut prod = t.coeff * f64::from(e);
                for (k, (&ek, &xk)) in t.exponents.iter().zip(x).enumerate() {
                    let ek = if k == m { ek - 1 } else { ek };
                    if ek > 0 {
                        prod *= xk.powi(ek as i32);
                    }
                }
                g[m] += prod;
            }
        }
        g
    }

    pub fn term_stats(&self) -> TermStats {
        TermStats::of(&self.terms)
    }
}

impl fmt::Display for ObjectiveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}", t.coeff)?;
            for (m, &e) in t.exponents.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", m + 1)?,
                    _ => write!(f, "*x{}^{}", m + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

fn merge_duplicates(terms: Vec<MonomialTerm>) -> Vec<MonomialTerm> {
    // Keep first-occurrence order so term indices stay stable for callers.
    let mut index: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    let mut out: Vec<MonomialTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match index.get(&t.exponents) {
            Some(&i) => out[i].coeff += t.coeff,
            None => {
                index.insert(t.exponents.clone(), out.len());
                out.push(t);
            }
        }
    }
    out
}

pub(crate) fn check_domain(x: &[f64]) -> Result<(), PolyError> {
    for (index, &value) in x.iter().enumerate() {
        if !(value.abs() <= DOMAIN_HALF_WIDTH + DOMAIN_TOL) {
            return Err(PolyError::DomainViolation { index, value });
        }
    }
    Ok(())
}

/// Per-term combinatorial statistics `(v, d, s)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermStat {
    pub v: usize,
    pub d: u32,
    pub support: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermStats {
    /// Number of terms `K`.
    pub k: usize,
    pub per_term: Vec<TermStat>,
    /// `max_i v(f_i)`.
    pub v: usize,
    /// `max_i d(f_i)`.
    pub d: u32,
}

impl TermStats {
    pub fn of(terms: &[MonomialTerm]) -> Self {
        let per_term: Vec<TermStat> = terms
            .iter()
            .map(|t| TermStat {
                v: t.var_count(),
                d: t.degree(),
                support: t.support(),
            })
            .collect();
        Self {
            k: terms.len(),
            v: per_term.iter().map(|s| s.v).max().unwrap_or(0),
            d: per_term.iter().map(|s| s.d).max().unwrap_or(0),
            per_term,
        }
    }
}

/// How `validate_bounds` explores the domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMethod {
    Grid,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy)]
pub struct SamplingBudget {
    /// Maximum number of evaluation points.
    pub cap: u64,
    /// Fall back to Monte-Carlo sampling when the grid is too large.
    pub allow_monte_carlo: bool,
    pub seed: u64,
}

impl Default for SamplingBudget {
    fn default() -> Self {
        Self {
            cap: 1_000_000,
            allow_monte_carlo: true,
            seed: 0x5eed,
        }
    }
}

/// Empirical check of the `|f| <= 1/2` and `|grad f| <= M` assumptions.
///
/// This is sampling, not a proof: a passing report says nothing about points
/// between samples. `rigorous` is always `false`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub max_abs_f: f64,
    pub max_grad_norm: f64,
    pub ok: bool,
    pub rigorous: bool,
    pub method: SamplingMethod,
    pub samples: u64,
}

pub fn validate_bounds(
    f: &ObjectiveFunction,
    grid_points_per_axis: usize,
    budget: SamplingBudget,
) -> Result<BoundsReport, PolyError> {
    let g = grid_points_per_axis.max(1);
    let needed = (g as u128).checked_pow(f.n as u32).unwrap_or(u128::MAX);
    let axis: Vec<f64> = if g == 1 {
        vec![0.0]
    } else {
        (0..g)
            .map(|k| -DOMAIN_HALF_WIDTH + (k as f64) / ((g - 1) as f64))
            .collect()
    };

    let mut max_abs_f = 0.0_f64;
    let mut max_grad = 0.0_f64;
    let mut visit = |x: &[f64]| {
        max_abs_f = max_abs_f.max(f.eval_unchecked(x).abs());
        let gn = f
            .gradient_unchecked(x)
            .iter()
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        max_grad = max_grad.max(gn);
    };

    let (method, samples) = if needed <= u128::from(budget.cap) {
        let mut idx = vec![0usize; f.n];
        let mut x = vec![axis[0]; f.n];
        loop {
            visit(&x);
            // odometer increment
            let mut m = 0;
            loop {
                if m == f.n {
                    break;
                }
                idx[m] += 1;
                if idx[m] < g {
                    x[m] = axis[idx[m]];
                    break;
                }
                idx[m] = 0;
                x[m] = axis[0];
                m += 1;
            }
            if m == f.n {
                break;
            }
        }
        (SamplingMethod::Grid, needed as u64)
    } else if budget.allow_monte_carlo {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
        let mut x = vec![0.0; f.n];
        for _ in 0..budget.cap {
            for xm in x.iter_mut() {
                *xm = rng.random_range(-DOMAIN_HALF_WIDTH..=DOMAIN_HALF_WIDTH);
            }
            visit(&x);
        }
        (SamplingMethod::MonteCarlo, budget.cap)
    } else {
        return Err(PolyError::BudgetExceeded {
            needed,
            cap: budget.cap,
        });
    };

    let ok = max_abs_f <= 0.5 * (1.0 + 1e-12) && max_grad <= f.grad_bound * (1.0 + 1e-12);
    Ok(BoundsReport {
        max_abs_f,
        max_grad_norm: max_grad,
        ok,
        rigorous: false,
        method,
        samples,
    })
}

// JSON ingestion. Validation runs inside deserialization so serde_json
// attaches line/column positions to every error.

const OBJECTIVE_FIELDS: &[&str] = &["n", "M", "terms"];

/// Term list whose exponent lengths are checked as each term is read.
struct TermsSeed(Option<usize>);

impl<'de> serde::de::DeserializeSeed<'de> for TermsSeed {
    type Value = Vec<MonomialTerm>;

    fn deserialize<D: serde::Deserializer<'de>>(self, de: D) -> Result<Self::Value, D::Error> {
        de.deserialize_seq(self)
    }
}

impl<'de> serde::de::Visitor<'de> for TermsSeed {
    type Value = Vec<MonomialTerm>;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a list of monomial terms")
    }

    fn visit_seq<A: serde::de::SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
        let mut terms = Vec::new();
        while let Some(term) = seq.next_element::<MonomialTerm>()? {
            if let Some(n) = self.0 {
                if term.exponents.len() != n {
                    return Err(serde::de::Error::custom(PolyError::ExponentLength {
                        term: terms.len(),
                        expected: n,
                        got: term.exponents.len(),
                    }));
                }
            }
            terms.push(term);
        }
        Ok(terms)
    }
}

struct ObjectiveVisitor;

impl<'de> serde::de::Visitor<'de> for ObjectiveVisitor {
    type Value = ObjectiveFunction;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an objective with fields n, M and terms")
    }

    fn visit_map<A: serde::de::MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
        use serde::de::Error;
        let mut n: Option<usize> = None;
        let mut grad_bound: Option<f64> = None;
        let mut terms: Option<Vec<MonomialTerm>> = None;
        while let Some(key) = map.next_key::<String>()? {
            match key.as_str() {
                "n" if n.is_none() => n = Some(map.next_value()?),
                "M" if grad_bound.is_none() => grad_bound = Some(map.next_value()?),
                "terms" if terms.is_none() => terms = Some(map.next_value_seed(TermsSeed(n))?),
                "n" => return Err(A::Error::duplicate_field("n")),
                "M" => return Err(A::Error::duplicate_field("M")),
                "terms" => return Err(A::Error::duplicate_field("terms")),
                other => return Err(A::Error::unknown_field(other, OBJECTIVE_FIELDS)),
            }
        }
        let n = n.ok_or_else(|| A::Error::missing_field("n"))?;
        let grad_bound = grad_bound.ok_or_else(|| A::Error::missing_field("M"))?;
        let terms = terms.ok_or_else(|| A::Error::missing_field("terms"))?;
        ObjectiveFunction::new(n, terms, grad_bound).map_err(A::Error::custom)
    }
}

impl<'de> Deserialize<'de> for ObjectiveFunction {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        de.deserialize_struct("ObjectiveFunction", OBJECTIVE_FIELDS, ObjectiveVisitor)
    }
}

impl ObjectiveFunction {
    /// Parses the `{ "n", "M", "terms" }` JSON document.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
