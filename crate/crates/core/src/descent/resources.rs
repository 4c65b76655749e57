//! Cost accounting: the implemented per-step counters in closed form, the
//! asymptotic envelopes of each regime, and crossover tables.
//!
//! Envelopes set every hidden constant to 1 and use natural logarithms for
//! `log(1/eps)`. They describe growth, not predicted counts.

use serde::Serialize;

use crate::blockcalc::amplification_rounds;
use crate::polyfunc::{MonomialTerm, ObjectiveFunction};

use super::generic::step_rounds;
use super::{scale_plan, DescentError, ScalePlan, DELTA_AMP};

/// Counters of a circuit built from `queries` uses of a depth-`L` leaf:
/// depth `queries * L + depth_const`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct StepCost {
    pub queries: u64,
    pub depth_const: u64,
}

impl StepCost {
    const LEAF: Self = Self {
        queries: 1,
        depth_const: 0,
    };

    pub fn depth(&self, log_dim: u64) -> u64 {
        self.queries * log_dim + self.depth_const
    }

    fn plus(self, other: Self) -> Self {
        Self {
            queries: self.queries + other.queries,
            depth_const: self.depth_const + other.depth_const,
        }
    }

    fn add_depth(self, depth: u64) -> Self {
        Self {
            depth_const: self.depth_const + depth,
            ..self
        }
    }

    fn repeat(self, uses: u64) -> Self {
        Self {
            queries: self.queries * uses,
            depth_const: self.depth_const * uses,
        }
    }

    fn amplified(self, gamma: f64, delta: f64, eps: f64) -> Self {
        let m = amplification_rounds(gamma, delta, eps);
        self.repeat(m).add_depth(m)
    }

    /// Depth and queries of `t` chained steps from a depth-`L` leaf, following
    /// `D_t = q D_(t-1) + c`, `Q_t = q Q_(t-1)`.
    pub fn compounded(&self, log_dim: u64, t: usize) -> (f64, f64) {
        let q = self.queries as f64;
        let c = self.depth_const as f64;
        let (mut d, mut n) = (log_dim as f64, 1.0);
        for _ in 0..t {
            d = q * d + c;
            n *= q;
        }
        (d, n)
    }
}

fn partial_cost(term: &MonomialTerm, p: usize, m: f64, eps: f64) -> Result<StepCost, f64> {
    let uses = u64::from(term.degree() - 1);
    let base = if uses == 0 {
        StepCost {
            queries: 0,
            depth_const: 1,
        }
    } else {
        StepCost::LEAF.repeat(2 * uses)
    };
    let c = term.coeff * f64::from(term.exponents[p]) / m;
    Ok(match scale_plan(c, term.degree())? {
        ScalePlan::Keep => base,
        ScalePlan::Down(_) => base.add_depth(1),
        ScalePlan::Amplify { gamma, delta } => base.amplified(gamma, delta, eps),
    })
}

fn term_cost(term: &MonomialTerm, index: usize, m: f64, eps: f64) -> Result<StepCost, DescentError> {
    let support = term.support();
    let mut sum = StepCost::default();
    for &p in &support {
        let part = partial_cost(term, p, m, eps).map_err(|bound| DescentError::ScaleOverflow {
            term: index,
            var: p,
            factor: term.coeff * f64::from(term.exponents[p]) / m,
            bound,
        })?;
        sum = sum.plus(part);
    }
    Ok(match support.len() {
        1 => sum.add_depth(1),
        2 => sum,
        v => sum.amplified(v as f64 / 2.0, DELTA_AMP, eps),
    })
}

/// Exact counters of one generic step, derived from the term structure.
pub fn generic_step_cost(f: &ObjectiveFunction, eps: f64) -> Result<StepCost, DescentError> {
    let mut grad = StepCost::default();
    for (i, t) in f.nonconstant_terms() {
        grad = grad.plus(term_cost(t, i, f.grad_bound(), eps)?);
    }
    let m2 = step_rounds(eps);
    Ok(StepCost::LEAF.plus(grad).repeat(m2).add_depth(m2))
}

/// Exact counters of one separable step with a degree-`degree` polynomial.
pub fn separable_step_cost(degree: usize, rescaled: bool, eps: f64) -> StepCost {
    let d = degree as u64;
    let s = StepCost::LEAF.repeat(d).add_depth(d + u64::from(rescaled));
    let m2 = step_rounds(eps);
    StepCost::LEAF.plus(s).repeat(m2).add_depth(m2)
}

/// `K` distinct terms of total degree `d` with `v` variables each, every
/// coefficient `1/(2K)` and `M = d`, so each partial is scaled down.
pub fn synthetic_objective(n: usize, k: usize, d: u32, v: usize) -> Result<ObjectiveFunction, DescentError> {
    if v == 0 || v > n || v as u32 > d || k == 0 {
        return Err(DescentError::Config(format!(
            "no terms with {v} of {n} variables and degree {d}"
        )));
    }
    let mut terms = Vec::with_capacity(k);
    let mut support: Vec<usize> = (0..v).collect();
    'outer: loop {
        let mut parts = vec![1u32; v];
        parts[0] = d - v as u32 + 1;
        loop {
            let mut e = vec![0u32; n];
            for (&s, &p) in support.iter().zip(&parts) {
                e[s] = p;
            }
            terms.push(MonomialTerm::new(1.0 / (2.0 * k as f64), e));
            if terms.len() == k {
                break 'outer;
            }
            if !next_composition(&mut parts) {
                break;
            }
        }
        if !next_combination(&mut support, n) {
            return Err(DescentError::Config(format!(
                "only {} distinct terms with {v} of {n} variables and degree {d}",
                terms.len()
            )));
        }
    }
    Ok(ObjectiveFunction::new(n, terms, f64::from(d))?)
}

/// Next composition in reverse-lexicographic order, all parts positive.
fn next_composition(parts: &mut [u32]) -> bool {
    let v = parts.len();
    if v < 2 {
        return false;
    }
    // find the rightmost non-final position holding more than 1
    let Some(i) = (0..v - 1).rev().find(|&i| parts[i] > 1) else {
        return false;
    };
    let tail: u32 = parts[i + 1..].iter().sum();
    parts[i] -= 1;
    parts[i + 1] = tail + 1 - (v - i - 2) as u32;
    for p in parts[i + 2..].iter_mut() {
        *p = 1;
    }
    true
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let Some(i) = (0..k).rev().find(|&i| c[i] < n - k + i) else {
        return false;
    };
    c[i] += 1;
    for j in i + 1..k {
        c[j] = c[j - 1] + 1;
    }
    true
}

/// Inputs of the cost comparison. `K`, `d`, `v` default to the homogeneous
/// case `K = s n^p`, `d = 2p`, `v = p`.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostParams {
    pub n: f64,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(rename = "T")]
    pub t: usize,
    pub eps: f64,
    pub deg_p: usize,
    pub s: f64,
    #[serde(rename = "S_rows")]
    pub s_rows: f64,
    pub p_tensor: f64,
    /// Target accuracy for the convex and strongly convex iteration counts.
    pub delta: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            n: 16.0,
            k: None,
            d: None,
            v: None,
            t: 3,
            eps: 1e-3,
            deg_p: 8,
            s: 2.0,
            s_rows: 2.0,
            p_tensor: 2.0,
            delta: 0.01,
        }
    }
}

impl CostParams {
    pub fn terms(&self) -> f64 {
        self.k.unwrap_or(self.s * self.n.powf(self.p_tensor))
    }

    pub fn degree(&self) -> f64 {
        self.d.unwrap_or(2.0 * self.p_tensor)
    }

    pub fn vars(&self) -> f64 {
        self.v.unwrap_or(self.p_tensor)
    }

    pub fn validate(&self) -> Result<(), DescentError> {
        let positive = [
            ("n", self.n),
            ("K", self.terms()),
            ("d", self.degree()),
            ("v", self.vars()),
            ("eps", self.eps),
            ("s", self.s),
            ("S_rows", self.s_rows),
            ("p_tensor", self.p_tensor),
            ("delta", self.delta),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(DescentError::Config(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        if self.n < 2.0 {
            return Err(DescentError::Config(format!("n must be at least 2, got {}", self.n)));
        }
        if self.t == 0 || self.deg_p == 0 {
            return Err(DescentError::Config("T and deg_p must be positive".into()));
        }
        if !(self.eps < 0.5 && self.delta < 1.0) {
            return Err(DescentError::Config("eps must be below 1/2 and delta below 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Generic,
    Separable,
    HighlySparse,
    Rebentrost,
    Classical,
}

impl Regime {
    pub const ALL: [Regime; 5] = [
        Regime::Generic,
        Regime::Separable,
        Regime::HighlySparse,
        Regime::Rebentrost,
        Regime::Classical,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Generic => "generic",
            Regime::Separable => "separable",
            Regime::HighlySparse => "highly_sparse",
            Regime::Rebentrost => "rebentrost",
            Regime::Classical => "classical",
        }
    }

    pub fn formula(&self) -> &'static str {
        match self {
            Regime::Generic => "log2(n) * (K^2 d v^2 ln(1/eps))^T",
            Regime::Separable => "log2(n) * (deg_p ln(1/eps))^T",
            Regime::HighlySparse => "log2(n) * (s^2 S_rows^2 p ln(1/eps))^T",
            Regime::Rebentrost => "log2(n) * p^(5T) s^T / eps^(4T)",
            Regime::Classical => "n d K v T",
        }
    }

    /// `log10` of the envelope after `t` iterations.
    pub fn log10_envelope(&self, p: &CostParams, t: usize) -> f64 {
        let t = t as f64;
        let ln_inv = (1.0 / p.eps).ln();
        let log_n = p.n.log2().log10();
        match self {
            Regime::Generic => {
                log_n + t * (p.terms().powi(2) * p.degree() * p.vars().powi(2) * ln_inv).log10()
            }
            Regime::Separable => log_n + t * (p.deg_p as f64 * ln_inv).log10(),
            Regime::HighlySparse => {
                log_n + t * (p.s.powi(2) * p.s_rows.powi(2) * p.p_tensor * ln_inv).log10()
            }
            Regime::Rebentrost => {
                log_n + t * (5.0 * p.p_tensor.log10() + p.s.log10() - 4.0 * p.eps.log10())
            }
            Regime::Classical => (p.n * p.degree() * p.terms() * p.vars() * t).log10(),
        }
    }

    /// Envelope after `t` iterations, evaluated directly; `inf` on overflow.
    pub fn envelope(&self, p: &CostParams, t: usize) -> f64 {
        let ln_inv = (1.0 / p.eps).ln();
        let log_n = p.n.log2();
        let ti = t as i32;
        match self {
            Regime::Generic => {
                log_n * (p.terms().powi(2) * p.degree() * p.vars().powi(2) * ln_inv).powi(ti)
            }
            Regime::Separable => log_n * (p.deg_p as f64 * ln_inv).powi(ti),
            Regime::HighlySparse => {
                log_n * (p.s.powi(2) * p.s_rows.powi(2) * p.p_tensor * ln_inv).powi(ti)
            }
            Regime::Rebentrost => {
                log_n * p.p_tensor.powi(5 * ti) * p.s.powi(ti) / p.eps.powi(4 * ti)
            }
            Regime::Classical => p.n * p.degree() * p.terms() * p.vars() * t as f64,
        }
    }
}

/// Implemented counters for one step, and compounded over `T` steps.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImplementedRow {
    pub regime: Regime,
    pub formula: String,
    pub per_iteration: StepCost,
    pub per_iteration_depth: u64,
    pub total_depth: f64,
    pub total_queries: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeRow {
    pub regime: Regime,
    pub formula: &'static str,
    /// The envelope at `T = 1`.
    pub per_iteration: f64,
    pub total: Option<f64>,
    pub log10_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverRow {
    #[serde(rename = "T")]
    pub t: usize,
    /// `log10` envelope per regime, in [`Regime::ALL`] order.
    pub log10: Vec<f64>,
    /// Cheapest regime at this `T`.
    pub cheapest: Regime,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationCounts {
    pub delta: f64,
    pub convex_t: usize,
    pub strongly_convex_t: usize,
    /// `log10` envelope per regime at the convex and strongly convex counts.
    pub convex_log10: Vec<f64>,
    pub strongly_convex_log10: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostReport {
    pub params: CostParams,
    pub note: &'static str,
    pub implemented: Vec<ImplementedRow>,
    pub envelopes: Vec<EnvelopeRow>,
    pub crossover: Vec<CrossoverRow>,
    /// First `T` at which each quantum regime costs more than the classical
    /// baseline, if within the table.
    pub classical_crossover: Vec<(Regime, Option<usize>)>,
    pub iteration_counts: IterationCounts,
}

pub const ENVELOPE_NOTE: &str =
    "envelopes are asymptotic growth laws with all constants set to 1, not predicted counts";

/// Per-step counters of the generic engine on a family with `K` terms of
/// degree `d` in `v` variables, all partials scaled down.
pub fn generic_family_cost(k: u64, d: u32, v: usize, eps: f64) -> Result<StepCost, DescentError> {
    let mut e = vec![1; v];
    e[0] = d + 1 - v as u32;
    let term = MonomialTerm::new(1.0 / (2.0 * k as f64), e);
    let one = term_cost(&term, 0, f64::from(d), eps)?;
    let m2 = step_rounds(eps);
    Ok(StepCost::LEAF.plus(one.repeat(k)).repeat(m2).add_depth(m2))
}

fn log_dim(n: f64) -> u64 {
    n.log2().ceil() as u64
}

pub fn resource_predict(p: &CostParams) -> Result<CostReport, DescentError> {
    p.validate()?;
    let l = log_dim(p.n);
    let mut implemented = Vec::new();
    let (k, d, v) = (p.terms(), p.degree(), p.vars());
    let integral = |x: f64| x.fract() == 0.0 && x <= u32::MAX as f64;
    if integral(k) && integral(d) && integral(v) && v <= d {
        let cost = generic_family_cost(k as u64, d as u32, v as usize, p.eps)?;
        implemented.push(implemented_row(
            Regime::Generic,
            format!("K = {k}, d = {d}, v = {v}: queries q, depth q L + c per step"),
            cost,
            l,
            p.t,
        ));
    }
    let sep = separable_step_cost(p.deg_p, true, p.eps);
    implemented.push(implemented_row(
        Regime::Separable,
        format!("deg_p = {}: queries q, depth q L + c per step", p.deg_p),
        sep,
        l,
        p.t,
    ));

    let envelopes = Regime::ALL
        .iter()
        .map(|r| {
            let lg = r.log10_envelope(p, p.t);
            let total = r.envelope(p, p.t);
            EnvelopeRow {
                regime: *r,
                formula: r.formula(),
                per_iteration: r.envelope(p, 1),
                total: total.is_finite().then_some(total),
                log10_total: lg,
            }
        })
        .collect();

    let crossover = (1..=p.t)
        .map(|t| {
            let log10: Vec<f64> = Regime::ALL.iter().map(|r| r.log10_envelope(p, t)).collect();
            let best = (0..log10.len())
                .min_by(|&a, &b| log10[a].total_cmp(&log10[b]))
                .expect("five regimes");
            CrossoverRow {
                t,
                log10,
                cheapest: Regime::ALL[best],
            }
        })
        .collect();

    let classical_crossover = Regime::ALL[..4]
        .iter()
        .map(|r| {
            let first = (1..=p.t).find(|&t| {
                r.log10_envelope(p, t) > Regime::Classical.log10_envelope(p, t)
            });
            (*r, first)
        })
        .collect();

    let convex_t = (1.0 / p.delta).ceil() as usize;
    let strongly_convex_t = ((1.0 / p.delta).ln().ceil() as usize).max(1);
    let at = |t: usize| Regime::ALL.iter().map(|r| r.log10_envelope(p, t)).collect();
    Ok(CostReport {
        params: p.clone(),
        note: ENVELOPE_NOTE,
        implemented,
        envelopes,
        crossover,
        classical_crossover,
        iteration_counts: IterationCounts {
            delta: p.delta,
            convex_t,
            strongly_convex_t,
            convex_log10: at(convex_t),
            strongly_convex_log10: at(strongly_convex_t),
        },
    })
}

fn implemented_row(regime: Regime, formula: String, cost: StepCost, l: u64, t: usize) -> ImplementedRow {
    let (total_depth, total_queries) = cost.compounded(l, t);
    ImplementedRow {
        regime,
        formula,
        per_iteration: cost,
        per_iteration_depth: cost.depth(l),
        total_depth,
        total_queries,
    }
}
