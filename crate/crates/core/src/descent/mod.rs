//! Gradient descent as block-encoding pipelines.
//!
//! Both engines keep the iterate as the diagonal corner `diag(x_t)` and
//! update it with one signed combination plus one amplification per step.
//! The generic engine builds the gradient term by term from single-entry
//! projections; the separable engine applies a fitted polynomial of `F'`
//! to the whole diagonal at once.
//!
//! Costs: before each step the current iterate is treated as a fresh leaf
//! (depth `ceil(log2 N)`, one query), so the counters stored per iteration
//! are the cost of that step alone and are identical across steps. The
//! compounded cost of the whole run follows from `D_{t+1} = a D_t + b`,
//! where `a` is the number of uses of the previous iterate and `b` the
//! depth added around them; see [`CumulativeCost`].

mod calc;
mod generic;
mod init;
pub mod resources;
mod separable;

use serde::{Deserialize, Serialize};

use crate::blockcalc::{BlockEncoding, BlockError, ResourceCounter};
use crate::chebyshev::ChebError;
use crate::polyfunc::PolyError;

pub use calc::Calc;
pub use generic::{
    build_gradient_be, build_partial_be, build_term_be, gd_step_generic, generic_eta, run_generic,
    scale_plan, ScalePlan,
};
pub use init::{initial_state_uniform, uniform_qubits, uniform_with_qubits};
pub use separable::{gd_step_separable, run_separable, SeparablePlan};

/// Fixed amplification gap used by every amplification in both engines.
pub const DELTA_AMP: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Generic,
    Separable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentConfig {
    #[serde(rename = "T")]
    pub t: usize,
    pub eps: f64,
    /// Generic mode derives `eta = 1/(2 M K)`; a value given here must match.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default = "default_delta")]
    pub delta_amp: f64,
    pub mode: Mode,
    /// Require `eta M T < 1/2` and `max |x0_i| <= 1/2 - eta M T` before
    /// running. When off, a run that leaves the box fails at the first
    /// amplification that cannot be applied.
    #[serde(default = "default_true")]
    pub enforce_schedule: bool,
}

fn default_delta() -> f64 {
    DELTA_AMP
}

fn default_true() -> bool {
    true
}

impl DescentConfig {
    pub fn generic(t: usize, eps: f64) -> Self {
        Self {
            t,
            eps,
            eta: None,
            delta_amp: DELTA_AMP,
            mode: Mode::Generic,
            enforce_schedule: true,
        }
    }

    pub fn separable(t: usize, eps: f64, eta: f64) -> Self {
        Self {
            t,
            eps,
            eta: Some(eta),
            delta_amp: DELTA_AMP,
            mode: Mode::Separable,
            enforce_schedule: true,
        }
    }

    pub(crate) fn validate(&self, mode: Mode) -> Result<(), DescentError> {
        if self.mode != mode {
            return Err(DescentError::Config(format!(
                "engine runs {mode:?} mode but config asks for {:?}",
                self.mode
            )));
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(DescentError::Config(format!(
                "eps must lie in (0, 1/2), got {}",
                self.eps
            )));
        }
        if self.delta_amp != DELTA_AMP {
            return Err(DescentError::Config(format!(
                "delta_amp is fixed at 1/2, got {}",
                self.delta_amp
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DescentError {
    #[error("schedule infeasible: eta M T = {eta_m_t} >= 1/2")]
    InfeasibleSchedule { eta_m_t: f64 },
    #[error("initial point has max |x_i| = {norm}, above the schedule bound {bound}")]
    InitialNormTooLarge { norm: f64, bound: f64 },
    #[error("variable {var} does not occur in term {term}")]
    VariableNotInSupport { term: usize, var: usize },
    #[error("term {0} does not exist")]
    TermOutOfRange(usize),
    #[error("term {term}, variable {var}: scale factor {factor} cannot be realized (bound {bound} >= 1); increase M")]
    ScaleOverflow {
        term: usize,
        var: usize,
        factor: f64,
        bound: f64,
    },
    #[error("learning rate {eta} exceeds the admissible {limit}")]
    RateTooLarge { eta: f64, limit: f64 },
    #[error("gradient bound M = {m} is below the fitted sup |F'| = {sup}")]
    GradientBoundTooSmall { m: f64, sup: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Cheb(#[from] ChebError),
    #[error("{}{source}", step.map(|s| format!("step {s}: ")).unwrap_or_default())]
    Block {
        step: Option<usize>,
        source: BlockError,
    },
}

impl From<BlockError> for DescentError {
    fn from(source: BlockError) -> Self {
        Self::Block { step: None, source }
    }
}

impl DescentError {
    pub(crate) fn at_step(self, t: usize) -> Self {
        match self {
            Self::Block { step: None, source } => Self::Block {
                step: Some(t),
                source,
            },
            other => other,
        }
    }
}

/// Compounded counters of the whole run up to an iterate, in `f64` since
/// they grow geometrically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CumulativeCost {
    pub depth_units: f64,
    pub queries: f64,
    /// Naive high-water mark with no ancilla reuse between steps.
    pub ancillas: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterRecord {
    pub t: usize,
    pub x: Vec<f64>,
    pub f: f64,
    pub grad: Vec<f64>,
    pub max_abs_x: f64,
    pub eps: f64,
    /// Counters of the step that produced this iterate.
    pub step_resources: ResourceCounter,
    pub cumulative: CumulativeCost,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChebyshevInfo {
    pub degree: usize,
    pub sup_error: f64,
    pub lambda: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescentTrace {
    pub mode: Mode,
    pub n: usize,
    pub dim: usize,
    pub eta: f64,
    pub eps: f64,
    #[serde(rename = "T")]
    pub t: usize,
    pub iterations: Vec<IterRecord>,
    pub postselect_prob: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chebyshev: Option<ChebyshevInfo>,
}

impl DescentTrace {
    pub fn iterate(&self, t: usize) -> &[f64] {
        &self.iterations[t].x
    }

    pub fn last(&self) -> &[f64] {
        &self.iterations.last().expect("trace holds x0").x
    }

    /// Per-iteration counters (those of the first step), if any step ran.
    pub fn step_resources(&self) -> Option<ResourceCounter> {
        self.iterations.get(1).map(|r| r.step_resources)
    }

    pub fn last_cumulative(&self) -> CumulativeCost {
        self.iterations.last().expect("trace holds x0").cumulative
    }

    /// Largest `|x_{i,t}|` over the whole trace.
    pub fn max_abs_x(&self) -> f64 {
        self.iterations.iter().map(|r| r.max_abs_x).fold(0.0, f64::max)
    }
}

pub(crate) fn max_abs(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Pads to the encoding dimension.
pub(crate) fn padded(x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    v.resize(x.len().next_power_of_two(), 0.0);
    v
}

/// Iterate encoding treated as a fresh leaf for the next step.
pub(crate) fn rebase(x: BlockEncoding) -> BlockEncoding {
    let l = u64::from(x.log_dim());
    let high = x.resources().ancilla_high_water;
    x.with_resources(ResourceCounter::new(l, 1, high))
}

/// Shared run bookkeeping for both engines.
pub(crate) struct Recorder<'f> {
    value: &'f dyn Fn(&[f64]) -> f64,
    grad: &'f dyn Fn(&[f64]) -> Vec<f64>,
    n: usize,
    log_dim: f64,
    records: Vec<IterRecord>,
}

impl<'f> Recorder<'f> {
    pub(crate) fn new(
        n: usize,
        log_dim: u32,
        value: &'f dyn Fn(&[f64]) -> f64,
        grad: &'f dyn Fn(&[f64]) -> Vec<f64>,
    ) -> Self {
        Self {
            value,
            grad,
            n,
            log_dim: f64::from(log_dim),
            records: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, enc: &BlockEncoding) {
        let x: Vec<f64> = enc.real_diagonal()[..self.n].to_vec();
        let res = *enc.resources();
        let cumulative = match self.records.last() {
            None => CumulativeCost {
                depth_units: res.depth_units as f64,
                queries: res.queries as f64,
                ancillas: enc.ancillas(),
            },
            Some(prev) => {
                let a = res.queries as f64;
                let b = res.depth_units as f64 - a * self.log_dim;
                CumulativeCost {
                    depth_units: a * prev.cumulative.depth_units + b,
                    queries: a * prev.cumulative.queries,
                    ancillas: res.ancilla_high_water.max(prev.cumulative.ancillas),
                }
            }
        };
        self.records.push(IterRecord {
            t: self.records.len(),
            f: (self.value)(&x),
            grad: (self.grad)(&x),
            max_abs_x: max_abs(&x),
            eps: enc.eps(),
            step_resources: res,
            cumulative,
            x,
        });
    }

    pub(crate) fn finish(self) -> Vec<IterRecord> {
        self.records
    }
}

/// `(1/n) ||x||^2` read from post-selecting the uniform state.
pub(crate) fn postselect_probability(enc: &BlockEncoding, n: usize) -> Result<f64, DescentError> {
    let phi = crate::blockcalc::ops::uniform_state(n);
    Ok(crate::blockcalc::apply_postselect(enc, &phi)?.prob)
}

/// Checks `eta M T < 1/2` and `max |x0_i| <= 1/2 - eta M T` when `enforce` is set.
pub fn check_schedule(
    x0: &[f64],
    eta: f64,
    m: f64,
    t: usize,
    enforce: bool,
) -> Result<(), DescentError> {
    if !enforce {
        return Ok(());
    }
    let budget = eta * m * t as f64;
    if !(budget < 0.5) {
        return Err(DescentError::InfeasibleSchedule { eta_m_t: budget });
    }
    let bound = 0.5 - budget;
    let norm = max_abs(x0);
    if norm > bound + 1e-12 {
        return Err(DescentError::InitialNormTooLarge { norm, bound });
    }
    Ok(())
}
