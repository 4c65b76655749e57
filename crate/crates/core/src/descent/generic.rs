use crate::blockcalc::{amplification_rounds, BlockEncoding};
use crate::oracle::Differentiable;
use crate::polyfunc::{check_domain, ObjectiveFunction, PolyError};

use super::{
    check_schedule, padded, postselect_probability, rebase, Calc, DescentConfig, DescentError,
    DescentTrace, Mode, Recorder, DELTA_AMP,
};

/// How a partial-derivative encoding gets its scalar factor `a_i i_p / M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalePlan {
    /// `|c| = 1`.
    Keep,
    /// `|c| < 1`: divide by `1/|c|`.
    Down(f64),
    /// `|c| > 1`: amplify by `|c|`. `delta` comes from the a-priori bound
    /// `|c| 2^(1-d)` on the amplified corner.
    Amplify { gamma: f64, delta: f64 },
}

/// Plan for factor `c` on a monomial product of total degree `d - 1`.
///
/// Returns the a-priori corner bound as the error when `|c|` is too large to
/// amplify.
pub fn scale_plan(c: f64, degree: u32) -> Result<ScalePlan, f64> {
    let mag = c.abs();
    if (mag - 1.0).abs() <= 1e-15 {
        return Ok(ScalePlan::Keep);
    }
    if mag < 1.0 {
        return Ok(ScalePlan::Down(1.0 / mag));
    }
    let bound = mag * 2f64.powi(1 - degree as i32);
    if bound >= 1.0 {
        return Err(bound);
    }
    let delta = if bound <= 0.5 { DELTA_AMP } else { 1.0 - bound };
    Ok(ScalePlan::Amplify { gamma: mag, delta })
}

/// Learning rate `1/(2 M K)`, with `K` the number of terms with a non-zero
/// gradient (at least 1).
pub fn generic_eta(f: &ObjectiveFunction) -> f64 {
    let k = f.nonconstant_terms().count().max(1);
    1.0 / (2.0 * f.grad_bound() * k as f64)
}

/// Encoding of `(1/M) d(a_i f_i)/dx_p |p><p|` built from the iterate `x`.
pub fn build_partial_be(
    calc: &mut Calc,
    x: &BlockEncoding,
    f: &ObjectiveFunction,
    term: usize,
    p: usize,
    eps: f64,
) -> Result<BlockEncoding, DescentError> {
    let t = f.terms().get(term).ok_or(DescentError::TermOutOfRange(term))?;
    if p >= f.n() {
        return Err(PolyError::IndexOutOfRange { index: p, n: f.n() }.into());
    }
    let ip = t.exponents[p];
    if ip == 0 {
        return Err(DescentError::VariableNotInSupport { term, var: p });
    }
    let mut acc: Option<BlockEncoding> = None;
    for (m, &e) in t.exponents.iter().enumerate() {
        let uses = if m == p { e - 1 } else { e };
        for _ in 0..uses {
            let factor = calc.entry_project(x, m, p)?;
            acc = Some(match acc {
                None => factor,
                Some(prev) => calc.product(&prev, &factor)?,
            });
        }
    }
    let base = match acc {
        Some(b) => b,
        None => calc.projector(x.dim(), p)?,
    };
    let c = t.coeff * f64::from(ip) / f.grad_bound();
    let plan = scale_plan(c, t.degree()).map_err(|bound| DescentError::ScaleOverflow {
        term,
        var: p,
        factor: c,
        bound,
    })?;
    let scaled = match plan {
        ScalePlan::Keep => base,
        ScalePlan::Down(q) => calc.scale_down(&base, q)?,
        ScalePlan::Amplify { gamma, delta } => calc.amplify(&base, gamma, delta, eps)?,
    };
    if c < 0.0 {
        Ok(calc.lcu(&[&scaled], &[-1.0])?)
    } else {
        Ok(scaled)
    }
}

/// Encoding of `(1/(2M)) diag(grad(a_i f_i))` for one non-constant term.
pub fn build_term_be(
    calc: &mut Calc,
    x: &BlockEncoding,
    f: &ObjectiveFunction,
    term: usize,
    eps: f64,
) -> Result<BlockEncoding, DescentError> {
    let t = f.terms().get(term).ok_or(DescentError::TermOutOfRange(term))?;
    let support = t.support();
    let partials = support
        .iter()
        .map(|&p| build_partial_be(calc, x, f, term, p, eps))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&BlockEncoding> = partials.iter().collect();
    let sum = calc.lcu(&refs, &vec![1.0; refs.len()])?;
    // sum carries 1/v; rescale by v/2
    let v = support.len();
    Ok(match v {
        1 => calc.scale_down(&sum, 2.0)?,
        2 => sum,
        _ => calc.amplify(&sum, v as f64 / 2.0, DELTA_AMP, eps)?,
    })
}

/// Encoding of `(1/(2 M K)) diag(grad f)` at the iterate encoded by `x`.
pub fn build_gradient_be(
    calc: &mut Calc,
    x: &BlockEncoding,
    f: &ObjectiveFunction,
    eps: f64,
) -> Result<BlockEncoding, DescentError> {
    let terms = f
        .nonconstant_terms()
        .map(|(i, _)| build_term_be(calc, x, f, i, eps))
        .collect::<Result<Vec<_>, _>>()?;
    if terms.is_empty() {
        return Ok(BlockEncoding::zero(x.dim()));
    }
    let refs: Vec<&BlockEncoding> = terms.iter().collect();
    Ok(calc.lcu(&refs, &vec![1.0; refs.len()])?)
}

/// One step `x - eta grad f(x)` with `eta = 1/(2 M K)`.
pub fn gd_step_generic(
    calc: &mut Calc,
    x: &BlockEncoding,
    f: &ObjectiveFunction,
    eps: f64,
) -> Result<BlockEncoding, DescentError> {
    let g = build_gradient_be(calc, x, f, eps)?;
    let half = calc.lcu(&[x, &g], &[1.0, -1.0])?;
    Ok(calc.amplify(&half, 2.0, DELTA_AMP, eps)?)
}

/// Uses of the amplifier that removes the final factor 1/2.
pub(crate) fn step_rounds(eps: f64) -> u64 {
    amplification_rounds(2.0, DELTA_AMP, eps)
}

/// `T` generic steps from `x0`.
pub fn run_generic(
    f: &ObjectiveFunction,
    x0: &[f64],
    cfg: &DescentConfig,
    calc: &mut Calc,
) -> Result<DescentTrace, DescentError> {
    cfg.validate(Mode::Generic)?;
    let eta = generic_eta(f);
    if let Some(given) = cfg.eta {
        if (given - eta).abs() > 1e-12 * eta {
            return Err(DescentError::Config(format!(
                "generic mode fixes eta = 1/(2MK) = {eta}; got {given}"
            )));
        }
    }
    if x0.len() != f.n() {
        return Err(PolyError::DimensionMismatch {
            expected: f.n(),
            got: x0.len(),
        }
        .into());
    }
    check_domain(x0)?;
    check_schedule(x0, eta, f.grad_bound(), cfg.t, cfg.enforce_schedule)?;

    let value = |x: &[f64]| f.value(x);
    let grad = |x: &[f64]| f.grad(x);
    let mut x = calc.diag_encode(&padded(x0))?;
    let mut rec = Recorder::new(f.n(), x.log_dim(), &value, &grad);
    rec.push(&x);
    for t in 1..=cfg.t {
        x = gd_step_generic(calc, &rebase(x), f, cfg.eps).map_err(|e| e.at_step(t))?;
        rec.push(&x);
    }
    let prob = postselect_probability(&x, f.n())?;
    Ok(DescentTrace {
        mode: Mode::Generic,
        n: f.n(),
        dim: x.dim(),
        eta,
        eps: cfg.eps,
        t: cfg.t,
        iterations: rec.finish(),
        postselect_prob: prob,
        chebyshev: None,
    })
}
