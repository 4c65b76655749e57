use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use qgd_core::descent::resources::{generic_step_cost, separable_step_cost, StepCost};
use qgd_core::descent::{run_generic, run_separable, Calc, SeparablePlan};
use qgd_core::oracle::{classical_gd, OracleError, OracleTrace};
use qgd_core::polyfunc::TermStats;
use qgd_core::{AuditLog, DescentError, DescentTrace, Differentiable};

use crate::config::{ExperimentConfig, ObjectiveSpec};
use crate::error::CliError;
use crate::output::{fmt_f64, write_json, write_text};

/// Oracle deviation allowance per iteration and unit of `eps`.
pub const DEVIATION_CONSTANT: f64 = 16.0;

/// Files written by a run plus its report.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub name: String,
    pub artifacts: Vec<PathBuf>,
    pub report: Value,
    pub trace: DescentTrace,
}

#[derive(Debug, Clone, Serialize)]
struct Comparison {
    /// `max_i |x_sim - x_oracle|` per iteration.
    deviation: Vec<f64>,
    max_deviation: f64,
    bound: f64,
    within_bound: bool,
    /// Iteration at which the oracle left the domain, if it did.
    oracle_exit: Option<usize>,
}

/// Runs one configured experiment and writes its artifacts.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    let name = cfg.name().to_string();
    let descent_err = |source: DescentError| CliError::Descent {
        name: name.clone(),
        source,
    };
    let x0 = cfg.resolve_x0()?;
    let dcfg = cfg.descent();
    let mut log = AuditLog::new();
    let trace = {
        let mut calc = Calc::new(cfg.audit.then_some(&mut log));
        match &cfg.objective {
            ObjectiveSpec::Polynomial(f) => run_generic(f, &x0, &dcfg, &mut calc),
            ObjectiveSpec::Separable(f) => run_separable(f, &x0, &dcfg, &mut calc),
        }
        .map_err(descent_err)?
    };

    let mut report = serde_json::Map::new();
    report.insert("name".into(), json!(name));
    report.insert("mode".into(), json!(trace.mode));
    report.insert("n".into(), json!(trace.n));
    report.insert("T".into(), json!(trace.t));
    report.insert("eps".into(), json!(trace.eps));
    report.insert("eta".into(), json!(trace.eta));
    report.insert("norm_safety".into(), norm_safety(cfg, &trace, &x0));
    report.insert("postselection".into(), postselection(&trace));
    if cfg.report.comparison {
        let oracle = match &cfg.objective {
            ObjectiveSpec::Polynomial(f) => oracle_trace(f, &x0, trace.eta, trace.t),
            ObjectiveSpec::Separable(f) => oracle_trace(f, &x0, trace.eta, trace.t),
        };
        let sup = trace.chebyshev.as_ref().map(|c| c.sup_error);
        let cmp = compare(&trace, &oracle.0, oracle.1, sup);
        report.insert("comparison".into(), serde_json::to_value(cmp).expect("plain data"));
    }
    if cfg.report.resources {
        report.insert("resources".into(), resources(cfg, &trace).map_err(descent_err)?);
    }
    let report = Value::Object(report);

    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut artifacts = Vec::new();
    let path = |suffix: &str| dir.join(format!("{name}.{suffix}"));
    if cfg.output.format.json() {
        let p = path("trace.json");
        write_json(&p, &serde_json::to_value(&trace).expect("plain data"))?;
        artifacts.push(p);
    }
    if cfg.output.format.csv() {
        let p = path("iterates.csv");
        write_text(&p, &iterates_csv(&trace))?;
        artifacts.push(p);
    }
    let p = path("report.json");
    write_json(&p, &report)?;
    artifacts.push(p);
    if cfg.audit {
        let p = path("audit.jsonl");
        write_text(&p, &log.to_jsonl())?;
        artifacts.push(p);
    }
    Ok(RunOutcome {
        name,
        artifacts,
        report,
        trace,
    })
}

fn oracle_trace<F: Differentiable>(f: &F, x0: &[f64], eta: f64, t: usize) -> (OracleTrace, Option<usize>) {
    match classical_gd(f, x0, eta, t) {
        Ok(tr) => (tr, None),
        Err(OracleError::DomainExit { step, trace }) => (trace, Some(step)),
        Err(_) => (OracleTrace::default(), Some(0)),
    }
}

/// Allowed `max_t ||x_sim,t - x_oracle,t||_inf`. The separable engine follows
/// the fitted derivative, so its allowance adds the fit error.
pub fn deviation_bound(t: usize, eps: f64, sup_error: Option<f64>) -> f64 {
    let base = DEVIATION_CONSTANT * t as f64 * eps;
    match sup_error {
        None => base,
        Some(s) => 10.0 * (s + base),
    }
}

fn compare(trace: &DescentTrace, oracle: &OracleTrace, exit: Option<usize>, sup: Option<f64>) -> Comparison {
    let deviation: Vec<f64> = trace
        .iterations
        .iter()
        .zip(&oracle.steps)
        .map(|(s, o)| {
            s.x.iter()
                .zip(&o.x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    let max_deviation = deviation.iter().copied().fold(0.0, f64::max);
    let bound = deviation_bound(trace.t, trace.eps, sup);
    Comparison {
        within_bound: max_deviation <= bound,
        deviation,
        max_deviation,
        bound,
        oracle_exit: exit,
    }
}

fn norm_safety(cfg: &ExperimentConfig, trace: &DescentTrace, x0: &[f64]) -> Value {
    let budget = trace.eta * cfg.objective.grad_bound() * trace.t as f64;
    let x0_max = x0.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let max_abs = trace.max_abs_x();
    json!({
        "eta_m_t": budget,
        "x0_max_abs": x0_max,
        "x0_bound": 0.5 - budget,
        "schedule_satisfied": budget < 0.5 && x0_max <= 0.5 - budget + 1e-12,
        "max_abs_x": max_abs,
        "within_box": max_abs <= 0.5,
    })
}

fn postselection(trace: &DescentTrace) -> Value {
    let x = trace.last();
    let expected = x.iter().map(|v| v * v).sum::<f64>() / trace.n as f64;
    json!({
        "probability": trace.postselect_prob,
        "expected": expected,
        "abs_error": (trace.postselect_prob - expected).abs(),
    })
}

fn resources(cfg: &ExperimentConfig, trace: &DescentTrace) -> Result<Value, DescentError> {
    let log_dim = trace.dim.trailing_zeros() as u64;
    let ln_inv = (1.0 / trace.eps).ln();
    let log_n = (trace.n.max(2) as f64).log2();
    let t = trace.t as f64;
    let (predicted, envelope) = match &cfg.objective {
        ObjectiveSpec::Polynomial(f) => {
            let terms: Vec<_> = f.nonconstant_terms().map(|(_, t)| t.clone()).collect();
            let s = TermStats::of(&terms);
            let base = (s.k.max(1) as f64).powi(2) * f64::from(s.d.max(1)) * (s.v.max(1) as f64).powi(2) * ln_inv;
            let env = json!({
                "formula": "log2(n) * (K^2 d v^2 ln(1/eps))^T",
                "K": s.k,
                "d": s.d,
                "v": s.v,
                "per_iteration": log_n * base,
                "log10_total": log_n.log10() + t * base.log10(),
            });
            (generic_step_cost(f, trace.eps)?, env)
        }
        ObjectiveSpec::Separable(_) => {
            let info = trace.chebyshev.as_ref().expect("separable traces carry the fit");
            let base = (info.degree.max(1) as f64) * ln_inv;
            let env = json!({
                "formula": "log2(n) * (deg_p ln(1/eps))^T",
                "deg_p": info.degree,
                "per_iteration": log_n * base,
                "log10_total": log_n.log10() + t * base.log10(),
            });
            (separable_step_cost(info.degree, info.scale != 1.0, trace.eps), env)
        }
    };
    let steps: Vec<_> = trace.iterations.iter().skip(1).map(|r| r.step_resources).collect();
    let identical = steps
        .windows(2)
        .all(|w| w[0].depth_units == w[1].depth_units && w[0].queries == w[1].queries);
    let monotone = trace
        .iterations
        .windows(2)
        .all(|w| w[1].cumulative.depth_units >= w[0].cumulative.depth_units);
    let measured = trace.step_resources();
    let matches = measured.map_or(true, |m| {
        m.queries == predicted.queries && m.depth_units == predicted.depth(log_dim)
    });
    let last = trace.last_cumulative();
    Ok(json!({
        "per_iteration": measured,
        "predicted": predicted_value(&predicted, log_dim),
        "predicted_matches": matches,
        "identical_increments": identical,
        "monotone_cumulative": monotone,
        "cumulative": last,
        "envelope": envelope,
        "note": qgd_core::descent::resources::ENVELOPE_NOTE,
    }))
}

fn predicted_value(c: &StepCost, log_dim: u64) -> Value {
    json!({
        "queries": c.queries,
        "depth_const": c.depth_const,
        "depth_units": c.depth(log_dim),
    })
}

fn iterates_csv(trace: &DescentTrace) -> String {
    let mut out = String::from("t");
    for i in 0..trace.n {
        out.push_str(&format!(",x{i}"));
    }
    out.push_str(",f,max_abs_x,eps\n");
    for r in &trace.iterations {
        out.push_str(&r.t.to_string());
        for v in &r.x {
            out.push(',');
            out.push_str(&fmt_f64(*v));
        }
        for v in [r.f, r.max_abs_x, r.eps] {
            out.push(',');
            out.push_str(&fmt_f64(v));
        }
        out.push('\n');
    }
    out
}

/// Separable plan for a config, for callers that only need the fit.
pub fn separable_plan(cfg: &ExperimentConfig) -> Option<Result<SeparablePlan, DescentError>> {
    match &cfg.objective {
        ObjectiveSpec::Separable(f) => Some(SeparablePlan::new(f, cfg.eta.unwrap_or(0.0), cfg.eps)),
        ObjectiveSpec::Polynomial(_) => None,
    }
}

pub fn artifact_list(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| p.file_name().map(Path::new).unwrap_or(p).display().to_string())
        .collect::<Vec<_>>()
        .join(", ")
}
