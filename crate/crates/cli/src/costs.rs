use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;

use qgd_core::descent::resources::{resource_predict, CostParams, CostReport, Regime};

use crate::config::OutputFormat;
use crate::error::CliError;
use crate::output::{fmt_f64, to_json_text, write_json, write_text};

/// One parameter varied over a list of values.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSweep {
    pub param: String,
    pub values: Vec<f64>,
}

impl CostSweep {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let origin = path.display().to_string();
        serde_json::from_str(&text).map_err(|e| CliError::schema(&origin, &e))
    }

    /// Parameter sets, one per value.
    pub fn expand(&self, base: &CostParams, origin: &str) -> Result<Vec<CostParams>, CliError> {
        self.values
            .iter()
            .map(|&v| {
                let mut p = base.clone();
                let count = || -> Result<usize, CliError> {
                    if v.fract() == 0.0 && v >= 0.0 {
                        Ok(v as usize)
                    } else {
                        Err(CliError::invalid(origin, format!("{} must be an integer, got {v}", self.param)))
                    }
                };
                match self.param.as_str() {
                    "n" => p.n = v,
                    "K" => p.k = Some(v),
                    "d" => p.d = Some(v),
                    "v" => p.v = Some(v),
                    "T" => p.t = count()?,
                    "eps" => p.eps = v,
                    "deg_p" => p.deg_p = count()?,
                    "s" => p.s = v,
                    "S_rows" => p.s_rows = v,
                    "p_tensor" => p.p_tensor = v,
                    "delta" => p.delta = v,
                    other => {
                        return Err(CliError::invalid(origin, format!("unknown sweep parameter {other:?}")))
                    }
                }
                Ok(p)
            })
            .collect()
    }
}

pub fn load_params(path: Option<&Path>) -> Result<(CostParams, String), CliError> {
    match path {
        None => Ok((CostParams::default(), "costs".to_string())),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let origin = path.display().to_string();
            let p = serde_json::from_str(&text).map_err(|e| CliError::schema(&origin, &e))?;
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("costs");
            Ok((p, stem.to_string()))
        }
    }
}

fn report_for(p: &CostParams, origin: &str) -> Result<CostReport, CliError> {
    resource_predict(p).map_err(|e| CliError::invalid(origin, e.to_string()))
}

const CSV_HEADER: &str = "regime,formula,per_iteration,total,log10_total";

fn envelope_lines(r: &CostReport, prefix: &str, out: &mut String) {
    for e in &r.envelopes {
        out.push_str(prefix);
        out.push_str(&format!(
            "{},\"{}\",{},{},{}\n",
            e.regime.name(),
            e.formula,
            fmt_f64(e.per_iteration),
            e.total.map(fmt_f64).unwrap_or_else(|| "inf".into()),
            fmt_f64(e.log10_total)
        ));
    }
}

/// Envelope rows as CSV, one per regime.
pub fn envelopes_csv(r: &CostReport) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    envelope_lines(r, "", &mut out);
    out
}

/// Aligned plain-text rendering of the report.
pub fn render_table(r: &CostReport) -> String {
    let p = &r.params;
    let mut out = format!(
        "n = {}, K = {}, d = {}, v = {}, T = {}, eps = {}, deg_p = {}, s = {}, S_rows = {}, p = {}\n",
        fmt_f64(p.n),
        fmt_f64(p.terms()),
        fmt_f64(p.degree()),
        fmt_f64(p.vars()),
        p.t,
        fmt_f64(p.eps),
        p.deg_p,
        fmt_f64(p.s),
        fmt_f64(p.s_rows),
        fmt_f64(p.p_tensor)
    );
    out.push_str(&format!("note: {}\n\n", r.note));
    let rows: Vec<[String; 4]> = r
        .envelopes
        .iter()
        .map(|e| {
            [
                e.regime.name().to_string(),
                e.formula.to_string(),
                format!("{:.6e}", e.per_iteration),
                format!("{:.4}", e.log10_total),
            ]
        })
        .collect();
    let head = ["regime", "envelope", "per_iteration", "log10_total"];
    let mut widths = head.map(str::len);
    for row in &rows {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: [&str; 4]| {
        format!(
            "{:<w0$}  {:<w1$}  {:>w2$}  {:>w3$}\n",
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3]
        )
    };
    out.push_str(&line(head));
    for row in &rows {
        out.push_str(&line([&row[0], &row[1], &row[2], &row[3]]));
    }
    out.push_str("\nimplemented counters per step (depth = q L + c):\n");
    for i in &r.implemented {
        out.push_str(&format!(
            "{:<10} q = {}, c = {}, depth = {}, total depth over T = {:.6e}\n",
            i.regime.name(),
            i.per_iteration.queries,
            i.per_iteration.depth_const,
            i.per_iteration_depth,
            i.total_depth
        ));
    }
    out.push_str("\nlog10 envelope by T:\n");
    let mut header = format!("{:>4}", "T");
    for reg in Regime::ALL {
        header.push_str(&format!("  {:>13}", reg.name()));
    }
    header.push_str("  cheapest\n");
    out.push_str(&header);
    for c in &r.crossover {
        let mut row = format!("{:>4}", c.t);
        for v in &c.log10 {
            row.push_str(&format!("  {v:>13.4}"));
        }
        row.push_str(&format!("  {}\n", c.cheapest.name()));
        out.push_str(&row);
    }
    let ic = &r.iteration_counts;
    out.push_str(&format!(
        "\niterations for delta = {}: convex T = {}, strongly convex T = {}\n",
        fmt_f64(ic.delta),
        ic.convex_t,
        ic.strongly_convex_t
    ));
    out
}

#[derive(Debug, Clone)]
pub struct CostOutcome {
    pub artifacts: Vec<PathBuf>,
    pub table: String,
    pub reports: Vec<CostReport>,
}

/// Writes the cost report for `params`, or for each point of `sweep`.
pub fn compare_costs(
    params: &CostParams,
    name: &str,
    origin: &str,
    sweep: Option<&CostSweep>,
    dir: &Path,
    format: OutputFormat,
) -> Result<CostOutcome, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut artifacts = Vec::new();
    let base = report_for(params, origin)?;
    let table = render_table(&base);
    let path = |suffix: &str| dir.join(format!("{name}.{suffix}"));

    let mut reports = vec![base];
    if let Some(sw) = sweep {
        reports = sw
            .expand(params, origin)?
            .iter()
            .map(|p| report_for(p, origin))
            .collect::<Result<_, _>>()?;
    }
    let p = path("costs.txt");
    write_text(&p, &table)?;
    artifacts.push(p);
    if format.csv() {
        let text = match sweep {
            None => envelopes_csv(&reports[0]),
            Some(sw) => {
                let mut out = format!("{},{CSV_HEADER}\n", sw.param);
                for (v, r) in sw.values.iter().zip(&reports) {
                    envelope_lines(r, &format!("{},", fmt_f64(*v)), &mut out);
                }
                out
            }
        };
        let p = path("costs.csv");
        write_text(&p, &text)?;
        artifacts.push(p);
    }
    if format.json() {
        let v: Value = if sweep.is_some() {
            serde_json::to_value(&reports).expect("plain data")
        } else {
            serde_json::to_value(&reports[0]).expect("plain data")
        };
        let p = path("costs.json");
        write_json(&p, &v)?;
        artifacts.push(p);
    }
    Ok(CostOutcome {
        artifacts,
        table,
        reports,
    })
}

/// JSON text of a report, as written to disk.
pub fn report_json(r: &CostReport) -> String {
    to_json_text(&serde_json::to_value(r).expect("plain data"))
}
