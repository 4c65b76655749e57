//! JSON-lines log of calculus operations.
//!
//! Each line is one [`AuditRecord`] with keys in sorted order:
//!
//! - `seq`: position in the log, starting at 0.
//! - `op`: function name (`diag_encode`, `entry_project`, `product`, `lcu`,
//!   `scale_down`, `tensor`, `amplify`, `qsvt_transform`, `projector`).
//! - `lemma`: the construction the operation implements.
//! - `inputs`, `output`: [`EncodingSummary`] values.
//! - `params`: operation arguments, e.g. `p` and `theta` for `scale_down`,
//!   `gamma`, `delta` and `rounds` for `amplify`.
//!
//! `entry_project` is charged two uses of its input, so its depth is twice
//! the input depth (`2 ceil(log2 N)` for a fresh diagonal encoding). The
//! basis projector it relies on is charged depth 1 and no queries.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::{BlockEncoding, ResourceCounter};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EncodingSummary {
    /// First 16 hex digits of SHA-256 over the corner entries
    /// (column-major, real then imaginary part, little-endian).
    pub digest: String,
    pub dim: usize,
    pub alpha: f64,
    pub eps: f64,
    pub ancillas: u64,
    pub resources: ResourceCounter,
}

impl EncodingSummary {
    pub fn of(e: &BlockEncoding) -> Self {
        Self {
            digest: digest(e),
            dim: e.dim(),
            alpha: e.alpha(),
            eps: e.eps(),
            ancillas: e.ancillas(),
            resources: *e.resources(),
        }
    }
}

pub fn digest(e: &BlockEncoding) -> String {
    let mut hasher = Sha256::new();
    for z in e.corner().iter() {
        hasher.update(z.re.to_le_bytes());
        hasher.update(z.im.to_le_bytes());
    }
    let full = hex::encode(hasher.finalize());
    full[..16].to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditRecord {
    pub seq: u64,
    pub op: String,
    pub lemma: String,
    pub inputs: Vec<EncodingSummary>,
    pub output: EncodingSummary,
    pub params: BTreeMap<String, Value>,
}

fn lemma_of(op: &str) -> &'static str {
    match op {
        "diag_encode" => "diagonal encoding from state preparation",
        "projector" => "basis projector encoding",
        "entry_project" => "single-entry projection",
        "product" => "product of encodings",
        "lcu" => "linear combination of encodings",
        "scale_down" => "scaling by controlled rotation",
        "tensor" => "tensor product of encodings",
        "amplify" => "uniform singular value amplification",
        "qsvt_transform" => "polynomial eigenvalue transformation",
        _ => "unspecified",
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditLog {
    records: Vec<AuditRecord>,
}

impl AuditLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(
        &mut self,
        op: &str,
        inputs: &[&BlockEncoding],
        output: &BlockEncoding,
        params: BTreeMap<String, Value>,
    ) {
        let seq = self.records.len() as u64;
        self.records.push(AuditRecord {
            seq,
            op: op.to_string(),
            lemma: lemma_of(op).to_string(),
            inputs: inputs.iter().map(|e| EncodingSummary::of(e)).collect(),
            output: EncodingSummary::of(output),
            params,
        });
    }

    pub fn records(&self) -> &[AuditRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// One JSON object per line, keys sorted, trailing newline.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let v = serde_json::to_value(r).expect("audit records serialize");
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}
