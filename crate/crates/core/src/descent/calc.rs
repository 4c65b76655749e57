use std::collections::BTreeMap;

use serde_json::Value;

use crate::blockcalc::{
    self, AuditLog, BlockEncoding, BlockError, ScalarPolynomial,
};

/// Calculus front end that optionally writes every operation to an audit log.
#[derive(Debug, Default)]
pub struct Calc<'a> {
    log: Option<&'a mut AuditLog>,
}

impl<'a> Calc<'a> {
    pub fn new(log: Option<&'a mut AuditLog>) -> Self {
        Self { log }
    }

    pub fn silent() -> Self {
        Self { log: None }
    }

    fn rec(&mut self, op: &str, inputs: &[&BlockEncoding], out: &BlockEncoding, params: &[(&str, Value)]) {
        if let Some(log) = self.log.as_deref_mut() {
            let params: BTreeMap<String, Value> = params
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect();
            log.record(op, inputs, out, params);
        }
    }

    pub fn diag_encode(&mut self, x: &[f64]) -> Result<BlockEncoding, BlockError> {
        let out = blockcalc::diag_encode_real(x)?;
        self.rec("diag_encode", &[], &out, &[("n", Value::from(x.len()))]);
        Ok(out)
    }

    pub fn projector(&mut self, dim: usize, k: usize) -> Result<BlockEncoding, BlockError> {
        let out = blockcalc::projector(dim, k)?;
        self.rec("projector", &[], &out, &[("k", Value::from(k))]);
        Ok(out)
    }

    pub fn entry_project(
        &mut self,
        x: &BlockEncoding,
        j: usize,
        k: usize,
    ) -> Result<BlockEncoding, BlockError> {
        let out = blockcalc::entry_project(x, j, k)?;
        self.rec(
            "entry_project",
            &[x],
            &out,
            &[("j", Value::from(j)), ("k", Value::from(k))],
        );
        Ok(out)
    }

    pub fn product(
        &mut self,
        a: &BlockEncoding,
        b: &BlockEncoding,
    ) -> Result<BlockEncoding, BlockError> {
        let out = blockcalc::product(a, b)?;
        self.rec("product", &[a, b], &out, &[]);
        Ok(out)
    }

    pub fn lcu(
        &mut self,
        parts: &[&BlockEncoding],
        signs: &[f64],
    ) -> Result<BlockEncoding, BlockError> {
        let out = blockcalc::lcu(parts, signs)?;
        self.rec("lcu", parts, &out, &[("signs", Value::from(signs.to_vec()))]);
        Ok(out)
    }

    pub fn scale_down(&mut self, a: &BlockEncoding, p: f64) -> Result<BlockEncoding, BlockError> {
        let out = blockcalc::scale_down(a, p)?;
        self.rec(
            "scale_down",
            &[a],
            &out,
            &[("p", Value::from(p)), ("theta", Value::from(blockcalc::ry_angle(p)))],
        );
        Ok(out)
    }

    pub fn amplify(
        &mut self,
        a: &BlockEncoding,
        gamma: f64,
        delta: f64,
        eps: f64,
    ) -> Result<BlockEncoding, BlockError> {
        let out = blockcalc::amplify(a, gamma, delta, eps)?;
        self.rec(
            "amplify",
            &[a],
            &out,
            &[
                ("gamma", Value::from(gamma)),
                ("delta", Value::from(delta)),
                ("eps_target", Value::from(eps)),
                ("rounds", Value::from(blockcalc::amplification_rounds(gamma, delta, eps))),
            ],
        );
        Ok(out)
    }

    pub fn qsvt<P: ScalarPolynomial + ?Sized>(
        &mut self,
        a: &BlockEncoding,
        poly: &P,
    ) -> Result<BlockEncoding, BlockError> {
        let out = blockcalc::qsvt_transform(a, poly)?;
        self.rec("qsvt_transform", &[a], &out, &[("degree", Value::from(poly.degree()))]);
        Ok(out)
    }
}
