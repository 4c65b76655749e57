//! Classical reference: plain gradient descent and central differences.

use serde::Serialize;

use crate::chebyshev::SeparableObjective;
use crate::polyfunc::{ObjectiveFunction, DOMAIN_HALF_WIDTH, DOMAIN_TOL};

/// Objective with a closed-form gradient on the domain box.
pub trait Differentiable {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn grad(&self, x: &[f64]) -> Vec<f64>;
}

impl Differentiable for ObjectiveFunction {
    fn dim(&self) -> usize {
        self.n()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval_unchecked(x)
    }

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        self.gradient_unchecked(x)
    }
}

impl Differentiable for SeparableObjective {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.evaluate_unchecked(x)
    }

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        self.gradient_unchecked(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleStep {
    pub x: Vec<f64>,
    pub f: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct OracleTrace {
    pub steps: Vec<OracleStep>,
}

impl OracleTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn iterate(&self, t: usize) -> &[f64] {
        &self.steps[t].x
    }

    pub fn last(&self) -> &[f64] {
        &self.steps.last().expect("trace holds x0").x
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {index} = {value} lies outside [-1/2, 1/2]")]
    DomainViolation { index: usize, value: f64 },
    #[error("iterate {step} left the domain")]
    DomainExit { step: usize, trace: OracleTrace },
    #[error("learning rate must be finite and positive, got {0}")]
    InvalidRate(f64),
    #[error("step size must be finite and positive, got {0}")]
    InvalidStep(f64),
}

fn outside(x: &[f64]) -> Option<(usize, f64)> {
    x.iter()
        .copied()
        .enumerate()
        .find(|(_, v)| !(v.abs() <= DOMAIN_HALF_WIDTH + DOMAIN_TOL))
}

fn check_point<F: Differentiable + ?Sized>(f: &F, x: &[f64]) -> Result<(), OracleError> {
    if x.len() != f.dim() {
        return Err(OracleError::DimensionMismatch {
            expected: f.dim(),
            got: x.len(),
        });
    }
    match outside(x) {
        Some((index, value)) => Err(OracleError::DomainViolation { index, value }),
        None => Ok(()),
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|g| g * g).sum::<f64>().sqrt()
}

/// `T` steps of `x <- x - eta grad f(x)` in double precision.
///
/// Stops with [`OracleError::DomainExit`], carrying the iterates so far, when
/// an iterate leaves the domain.
pub fn classical_gd<F: Differentiable + ?Sized>(
    f: &F,
    x0: &[f64],
    eta: f64,
    t_max: usize,
) -> Result<OracleTrace, OracleError> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(OracleError::InvalidRate(eta));
    }
    check_point(f, x0)?;
    let mut trace = OracleTrace::default();
    let mut x = x0.to_vec();
    for t in 0..=t_max {
        let g = f.grad(&x);
        trace.steps.push(OracleStep {
            x: x.clone(),
            f: f.value(&x),
            grad_norm: norm2(&g),
        });
        if t == t_max {
            break;
        }
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= eta * gi;
        }
        if outside(&x).is_some() {
            return Err(OracleError::DomainExit { step: t + 1, trace });
        }
    }
    Ok(trace)
}

/// Central differences `(f(x + h e_m) - f(x - h e_m)) / 2h`.
pub fn finite_diff_grad<F: Differentiable + ?Sized>(
    f: &F,
    x: &[f64],
    h: f64,
) -> Result<Vec<f64>, OracleError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(OracleError::InvalidStep(h));
    }
    check_point(f, x)?;
    let mut probe = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for m in 0..x.len() {
        let base = x[m];
        for value in [base + h, base - h] {
            if !(value.abs() <= DOMAIN_HALF_WIDTH + DOMAIN_TOL) {
                return Err(OracleError::DomainViolation { index: m, value });
            }
        }
        probe[m] = base + h;
        let up = f.value(&probe);
        probe[m] = base - h;
        let down = f.value(&probe);
        probe[m] = base;
        out.push((up - down) / (2.0 * h));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::{NamedFunction, ScalarFunction};
    use crate::polyfunc::MonomialTerm;

    fn obj(n: usize, terms: &[(f64, &[u32])]) -> ObjectiveFunction {
        let terms = terms
            .iter()
            .map(|(c, e)| MonomialTerm::new(*c, e.to_vec()))
            .collect();
        ObjectiveFunction::new(n, terms, 1.0).unwrap()
    }

    #[test]
    fn quadratic_contraction() {
        let f = obj(2, &[(1.0, &[2, 0]), (1.0, &[0, 2])]);
        let tr = classical_gd(&f, &[0.2, 0.1], 0.1, 3).unwrap();
        assert_eq!(tr.len(), 4);
        let x3 = tr.last();
        assert!((x3[0] - 0.1024).abs() < 1e-15);
        assert!((x3[1] - 0.0512).abs() < 1e-15);
    }

    #[test]
    fn zero_steps_and_constant() {
        let f = obj(2, &[(0.3, &[0, 0])]);
        let tr = classical_gd(&f, &[0.2, -0.4], 0.1, 0).unwrap();
        assert_eq!(tr.steps.len(), 1);
        let tr = classical_gd(&f, &[0.2, -0.4], 0.1, 5).unwrap();
        assert!(tr.steps.iter().all(|s| s.x == vec![0.2, -0.4]));
    }

    #[test]
    fn domain_exit_keeps_partial_trace() {
        let f = obj(1, &[(1.0, &[1])]);
        match classical_gd(&f, &[-0.3], 0.15, 5) {
            Err(OracleError::DomainExit { step, trace }) => {
                assert_eq!(step, 2);
                assert_eq!(trace.len(), 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn finite_differences() {
        let sq = obj(2, &[(1.0, &[2, 0])]);
        let g = finite_diff_grad(&sq, &[0.2, 0.0], 1e-4).unwrap();
        assert!((g[0] - 0.4).abs() < 1e-7);

        let lin = obj(2, &[(0.7, &[1, 0]), (-0.2, &[0, 1])]);
        for h in [1e-1, 1e-3] {
            let g = finite_diff_grad(&lin, &[0.1, 0.1], h).unwrap();
            assert!((g[0] - 0.7).abs() < 1e-13 && (g[1] + 0.2).abs() < 1e-13);
        }

        // central difference of x^3 at 0 is exactly h^2
        let cube = obj(1, &[(1.0, &[3])]);
        let e1 = finite_diff_grad(&cube, &[0.0], 1e-2).unwrap()[0];
        let e2 = finite_diff_grad(&cube, &[0.0], 5e-3).unwrap()[0];
        assert!((e1 - 1e-4).abs() < 1e-15);
        assert!((e1 / e2 - 4.0).abs() < 1e-9);

        assert!(matches!(
            finite_diff_grad(&sq, &[0.5, 0.0], 1e-3),
            Err(OracleError::DomainViolation { .. })
        ));
    }

    #[test]
    fn separable_gradient() {
        let f = SeparableObjective::new(2, ScalarFunction::named(NamedFunction::Sin, 1.0), 1.0)
            .unwrap();
        let tr = classical_gd(&f, &[0.3, -0.2], 0.1, 1).unwrap();
        assert!((tr.last()[0] - (0.3 - 0.1 * 0.3f64.cos())).abs() < 1e-16);
    }
}
