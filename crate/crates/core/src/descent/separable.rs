use crate::blockcalc::ops::poly_sup_on_unit_interval;
use crate::blockcalc::BlockEncoding;
use crate::chebyshev::{approx_derivative, ChebyshevPoly, SeparableObjective};
use crate::oracle::Differentiable;
use crate::polyfunc::{check_domain, PolyError, DOMAIN_HALF_WIDTH as DOMAIN};

use super::{
    check_schedule, padded, postselect_probability, rebase, Calc, ChebyshevInfo, DescentConfig,
    DescentError, DescentTrace, Mode, Recorder, DELTA_AMP,
};

/// Relative slack for treating the rescaling factor as exactly 1.
const UNIT_SCALE_TOL: f64 = 1e-12;

/// Fitted derivative and the constants that place `eta P(x)` in a corner.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparablePlan {
    pub poly: ChebyshevPoly,
    /// `max(M, sup_[-1,1] |P|)`; the transformed corner is `P / (2 lambda)`.
    pub lambda: f64,
    pub eta: f64,
    /// Divisor `1/(2 eta lambda)` applied after the transformation, `None`
    /// when it is 1.
    pub scale: Option<f64>,
}

impl SeparablePlan {
    pub fn new(f: &SeparableObjective, eta: f64, eps: f64) -> Result<Self, DescentError> {
        let m = f.grad_bound;
        let limit = 1.0 / (2.0 * m);
        if !(eta > 0.0 && eta <= limit * (1.0 + UNIT_SCALE_TOL)) {
            return Err(DescentError::RateTooLarge { eta, limit });
        }
        let poly = approx_derivative(&f.function, eps)?;
        let on_domain = poly.sup_abs_on(-DOMAIN, DOMAIN);
        if on_domain > m + poly.sup_error_bound() + 1e-12 {
            return Err(DescentError::GradientBoundTooSmall { m, sup: on_domain });
        }
        let lambda = m
            .max(poly.sup_abs_on(-1.0, 1.0))
            .max(poly_sup_on_unit_interval(&poly));
        let p = 1.0 / (2.0 * eta * lambda);
        let scale = if (p - 1.0).abs() <= UNIT_SCALE_TOL {
            None
        } else if p < 1.0 {
            return Err(DescentError::RateTooLarge {
                eta,
                limit: 1.0 / (2.0 * lambda),
            });
        } else {
            Some(p)
        };
        Ok(Self {
            poly,
            lambda,
            eta,
            scale,
        })
    }

    pub fn info(&self) -> ChebyshevInfo {
        ChebyshevInfo {
            degree: self.poly.degree(),
            sup_error: self.poly.sup_error_bound(),
            lambda: self.lambda,
            scale: self.scale.unwrap_or(1.0),
        }
    }
}

/// One step `x - eta P(x)` applied entrywise to the diagonal iterate.
pub fn gd_step_separable(
    calc: &mut Calc,
    x: &BlockEncoding,
    plan: &SeparablePlan,
    eps: f64,
) -> Result<BlockEncoding, DescentError> {
    let two_lambda = 2.0 * plan.lambda;
    let s = calc
        .qsvt(x, &plan.poly.scaled(1.0 / two_lambda))?
        .with_added_eps(plan.poly.sup_error_bound() / two_lambda)?;
    let s = match plan.scale {
        Some(p) => calc.scale_down(&s, p)?,
        None => s,
    };
    let half = calc.lcu(&[x, &s], &[1.0, -1.0])?;
    Ok(calc.amplify(&half, 2.0, DELTA_AMP, eps)?)
}

/// `T` separable steps from `x0` with the configured learning rate.
pub fn run_separable(
    f: &SeparableObjective,
    x0: &[f64],
    cfg: &DescentConfig,
    calc: &mut Calc,
) -> Result<DescentTrace, DescentError> {
    cfg.validate(Mode::Separable)?;
    let eta = cfg
        .eta
        .ok_or_else(|| DescentError::Config("separable mode needs eta".into()))?;
    if x0.len() != f.n {
        return Err(PolyError::DimensionMismatch {
            expected: f.n,
            got: x0.len(),
        }
        .into());
    }
    check_domain(x0)?;
    check_schedule(x0, eta, f.grad_bound, cfg.t, cfg.enforce_schedule)?;
    let plan = SeparablePlan::new(f, eta, cfg.eps)?;

    let value = |x: &[f64]| f.value(x);
    let grad = |x: &[f64]| f.grad(x);
    let mut x = calc.diag_encode(&padded(x0))?;
    let mut rec = Recorder::new(f.n, x.log_dim(), &value, &grad);
    rec.push(&x);
    for t in 1..=cfg.t {
        x = gd_step_separable(calc, &rebase(x), &plan, cfg.eps).map_err(|e| e.at_step(t))?;
        rec.push(&x);
    }
    let prob = postselect_probability(&x, f.n)?;
    Ok(DescentTrace {
        mode: Mode::Separable,
        n: f.n,
        dim: x.dim(),
        eta,
        eps: cfg.eps,
        t: cfg.t,
        iterations: rec.finish(),
        postselect_prob: prob,
        chebyshev: Some(plan.info()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockcalc::amplification_rounds;
    use crate::chebyshev::{NamedFunction, ScalarFunction};
    use crate::descent::run_generic;
    use crate::polyfunc::{MonomialTerm, ObjectiveFunction};

    fn half_square(n: usize, m: f64) -> SeparableObjective {
        SeparableObjective::new(n, ScalarFunction::poly(vec![0.0, 0.0, 0.5]), m).unwrap()
    }

    #[test]
    fn half_square_contracts_geometrically() {
        let f = half_square(3, 0.5);
        let x0 = [0.3, -0.2, 0.1];
        let cfg = DescentConfig::separable(4, 1e-6, 0.1);
        let tr = run_separable(&f, &x0, &cfg, &mut Calc::silent()).unwrap();
        let k = 0.9f64.powi(4);
        for (got, x) in tr.last().iter().zip(x0) {
            assert!((got - k * x).abs() < 1e-12, "{got} vs {}", k * x);
        }
        let info = tr.chebyshev.unwrap();
        assert_eq!(info.degree, 1);
        assert_eq!(info.lambda, 1.0);
        assert!((info.scale - 5.0).abs() < 1e-12);
    }

    #[test]
    fn constant_function_leaves_iterate() {
        let f = SeparableObjective::new(2, ScalarFunction::poly(vec![0.7]), 1.0).unwrap();
        let cfg = DescentConfig::separable(2, 1e-6, 0.1);
        let tr = run_separable(&f, &[0.2, -0.2], &cfg, &mut Calc::silent()).unwrap();
        for t in 0..=2 {
            assert!((tr.iterate(t)[0] - 0.2).abs() < 1e-14);
            assert!((tr.iterate(t)[1] + 0.2).abs() < 1e-14);
        }
    }

    #[test]
    fn sine_step_matches_classical() {
        let f = SeparableObjective::new(2, ScalarFunction::named(NamedFunction::Sin, 1.0), 1.0)
            .unwrap();
        let eps = 1e-8;
        let cfg = DescentConfig::separable(1, eps, 0.25);
        let x0 = [0.1, -0.2];
        let tr = run_separable(&f, &x0, &cfg, &mut Calc::silent()).unwrap();
        for (got, x) in tr.last().iter().zip(x0) {
            let want = x - 0.25 * x.cos();
            assert!((got - want).abs() < eps, "{got} vs {want}");
        }
    }

    #[test]
    fn depth_grows_with_register_width_only() {
        let f8 = half_square(8, 0.5);
        let f16 = half_square(16, 0.5);
        let cfg = DescentConfig::separable(1, 1e-6, 0.1);
        let r8 = run_separable(&f8, &[0.1; 8], &cfg, &mut Calc::silent())
            .unwrap()
            .step_resources()
            .unwrap();
        let r16 = run_separable(&f16, &[0.1; 16], &cfg, &mut Calc::silent())
            .unwrap()
            .step_resources()
            .unwrap();
        let m2 = amplification_rounds(2.0, DELTA_AMP, 1e-6);
        let d = 1;
        assert_eq!(r8.depth_units, m2 * (1 + d) * 3 + m2 * (d + 2));
        assert_eq!(r16.depth_units - r8.depth_units, m2 * (1 + d));
        assert_eq!(r8.queries, r16.queries);
    }

    #[test]
    fn zero_steps_keep_start() {
        let f = half_square(2, 0.5);
        let cfg = DescentConfig::separable(0, 1e-6, 0.1);
        let tr = run_separable(&f, &[0.3, 0.4], &cfg, &mut Calc::silent()).unwrap();
        assert_eq!(tr.iterations.len(), 1);
        assert_eq!(tr.last(), &[0.3, 0.4]);
        assert!(tr.step_resources().is_none());
    }

    #[test]
    fn agrees_with_generic_engine() {
        let n = 2;
        let terms = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 2;
                MonomialTerm::new(0.5, e)
            })
            .collect();
        let g = ObjectiveFunction::new(n, terms, 1.0).unwrap();
        let x0 = [0.2, -0.1];
        let gen = run_generic(&g, &x0, &DescentConfig::generic(1, 1e-6), &mut Calc::silent())
            .unwrap();
        let s = half_square(n, 1.0);
        let cfg = DescentConfig::separable(1, 1e-6, gen.eta);
        let sep = run_separable(&s, &x0, &cfg, &mut Calc::silent()).unwrap();
        for (a, b) in gen.last().iter().zip(sep.last()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((gen.last()[0] - 0.75 * 0.2).abs() < 1e-12);
    }

    #[test]
    fn rate_and_bound_checks() {
        let f = half_square(2, 0.5);
        assert!(matches!(
            SeparablePlan::new(&f, 1.5, 1e-6),
            Err(DescentError::RateTooLarge { .. })
        ));
        // eta within 1/(2M) but above 1/(2 lambda) with lambda = 1
        assert!(matches!(
            SeparablePlan::new(&f, 0.8, 1e-6),
            Err(DescentError::RateTooLarge { .. })
        ));
        let small = half_square(2, 0.25);
        assert!(matches!(
            SeparablePlan::new(&small, 0.1, 1e-6),
            Err(DescentError::GradientBoundTooSmall { .. })
        ));
        let exact = SeparablePlan::new(&f, 0.5, 1e-6).unwrap();
        assert_eq!(exact.scale, None);
    }
}
