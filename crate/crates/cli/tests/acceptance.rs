//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qgd_core::blockcalc::ops::{diag_encode, target_distance};
use qgd_core::blockcalc::sample::{exact_encoding, random_contraction, random_encoding, random_hermitian};
use qgd_core::blockcalc::{
    amplify, lcu, product, qsvt_transform, realize_dilation, scale_down, spectral_norm, BlockEncoding,
    CMatrix, Dilation, MonomialPoly, C64,
};
use qgd_core::descent::resources::{synthetic_objective, CostParams, Regime};
use qgd_core::descent::{generic_eta, initial_state_uniform, run_generic, run_separable, Calc};
use qgd_core::polyfunc::{validate_bounds, SamplingBudget};
use qgd_core::{
    classical_gd, DescentConfig, DescentTrace, MonomialTerm, NamedFunction, ObjectiveFunction,
    ScalarFunction, SeparableObjective,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn max_abs(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Runs that completed, for the post-selection check.
#[derive(Default)]
struct Completed(Vec<(String, DescentTrace)>);

impl Completed {
    fn push(&mut self, label: impl Into<String>, trace: DescentTrace) {
        self.0.push((label.into(), trace));
    }
}

/// `k` distinct non-constant terms in `n` variables of degree at most
/// `d_max`, with `|f| <= 1/2` on the box and a gradient bound 25% above the
/// termwise estimate.
fn random_objective(rng: &mut ChaCha8Rng, n: usize, k: usize, d_max: u32) -> ObjectiveFunction {
    let mut exps: Vec<Vec<u32>> = Vec::new();
    while exps.len() < k {
        let d = rng.random_range(1..=d_max);
        let mut e = vec![0u32; n];
        for _ in 0..d {
            e[rng.random_range(0..n)] += 1;
        }
        if !exps.contains(&e) {
            exps.push(e);
        }
    }
    let mut coeffs: Vec<f64> = (0..k)
        .map(|_| {
            let mag = rng.random_range(0.2..1.0);
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let value_bound: f64 = coeffs
        .iter()
        .zip(&exps)
        .map(|(a, e)| a.abs() * 0.5f64.powi(e.iter().sum::<u32>() as i32))
        .sum();
    let shrink = (0.5 / value_bound).min(1.0);
    for c in &mut coeffs {
        *c *= shrink;
    }
    let grad_bound: f64 = coeffs
        .iter()
        .zip(&exps)
        .map(|(a, e)| {
            let d = e.iter().sum::<u32>() as i32;
            let norm = e.iter().map(|&x| f64::from(x * x)).sum::<f64>().sqrt();
            a.abs() * norm * 2f64.powi(1 - d)
        })
        .sum::<f64>()
        * 1.25;
    let terms = coeffs
        .into_iter()
        .zip(exps)
        .map(|(c, e)| MonomialTerm::new(c, e))
        .collect();
    ObjectiveFunction::new(n, terms, grad_bound).unwrap()
}

fn bounds_hold(f: &ObjectiveFunction) -> bool {
    let grid = if f.n() <= 4 { 5 } else { 3 };
    validate_bounds(f, grid, SamplingBudget::default())
        .map(|r| r.ok)
        .unwrap_or(false)
}

fn oracle_equivalence(done: &mut Completed) -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let eps = 1e-6;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    let mut unenforced = 0;
    let mut redraws = 0;
    for trial in 0..25 {
        let n = [2, 4, 8][trial % 3];
        let (f, t, x0, oracle, enforce) = loop {
            let k = rng.random_range(1..=4);
            let f = random_objective(&mut rng, n, k, 4);
            if !bounds_hold(&f) {
                redraws += 1;
                continue;
            }
            let t = rng.random_range(1..=5);
            let eta = generic_eta(&f);
            let budget = eta * f.grad_bound() * t as f64;
            if budget < 0.5 {
                let margin = 0.5 - budget;
                let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-margin..=margin)).collect();
                let o = classical_gd(&f, &x0, eta, t).unwrap();
                break (f, t, x0, o, true);
            }
            // no start satisfies the margin; look for one whose oracle path stays inside
            let found = (0..200).find_map(|_| {
                let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-0.2..0.2)).collect();
                classical_gd(&f, &x0, eta, t)
                    .ok()
                    .filter(|o| o.steps.iter().all(|s| max_abs(&s.x) <= 0.45))
                    .map(|o| (x0, o))
            });
            match found {
                Some((x0, o)) => break (f, t, x0, o, false),
                None => redraws += 1,
            }
        };
        let mut cfg = DescentConfig::generic(t, eps);
        cfg.enforce_schedule = enforce;
        if !enforce {
            unenforced += 1;
        }
        let r = run_generic(&f, &x0, &cfg, &mut Calc::silent());
        match r {
            Ok(tr) => {
                let dev = (0..=t)
                    .map(|s| max_diff(tr.iterate(s), oracle.iterate(s)))
                    .fold(0.0, f64::max);
                let bound = 16.0 * t as f64 * eps;
                worst = worst.max(dev / bound);
                if dev > bound {
                    failures.push(format!("trial {trial}: deviation {dev:e} > {bound:e}"));
                }
                done.push(format!("oracle trial {trial}"), tr);
            }
            Err(e) => failures.push(format!("trial {trial}: {e}")),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= 10.0 {
        failures.push(format!("took {secs:.2} s"));
    }
    outcome(
        failures.is_empty(),
        format!(
            "25 objectives ({redraws} redrawn), worst deviation / (16 T eps) = {worst:.3e}, {unenforced} with eta M T >= 1/2 run unenforced, {secs:.2} s{}",
            fail_suffix(&failures)
        ),
    )
}

fn fail_suffix(failures: &[String]) -> String {
    if failures.is_empty() {
        String::new()
    } else {
        format!("; {}", failures.join("; "))
    }
}

fn closed_form_contraction(done: &mut Completed) -> Outcome {
    let m = 2f64.sqrt();
    let f = ObjectiveFunction::new(
        2,
        vec![MonomialTerm::new(1.0, vec![2, 0]), MonomialTerm::new(1.0, vec![0, 2])],
        m,
    )
    .unwrap();
    let eta = 1.0 / (4.0 * m);
    let x0 = [0.3, -0.2];
    let mut cfg = DescentConfig::generic(5, 1e-6);
    // eta M T = 5/4: the schedule check cannot hold, the iterates still contract
    cfg.enforce_schedule = false;
    let tr = match run_generic(&f, &x0, &cfg, &mut Calc::silent()) {
        Ok(tr) => tr,
        Err(e) => return outcome(false, format!("run failed: {e}")),
    };
    let factor = (1.0 - 2.0 * eta).powi(5);
    let want: Vec<f64> = x0.iter().map(|v| v * factor).collect();
    let dev = max_diff(tr.last(), &want);
    let eta_ok = (tr.eta - eta).abs() <= 1e-15;
    done.push("closed form", tr);
    outcome(
        dev <= 1e-8 && eta_ok,
        format!("|x_T - (1 - 2 eta)^5 x0| = {dev:.3e} (tolerance 1e-8), eta matches 1/(4 sqrt 2): {eta_ok}"),
    )
}

/// `P(A)` by Horner's rule on matrices.
fn matrix_poly(c: &[f64], a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut acc = CMatrix::zeros(n, n);
    for &ci in c.iter().rev() {
        acc = &acc * a + CMatrix::identity(n, n) * C64::new(ci, 0.0);
    }
    acc
}

fn lemma_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut diag_err = 0.0f64;
    for _ in 0..20 {
        let len = rng.random_range(1..=16);
        let raw: Vec<C64> = (0..len)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let target = rng.random_range(0.1..=1.0);
        let psi: Vec<C64> = raw.iter().map(|z| z * (target / norm)).collect();
        let enc = diag_encode(&psi, 1.0).unwrap();
        let c = enc.corner();
        for i in 0..c.nrows() {
            for j in 0..c.ncols() {
                let want = if i == j && i < len { psi[i] } else { C64::new(0.0, 0.0) };
                diag_err = diag_err.max((c[(i, j)] - want).norm());
            }
        }
    }

    let mut unit_err = 0.0f64;
    let mut corner_err = 0.0f64;
    for i in 0..50 {
        let dim = 1 << (i % 5);
        let norm = if i % 10 == 0 { 1.0 } else { rng.random_range(0.0..1.0) };
        let a = random_encoding(&mut rng, dim, norm);
        let u = realize_dilation(&a).unwrap();
        let size = u.nrows();
        unit_err = unit_err.max(spectral_norm(&(u.adjoint() * &u - CMatrix::identity(size, size))));
        let corner = u.view((0, 0), (dim, dim)).into_owned();
        corner_err = corner_err.max(entry_diff(&corner, a.corner()));
    }

    let mut qsvt_err = 0.0f64;
    for i in 0..20 {
        let deg = rng.random_range(1..=6);
        let mut c: Vec<f64> = (0..=deg).map(|_| rng.random_range(-1.0..1.0)).collect();
        let l1: f64 = c.iter().map(|v| v.abs()).sum();
        for v in &mut c {
            *v *= 0.5 / l1;
        }
        let poly = MonomialPoly(c.clone());
        let a = if i % 2 == 0 {
            let d: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                4,
                d.iter().map(|&v| C64::new(v, 0.0)),
            ));
            exact_encoding(m)
        } else {
            let norm = rng.random_range(0.1..1.0);
            exact_encoding(random_hermitian(&mut rng, 4, norm))
        };
        let out = qsvt_transform(&a, &poly).unwrap();
        let want = matrix_poly(&c, a.corner());
        qsvt_err = qsvt_err.max(entry_diff(out.corner(), &want));
    }
    outcome(
        diag_err <= 1e-12 && unit_err <= 1e-10 && corner_err <= 1e-12 && qsvt_err <= 1e-10,
        format!(
            "diag_encode {diag_err:.1e} (1e-12), dilation unitarity {unit_err:.1e} over 50 blocks (1e-10), \
             dilation corner {corner_err:.1e}, qsvt {qsvt_err:.1e} (1e-10)"
        ),
    )
}

/// Ancilla dimension above which a subtree is not composed further.
const TREE_ANCILLA_CAP: usize = 32;

fn random_tree(rng: &mut ChaCha8Rng, depth: u32) -> (BlockEncoding, Dilation, String) {
    let leaf = |rng: &mut ChaCha8Rng| {
        let norm = rng.random_range(0.2..1.0);
        let a = random_encoding(rng, 4, norm);
        let d = Dilation::of(&a).unwrap();
        (a, d, "A".to_string())
    };
    if depth == 0 || rng.random_bool(0.2) {
        return leaf(rng);
    }
    match rng.random_range(0..3) {
        0 => {
            let (a, da, sa) = random_tree(rng, depth - 1);
            let (b, db, sb) = random_tree(rng, depth - 1);
            if da.ancilla_dim() * db.ancilla_dim() > TREE_ANCILLA_CAP {
                return (a, da, sa);
            }
            (
                product(&a, &b).unwrap(),
                da.product(&db).unwrap(),
                format!("product({sa}, {sb})"),
            )
        }
        1 => {
            let m: usize = rng.random_range(2..=3);
            let parts: Vec<_> = (0..m).map(|_| random_tree(rng, depth - 1)).collect();
            let work = parts.iter().map(|p| p.1.ancilla_dim()).max().unwrap();
            if m.next_power_of_two() * work > TREE_ANCILLA_CAP {
                let (a, d, s) = parts.into_iter().next().unwrap();
                return (a, d, s);
            }
            let signs: Vec<f64> = (0..m).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
            let encs: Vec<&BlockEncoding> = parts.iter().map(|p| &p.0).collect();
            let dils: Vec<&Dilation> = parts.iter().map(|p| &p.1).collect();
            let names: Vec<&str> = parts.iter().map(|p| p.2.as_str()).collect();
            (
                lcu(&encs, &signs).unwrap(),
                Dilation::lcu(&dils, &signs).unwrap(),
                format!("lcu({})", names.join(", ")),
            )
        }
        _ => {
            let (a, da, sa) = random_tree(rng, depth - 1);
            if 2 * da.ancilla_dim() > TREE_ANCILLA_CAP {
                return (a, da, sa);
            }
            let p = rng.random_range(1.1..4.0);
            (
                scale_down(&a, p).unwrap(),
                da.scale_down(p).unwrap(),
                format!("scale_down({sa})"),
            )
        }
    }
}

fn dilation_composition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = 0.0f64;
    let mut worst_unit = 0.0f64;
    let mut composite = 0;
    for _ in 0..20 {
        let (enc, dil, shape) = loop {
            let t = random_tree(&mut rng, 3);
            if t.2 != "A" {
                break t;
            }
        };
        if shape.matches('(').count() > 1 {
            composite += 1;
        }
        worst = worst.max(entry_diff(&dil.corner(), enc.corner()));
        worst_unit = worst_unit.max(dil.unitarity_error());
    }
    outcome(
        worst <= 1e-9,
        format!(
            "20 trees ({composite} with nested operations), corner difference {worst:.1e} (1e-9), unitarity {worst_unit:.1e}"
        ),
    )
}

fn norm_safety(done: &mut Completed) -> Outcome {
    // (T, K): eta M T = T / (2K) with margins 1/4, 1/8, 1/16
    let schedules = [(1, 2), (2, 4), (3, 6), (4, 8), (5, 10), (3, 4), (6, 8), (9, 12), (7, 8), (14, 16)];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for &(t, k) in &schedules {
        let n = if k > 8 { 4 } else { 2 + (t % 2) * 2 };
        let f = loop {
            let f = random_objective(&mut rng, n, k, 4);
            if bounds_hold(&f) {
                break f;
            }
        };
        let eta = generic_eta(&f);
        let budget = eta * f.grad_bound() * t as f64;
        let x0 = initial_state_uniform(eta, f.grad_bound(), t, n).unwrap();
        let gap = (max_abs(&x0) - (0.5 - budget)).abs();
        if gap > 1e-15 {
            failures.push(format!("T={t} K={k}: start misses the margin by {gap:e}"));
        }
        match run_generic(&f, &x0, &DescentConfig::generic(t, 1e-6), &mut Calc::silent()) {
            Ok(tr) => {
                let m = tr.max_abs_x();
                worst = worst.max(m);
                if m > 0.5 {
                    failures.push(format!("T={t} K={k}: max |x| = {m}"));
                }
                done.push(format!("schedule T={t} K={k}"), tr);
            }
            Err(e) => failures.push(format!("T={t} K={k}: {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "10 schedules started at 1/2 - eta M T, largest |x_i,t| = {worst:.6}{}",
            fail_suffix(&failures)
        ),
    )
}

fn postselection(done: &Completed) -> Outcome {
    let mut worst = 0.0f64;
    let mut label = String::new();
    for (name, tr) in &done.0 {
        let want = tr.last().iter().map(|v| v * v).sum::<f64>() / tr.n as f64;
        let err = (tr.postselect_prob - want).abs();
        if err >= worst {
            worst = err;
            label = name.clone();
        }
    }
    outcome(
        worst <= 1e-10 && !done.0.is_empty(),
        format!("{} completed runs, worst |p - |x_T|^2 / n| = {worst:.1e} ({label})", done.0.len()),
    )
}

fn separable_engine(done: &mut Completed) -> Outcome {
    let (n, t, eta, eps) = (8, 3, 0.1, 1e-6);
    let f = SeparableObjective::new(n, ScalarFunction::named(NamedFunction::Sin, 1.0), 1.0).unwrap();
    let x0 = initial_state_uniform(eta, 1.0, t, n).unwrap();
    let tr = match run_separable(&f, &x0, &DescentConfig::separable(t, eps, eta), &mut Calc::silent()) {
        Ok(tr) => tr,
        Err(e) => return outcome(false, format!("run failed: {e}")),
    };
    let info = tr.chebyshev.clone().expect("separable runs report the fit");
    let mut x = x0.clone();
    let mut dev = max_diff(tr.iterate(0), &x);
    for s in 1..=t {
        for v in &mut x {
            *v -= eta * v.cos();
        }
        dev = dev.max(max_diff(tr.iterate(s), &x));
    }
    let bound = 10.0 * (info.sup_error + 16.0 * t as f64 * eps);
    done.push("separable sin", tr);
    outcome(
        dev <= bound && info.degree <= 20,
        format!(
            "deviation {dev:.3e} <= {bound:.3e}, derivative fit degree {} (cap 20), fit error {:.1e}",
            info.degree, info.sup_error
        ),
    )
}

fn step_counters(f: &ObjectiveFunction, t: usize, eps: f64) -> Result<Vec<(u64, u64)>, String> {
    let x0 = vec![0.05; f.n()];
    let tr = run_generic(f, &x0, &DescentConfig::generic(t, eps), &mut Calc::silent()).map_err(|e| e.to_string())?;
    Ok(tr
        .iterations
        .iter()
        .skip(1)
        .map(|r| (r.step_resources.depth_units, r.step_resources.queries))
        .collect())
}

fn non_decreasing(v: &[(u64, u64)]) -> bool {
    v.windows(2).all(|w| w[1].0 >= w[0].0 && w[1].1 >= w[0].1) && v.last().unwrap().0 > v[0].0
}

fn counter_regression() -> Outcome {
    let mut failures = Vec::new();
    let n = 4;

    let family = synthetic_objective(n, 4, 3, 2).unwrap();
    match (step_counters(&family, 2, 1e-6), step_counters(&family, 2, 1e-6)) {
        (Ok(a), Ok(b)) => {
            if a != b {
                failures.push("reruns differ".into());
            }
            if a.windows(2).any(|w| w[0] != w[1]) {
                failures.push("increments differ between iterations".into());
            }
        }
        (Err(e), _) | (_, Err(e)) => failures.push(e),
    }

    let mut ratios = Vec::new();
    for k in [1.0, 2.0, 3.0, 8.0] {
        let p = CostParams {
            k: Some(k),
            d: Some(3.0),
            v: Some(2.0),
            ..CostParams::default()
        };
        let q = CostParams { k: Some(2.0 * k), ..p.clone() };
        ratios.push(Regime::Generic.envelope(&q, 1) / Regime::Generic.envelope(&p, 1));
    }
    if ratios.iter().any(|&r| r != 4.0) {
        failures.push(format!("K doubling ratios {ratios:?}"));
    }

    let measure = |cases: &[(usize, u32, usize, f64)]| -> Result<Vec<(u64, u64)>, String> {
        cases
            .iter()
            .map(|&(k, d, v, eps)| {
                let f = synthetic_objective(n, k, d, v).map_err(|e| e.to_string())?;
                Ok(step_counters(&f, 1, eps)?[0])
            })
            .collect()
    };
    let sweeps: [(&str, Vec<(usize, u32, usize, f64)>); 4] = [
        ("K", vec![(2, 3, 2, 1e-6), (4, 3, 2, 1e-6), (8, 3, 2, 1e-6)]),
        ("d", vec![(2, 2, 2, 1e-6), (2, 3, 2, 1e-6), (2, 4, 2, 1e-6)]),
        ("v", vec![(2, 4, 1, 1e-6), (2, 4, 2, 1e-6), (2, 4, 3, 1e-6)]),
        ("log(1/eps)", vec![(2, 3, 2, 1e-2), (2, 3, 2, 1e-4), (2, 3, 2, 1e-6)]),
    ];
    let mut grown = Vec::new();
    for (name, cases) in &sweeps {
        match measure(cases) {
            Ok(v) if non_decreasing(&v) => grown.push(format!("{name} {}->{}", v[0].0, v.last().unwrap().0)),
            Ok(v) => failures.push(format!("{name} not monotone: {v:?}")),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "reruns identical, K doubling ratios {ratios:?}, depth units {}{}",
            grown.join(", "),
            fail_suffix(&failures)
        ),
    )
}

fn error_budget() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let eps0 = 1e-4;
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for trial in 0..20 {
        let inputs: Vec<BlockEncoding> = (0..3).map(|_| random_encoding(&mut rng, 4, 0.8)).collect();
        let p = rng.random_range(2.5..4.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let pipeline = |x: &[BlockEncoding]| -> Result<BlockEncoding, String> {
            let ab = product(&x[0], &x[1]).map_err(|e| e.to_string())?;
            let comb = lcu(&[&ab, &x[2]], &[1.0, sign]).map_err(|e| e.to_string())?;
            let down = scale_down(&comb, p).map_err(|e| e.to_string())?;
            amplify(&down, p / 2.0, 0.5, 1e-6).map_err(|e| e.to_string())
        };
        let which = rng.random_range(0..3);
        let noise = random_contraction(&mut rng, 4, eps0);
        let mut noisy = inputs.clone();
        noisy[which] = match noisy[which].perturbed(&noise) {
            Ok(e) => e,
            Err(e) => {
                failures.push(format!("trial {trial}: {e}"));
                continue;
            }
        };
        match (pipeline(&inputs), pipeline(&noisy)) {
            (Ok(exact), Ok(out)) => {
                let dev = target_distance(&exact, &out);
                worst = worst.max(dev / out.eps());
                if dev > out.eps() {
                    failures.push(format!("trial {trial}: {dev:e} > {:e}", out.eps()));
                }
            }
            (Err(e), _) | (_, Err(e)) => failures.push(format!("trial {trial}: {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "20 trials of product, lcu, scale_down, amplify; worst deviation / propagated eps = {worst:.3}{}",
            fail_suffix(&failures)
        ),
    )
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_qgd");
    let examples = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples");
    let tmp = tempfile::tempdir().unwrap();
    let mut trees = Vec::new();
    for rep in 0..2 {
        let out = tmp.path().join(format!("rep{rep}"));
        let path = |name: &str| examples.join(name).display().to_string();
        let runs: [Vec<String>; 2] = [
            vec!["run".into(), "--sweep".into(), path("sweep.json")],
            vec![
                "compare-costs".into(),
                "--config".into(),
                path("costs.json"),
                "--sweep".into(),
                path("costs_sweep.json"),
            ],
        ];
        for args in runs {
            let status = Command::new(bin)
                .args(&args)
                .arg("--out")
                .arg(&out)
                .output()
                .unwrap();
            if !status.status.success() {
                return outcome(
                    false,
                    format!("{args:?} failed: {}", String::from_utf8_lossy(&status.stderr)),
                );
            }
        }
        trees.push(read_tree(&out));
    }
    let same = trees[0] == trees[1];
    let bytes: usize = trees[0].iter().map(|(_, b)| b.len()).sum();
    outcome(
        same && !trees[0].is_empty(),
        format!("{} artifacts ({bytes} bytes) byte-identical across two invocations: {same}", trees[0].len()),
    )
}

fn main() {
    let mut done = Completed::default();
    let results = [
        ("oracle equivalence (generic)", oracle_equivalence(&mut done)),
        ("closed-form contraction", closed_form_contraction(&mut done)),
        ("encoding exactness", lemma_exactness()),
        ("dilation-composition soundness", dilation_composition()),
        ("norm safety", norm_safety(&mut done)),
        ("separable engine", separable_engine(&mut done)),
        ("counter regression", counter_regression()),
        ("error-budget soundness", error_budget()),
        ("determinism", determinism()),
    ];
    let post = postselection(&done);
    let mut ordered: Vec<(&str, &Outcome)> = results[..5].iter().map(|(n, o)| (*n, o)).collect();
    ordered.push(("post-selection contract", &post));
    ordered.extend(results[5..].iter().map(|(n, o)| (*n, o)));

    let mut failed = 0;
    for (i, (name, o)) in ordered.iter().enumerate() {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("{tag} {:>2} {name}: {}", i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", ordered.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", ordered.len());
}
