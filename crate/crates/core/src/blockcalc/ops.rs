//! One function per lemma. All operations are pure: they take encodings by
//! reference and return a fresh encoding with merged budgets and counters.

use nalgebra::{DMatrix, SymmetricEigen};

use super::encoding::{diag_matrix, is_diagonal, log2_ceil, spectral_norm};
use super::{BlockEncoding, BlockError, CMatrix, ResourceCounter, C64, NORM_TOL};

/// Number of grid points used to check `|P| <= 1/2` on `[-1, 1]`.
pub const QSVT_BOUND_GRID: usize = 2048;

/// A real polynomial usable as a singular value transformation.
pub trait ScalarPolynomial {
    fn degree(&self) -> usize;
    fn eval(&self, x: f64) -> f64;
}

/// Polynomial in the monomial basis, `c[0] + c[1] x + c[2] x^2 + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialPoly(pub Vec<f64>);

impl ScalarPolynomial for MonomialPoly {
    fn degree(&self) -> usize {
        self.0
            .iter()
            .rposition(|&c| c != 0.0)
            .unwrap_or(0)
    }

    fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Exact encoding of `diag(psi)` from a state-preparation unitary.
///
/// `psi` may be sub-normalized; it is then the amplitude block of a larger
/// unit state.
pub fn diag_encode(psi: &[C64], alpha: f64) -> Result<BlockEncoding, BlockError> {
    if psi.is_empty() {
        return Err(BlockError::NotSquare { rows: 0, cols: 0 });
    }
    let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 1.0 + NORM_TOL {
        return Err(BlockError::NormTooLarge { norm });
    }
    let n = psi.len().next_power_of_two();
    let mut entries = psi.to_vec();
    entries.resize(n, real(0.0));
    let l = u64::from(log2_ceil(n));
    BlockEncoding::new(
        diag_matrix(&entries),
        alpha,
        l + 3,
        0.0,
        ResourceCounter::new(l, 1, 0),
    )
}

pub fn diag_encode_real(x: &[f64]) -> Result<BlockEncoding, BlockError> {
    let psi: Vec<C64> = x.iter().map(|&v| real(v)).collect();
    diag_encode(&psi, 1.0)
}

/// Exact encoding of the basis projector `|k><k|` on `dim` states.
pub fn projector(dim: usize, k: usize) -> Result<BlockEncoding, BlockError> {
    let n = dim.next_power_of_two();
    if k >= n {
        return Err(BlockError::IndexOutOfRange { index: k, dim: n });
    }
    let mut m = CMatrix::zeros(n, n);
    m[(k, k)] = real(1.0);
    let l = u64::from(log2_ceil(n));
    BlockEncoding::new(m, 1.0, l, 0.0, ResourceCounter::new(1, 0, 0))
}

/// `x_j |k><k|` from a diagonal encoding of `diag(x)` (0-based `j`, `k`).
pub fn entry_project(x: &BlockEncoding, j: usize, k: usize) -> Result<BlockEncoding, BlockError> {
    if !x.is_diagonal() {
        return Err(BlockError::NotDiagonal);
    }
    let n = x.dim();
    for index in [j, k] {
        if index >= n {
            return Err(BlockError::IndexOutOfRange { index, dim: n });
        }
    }
    let mut m = CMatrix::zeros(n, n);
    m[(k, k)] = x.corner()[(j, j)];
    let l = u64::from(x.log_dim());
    let ancillas = x.ancillas().saturating_add(l + 3);
    Ok(BlockEncoding::from_parts_unchecked(
        m,
        x.alpha(),
        ancillas,
        x.eps(),
        x.resources().repeated(2),
    ))
}

fn check_dims(a: &BlockEncoding, b: &BlockEncoding) -> Result<(), BlockError> {
    if a.dim() != b.dim() {
        return Err(BlockError::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// Encoding of the product `A_1 A_2`.
pub fn product(a: &BlockEncoding, b: &BlockEncoding) -> Result<BlockEncoding, BlockError> {
    check_dims(a, b)?;
    let corner = a.corner() * b.corner();
    // ||A1 A2 - a1 a2 B1 B2|| <= e1 ||A2|| + a1 e2 with ||A2|| <= a2 + e2.
    let eps = a.alpha() * b.eps() + b.alpha() * a.eps() + a.eps() * b.eps();
    let ancillas = a.ancillas().saturating_add(b.ancillas());
    BlockEncoding::new(
        corner,
        a.alpha() * b.alpha(),
        ancillas,
        eps,
        a.resources().then(b.resources()),
    )
}

/// Encoding of the signed average `(1/m) sum_i sign_i M_i`.
pub fn lcu(encodings: &[&BlockEncoding], signs: &[f64]) -> Result<BlockEncoding, BlockError> {
    let first = encodings.first().ok_or(BlockError::EmptyCombination)?;
    if signs.len() != encodings.len() {
        return Err(BlockError::SignCount {
            encodings: encodings.len(),
            signs: signs.len(),
        });
    }
    if let Some(&s) = signs.iter().find(|&&s| s != 1.0 && s != -1.0) {
        return Err(BlockError::InvalidSign(s));
    }
    for e in &encodings[1..] {
        check_dims(first, e)?;
        if (e.alpha() - first.alpha()).abs() > 1e-12 * first.alpha() {
            return Err(BlockError::MixedAlpha {
                left: first.alpha(),
                right: e.alpha(),
            });
        }
    }
    let m = encodings.len();
    let inv_m = 1.0 / m as f64;
    let n = first.dim();
    let mut corner = CMatrix::zeros(n, n);
    let mut eps = 0.0;
    let mut resources = ResourceCounter::default();
    let mut ancillas = 0;
    for (e, &s) in encodings.iter().zip(signs) {
        corner += e.corner() * real(s);
        eps += e.eps();
        resources = resources.then(e.resources());
        ancillas = ancillas.max(e.ancillas());
    }
    corner *= real(inv_m);
    let ancillas = ancillas.saturating_add(u64::from(log2_ceil(m)));
    BlockEncoding::new(corner, first.alpha(), ancillas, eps * inv_m, resources)
}

/// Rotation angle `theta` with `cos(theta / 2) = 1 / p`.
pub fn ry_angle(p: f64) -> f64 {
    2.0 * (1.0 / p).acos()
}

/// Encoding of `A / p` for `p > 1`.
pub fn scale_down(a: &BlockEncoding, p: f64) -> Result<BlockEncoding, BlockError> {
    if !(p.is_finite() && p > 1.0) {
        return Err(BlockError::InvalidScale(p));
    }
    let corner = a.corner() * real(1.0 / p);
    Ok(BlockEncoding::from_parts_unchecked(
        corner,
        a.alpha(),
        a.ancillas().saturating_add(1),
        a.eps() / p,
        a.resources().plus_depth(1),
    ))
}

/// Encoding of the Kronecker product of all inputs, in order.
pub fn tensor(encodings: &[&BlockEncoding]) -> Result<BlockEncoding, BlockError> {
    let first = encodings.first().ok_or(BlockError::EmptyCombination)?;
    let mut corner = first.corner().clone();
    let mut alpha = first.alpha();
    let mut eps = first.eps();
    let mut ancillas = first.ancillas();
    let mut depth = first.resources().depth_units;
    let mut queries = first.resources().queries;
    let mut high = first.resources().ancilla_high_water;
    for e in &encodings[1..] {
        corner = corner.kronecker(e.corner());
        eps = alpha * e.eps() + e.alpha() * eps + eps * e.eps();
        alpha *= e.alpha();
        ancillas = ancillas.saturating_add(e.ancillas());
        depth = depth.max(e.resources().depth_units);
        queries = queries.saturating_add(e.resources().queries);
        high = high.max(e.resources().ancilla_high_water);
    }
    BlockEncoding::new(
        corner,
        alpha,
        ancillas,
        eps,
        ResourceCounter::new(depth, queries, high),
    )
}

/// Number of uses of the input circuit in uniform singular value
/// amplification, `ceil((2 gamma / delta) ln(4 gamma / eps))`.
pub fn amplification_rounds(gamma: f64, delta: f64, eps_target: f64) -> u64 {
    ((2.0 * gamma / delta) * (4.0 * gamma / eps_target).ln()).ceil() as u64
}

/// Uniform singular value amplification by `gamma`.
///
/// Requires every singular value of `gamma * corner` to be at most
/// `1 - delta`. The simulator applies the rescale exactly; `eps_target` enters
/// the error budget as the multiplicative tolerance per singular value.
pub fn amplify(
    a: &BlockEncoding,
    gamma: f64,
    delta: f64,
    eps_target: f64,
) -> Result<BlockEncoding, BlockError> {
    if !(gamma.is_finite() && gamma > 1.0) {
        return Err(BlockError::InvalidParameter {
            name: "gamma",
            value: gamma,
        });
    }
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(BlockError::InvalidParameter {
            name: "delta",
            value: delta,
        });
    }
    if !(eps_target > 0.0 && eps_target < 0.5) {
        return Err(BlockError::InvalidParameter {
            name: "eps_target",
            value: eps_target,
        });
    }
    let scaled_norm = gamma * a.norm();
    let bound = 1.0 - delta;
    if scaled_norm > bound + NORM_TOL {
        return Err(BlockError::NormBoundViolated {
            norm: scaled_norm,
            bound,
        });
    }
    let rounds = amplification_rounds(gamma, delta, eps_target);
    let corner = a.corner() * real(gamma);
    let eps = gamma * a.eps() + a.alpha() * eps_target * scaled_norm;
    Ok(BlockEncoding::from_parts_unchecked(
        corner,
        a.alpha(),
        a.ancillas().saturating_add(1),
        eps,
        a.resources().repeated(rounds).plus_depth(rounds),
    ))
}

/// Largest `|P(x)|` over the Chebyshev-Lobatto grid on `[-1, 1]`.
pub fn poly_sup_on_unit_interval<P: ScalarPolynomial + ?Sized>(poly: &P) -> f64 {
    let last = (QSVT_BOUND_GRID - 1) as f64;
    (0..QSVT_BOUND_GRID)
        .map(|k| (std::f64::consts::PI * k as f64 / last).cos())
        .map(|x| poly.eval(x).abs())
        .fold(0.0, f64::max)
}

/// Polynomial eigenvalue transformation of a Hermitian corner.
pub fn qsvt_transform<P: ScalarPolynomial + ?Sized>(
    a: &BlockEncoding,
    poly: &P,
) -> Result<BlockEncoding, BlockError> {
    if !a.is_hermitian() {
        return Err(BlockError::NotHermitian);
    }
    let sup = poly_sup_on_unit_interval(poly);
    if sup > 0.5 + NORM_TOL {
        return Err(BlockError::PolyBoundViolated { sup });
    }
    let corner = if is_diagonal(a.corner()) {
        let entries: Vec<C64> = a
            .corner()
            .diagonal()
            .iter()
            .map(|z| real(poly.eval(z.re)))
            .collect();
        diag_matrix(&entries)
    } else {
        let eig = SymmetricEigen::new(a.corner().clone());
        let mapped: Vec<C64> = eig.eigenvalues.iter().map(|&l| real(poly.eval(l))).collect();
        &eig.eigenvectors * diag_matrix(&mapped) * eig.eigenvectors.adjoint()
    };
    let d = poly.degree() as u64;
    let eps = 4.0 * d as f64 * (a.eps() / a.alpha()).sqrt();
    BlockEncoding::new(
        corner,
        1.0,
        a.ancillas().saturating_add(2),
        eps,
        a.resources().repeated(d).plus_depth(d),
    )
}

/// Outcome of measuring the ancillas in `|0>` after applying the encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct PostSelection {
    /// Normalized `corner * phi`, or `None` when the product vanishes.
    pub state: Option<Vec<C64>>,
    pub prob: f64,
}

/// Applies the encoding to `|0>|phi>` and post-selects the ancillas on `|0>`.
/// `phi` shorter than the encoding dimension is zero-padded.
pub fn apply_postselect(a: &BlockEncoding, phi: &[C64]) -> Result<PostSelection, BlockError> {
    let n = a.dim();
    if phi.len() > n {
        return Err(BlockError::DimensionMismatch {
            left: n,
            right: phi.len(),
        });
    }
    let norm = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(BlockError::NotNormalized { norm });
    }
    let mut v = DMatrix::<C64>::zeros(n, 1);
    for (i, &z) in phi.iter().enumerate() {
        v[(i, 0)] = z;
    }
    let out = a.corner() * v;
    let prob: f64 = out.iter().map(|z| z.norm_sqr()).sum();
    let state = (prob > 0.0).then(|| {
        let s = prob.sqrt();
        out.iter().map(|z| z / s).collect()
    });
    Ok(PostSelection {
        state,
        prob: prob.min(1.0),
    })
}

/// Uniform superposition over the first `n` basis states.
pub fn uniform_state(n: usize) -> Vec<C64> {
    let amp = 1.0 / (n as f64).sqrt();
    vec![real(amp); n]
}

/// Spectral-norm distance between the scaled corners `alpha * corner`.
pub fn target_distance(a: &BlockEncoding, b: &BlockEncoding) -> f64 {
    let diff = a.corner() * real(a.alpha()) - b.corner() * real(b.alpha());
    spectral_norm(&diff)
}
