use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{BlockError, CMatrix, C64, NORM_TOL};

/// Abstract cost tally carried by every encoding.
///
/// Counters compose by use: an input used `k` times by an operation
/// contributes `k` times its own counters, and the operation then adds its
/// own stated cost. `depth_units` and `queries` therefore describe the whole
/// circuit below an encoding; `queries` counts calls to the leaf encodings
/// (state-preparation based diagonal encodings).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCounter {
    pub depth_units: u64,
    pub queries: u64,
    pub ancilla_high_water: u64,
}

impl ResourceCounter {
    pub fn new(depth_units: u64, queries: u64, ancilla_high_water: u64) -> Self {
        Self {
            depth_units,
            queries,
            ancilla_high_water,
        }
    }

    /// Counters of `uses` sequential uses of the same circuit.
    pub fn repeated(&self, uses: u64) -> Self {
        Self {
            depth_units: self.depth_units.saturating_mul(uses),
            queries: self.queries.saturating_mul(uses),
            ancilla_high_water: self.ancilla_high_water,
        }
    }

    /// Sequential composition of two circuits.
    pub fn then(&self, other: &Self) -> Self {
        Self {
            depth_units: self.depth_units.saturating_add(other.depth_units),
            queries: self.queries.saturating_add(other.queries),
            ancilla_high_water: self.ancilla_high_water.max(other.ancilla_high_water),
        }
    }

    pub fn plus_depth(mut self, depth: u64) -> Self {
        self.depth_units = self.depth_units.saturating_add(depth);
        self
    }

    pub fn with_ancillas(mut self, ancillas: u64) -> Self {
        self.ancilla_high_water = self.ancilla_high_water.max(ancillas);
        self
    }

    /// Componentwise `self >= other`.
    pub fn dominates(&self, other: &Self) -> bool {
        self.depth_units >= other.depth_units
            && self.queries >= other.queries
            && self.ancilla_high_water >= other.ancilla_high_water
    }
}

/// An `(alpha, ancillas, eps)` block encoding represented by its corner block.
///
/// `corner` approximates `A / alpha` for the intended target `A`, with
/// `||A - alpha * corner|| <= eps` in spectral norm.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockEncoding {
    corner: CMatrix,
    alpha: f64,
    ancillas: u64,
    eps: f64,
    resources: ResourceCounter,
}

impl BlockEncoding {
    /// Validates and wraps a corner block. Non power-of-two dimensions are
    /// zero-padded.
    pub fn new(
        corner: CMatrix,
        alpha: f64,
        ancillas: u64,
        eps: f64,
        resources: ResourceCounter,
    ) -> Result<Self, BlockError> {
        if !corner.is_square() || corner.nrows() == 0 {
            return Err(BlockError::NotSquare {
                rows: corner.nrows(),
                cols: corner.ncols(),
            });
        }
        if !(alpha.is_finite() && alpha >= 1.0) {
            return Err(BlockError::InvalidAlpha(alpha));
        }
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(BlockError::InvalidEps(eps));
        }
        let corner = pad_to_power_of_two(corner);
        let norm = spectral_norm(&corner);
        if !(norm <= 1.0 + NORM_TOL) {
            return Err(BlockError::NormTooLarge { norm });
        }
        Ok(Self {
            corner,
            alpha,
            ancillas,
            eps,
            resources: resources.with_ancillas(ancillas),
        })
    }

    /// Exact encoding of the identity (`sigma_z` on one ancilla).
    pub fn identity(dim: usize) -> Self {
        Self::new(CMatrix::identity(dim, dim), 1.0, 1, 0.0, ResourceCounter::default())
            .expect("identity is a valid corner")
    }

    /// Exact encoding of the zero matrix.
    pub fn zero(dim: usize) -> Self {
        Self::new(CMatrix::zeros(dim, dim), 1.0, 1, 0.0, ResourceCounter::default())
            .expect("zero is a valid corner")
    }

    pub fn corner(&self) -> &CMatrix {
        &self.corner
    }

    pub fn dim(&self) -> usize {
        self.corner.nrows()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn ancillas(&self) -> u64 {
        self.ancillas
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn resources(&self) -> &ResourceCounter {
        &self.resources
    }

    /// `ceil(log2 N)`, the register width of the encoded system.
    pub fn log_dim(&self) -> u32 {
        log2_ceil(self.dim())
    }

    pub fn norm(&self) -> f64 {
        spectral_norm(&self.corner)
    }

    pub fn is_diagonal(&self) -> bool {
        is_diagonal(&self.corner)
    }

    pub fn is_hermitian(&self) -> bool {
        let diff = &self.corner - self.corner.adjoint();
        diff.iter().all(|z| z.norm() <= 1e-12)
    }

    pub fn diagonal(&self) -> Vec<C64> {
        self.corner.diagonal().iter().copied().collect()
    }

    /// Real parts of the diagonal; the iterate read-out.
    pub fn real_diagonal(&self) -> Vec<f64> {
        self.corner.diagonal().iter().map(|z| z.re).collect()
    }

    /// Same encoding with its cost history replaced, e.g. when a pipeline
    /// treats an intermediate result as a fresh input.
    pub fn with_resources(mut self, resources: ResourceCounter) -> Self {
        self.resources = resources.with_ancillas(self.ancillas);
        self
    }

    /// Same corner with `extra` added to the error budget, for approximation
    /// error introduced outside the calculus (e.g. a fitted polynomial).
    pub fn with_added_eps(mut self, extra: f64) -> Result<Self, BlockError> {
        let eps = self.eps + extra;
        if !(extra >= 0.0 && eps.is_finite()) {
            return Err(BlockError::InvalidEps(extra));
        }
        self.eps = eps;
        Ok(self)
    }

    /// Encoding whose corner differs by `perturbation`, with the error budget
    /// raised by the perturbation's spectral norm.
    pub fn perturbed(&self, perturbation: &CMatrix) -> Result<Self, BlockError> {
        if perturbation.shape() != self.corner.shape() {
            return Err(BlockError::DimensionMismatch {
                left: self.dim(),
                right: perturbation.nrows(),
            });
        }
        let extra = self.alpha * spectral_norm(perturbation);
        Self::new(
            &self.corner + perturbation,
            self.alpha,
            self.ancillas,
            self.eps + extra,
            self.resources,
        )
    }

    pub(crate) fn from_parts_unchecked(
        corner: CMatrix,
        alpha: f64,
        ancillas: u64,
        eps: f64,
        resources: ResourceCounter,
    ) -> Self {
        debug_assert!(corner.nrows().is_power_of_two());
        Self {
            corner,
            alpha,
            ancillas,
            eps,
            resources: resources.with_ancillas(ancillas),
        }
    }
}

pub fn log2_ceil(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

pub(crate) fn pad_to_power_of_two(m: CMatrix) -> CMatrix {
    let n = m.nrows();
    let target = n.next_power_of_two();
    if target == n {
        return m;
    }
    let mut out = CMatrix::zeros(target, target);
    out.view_mut((0, 0), (n, n)).copy_from(&m);
    out
}

pub(crate) fn is_diagonal(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)].norm() <= 1e-14))
}

/// Spectral norm; exact shortcut for diagonal matrices, dense SVD otherwise.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    if is_diagonal(m) {
        return m.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    m.singular_values().max()
}

pub(crate) fn diag_matrix(entries: &[C64]) -> CMatrix {
    let n = entries.len();
    DMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { C64::new(0.0, 0.0) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_ceil_values() {
        assert_eq!(log2_ceil(1), 0);
        assert_eq!(log2_ceil(2), 1);
        assert_eq!(log2_ceil(3), 2);
        assert_eq!(log2_ceil(4), 2);
        assert_eq!(log2_ceil(5), 3);
        assert_eq!(log2_ceil(1024), 10);
    }

    #[test]
    fn construction_pads_and_checks_norm() {
        let m = CMatrix::identity(3, 3) * C64::new(0.5, 0.0);
        let e = BlockEncoding::new(m, 1.0, 0, 0.0, ResourceCounter::default()).unwrap();
        assert_eq!(e.dim(), 4);
        assert_eq!(e.corner()[(3, 3)], C64::new(0.0, 0.0));

        let big = CMatrix::identity(2, 2) * C64::new(1.5, 0.0);
        assert!(matches!(
            BlockEncoding::new(big, 1.0, 0, 0.0, ResourceCounter::default()),
            Err(BlockError::NormTooLarge { .. })
        ));
        let ok = CMatrix::identity(2, 2) * C64::new(1.0 + 1e-12, 0.0);
        assert!(BlockEncoding::new(ok, 1.0, 0, 0.0, ResourceCounter::default()).is_ok());
    }

    #[test]
    fn construction_rejects_bad_budgets() {
        let m = CMatrix::identity(2, 2);
        assert!(matches!(
            BlockEncoding::new(m.clone(), 0.5, 0, 0.0, ResourceCounter::default()),
            Err(BlockError::InvalidAlpha(_))
        ));
        assert!(matches!(
            BlockEncoding::new(m, 1.0, 0, f64::NAN, ResourceCounter::default()),
            Err(BlockError::InvalidEps(_))
        ));
    }

    #[test]
    fn dense_norm_uses_svd() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(0.6, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        assert!((spectral_norm(&m) - 0.6).abs() < 1e-14);
    }
}
