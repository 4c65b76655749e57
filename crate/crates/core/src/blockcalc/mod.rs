//! Block-encoding calculus on corner blocks.
//!
//! A [`BlockEncoding`] holds the top-left block of an encoding unitary plus
//! its subnormalization, ancilla count, error budget and cost counters. The
//! functions in [`ops`] implement one construction each and never mutate
//! their inputs. [`dilation`] builds explicit unitaries for cross-checking.

pub mod audit;
pub mod dilation;
mod encoding;
pub mod ops;
pub mod sample;

use nalgebra::DMatrix;
use nalgebra::Complex;
use thiserror::Error;

pub use audit::{AuditLog, AuditRecord, EncodingSummary};
pub use dilation::{realize_dilation, Dilation};
pub use encoding::{log2_ceil, spectral_norm, BlockEncoding, ResourceCounter};
pub use ops::{
    amplification_rounds, amplify, apply_postselect, diag_encode, diag_encode_real,
    entry_project, lcu, product, projector, qsvt_transform, ry_angle, scale_down, tensor,
    MonomialPoly, PostSelection, ScalarPolynomial,
};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Slack allowed on spectral-norm checks for float noise.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlockError {
    #[error("corner block must be square and non-empty, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("subnormalization must be finite and >= 1, got {0}")]
    InvalidAlpha(f64),
    #[error("error budget must be finite and >= 0, got {0}")]
    InvalidEps(f64),
    #[error("spectral norm {norm} exceeds 1")]
    NormTooLarge { norm: f64 },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("encoding is not diagonal")]
    NotDiagonal,
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("subnormalizations differ: {left} vs {right}; rescale first")]
    MixedAlpha { left: f64, right: f64 },
    #[error("combination needs at least one encoding")]
    EmptyCombination,
    #[error("{encodings} encodings but {signs} signs")]
    SignCount { encodings: usize, signs: usize },
    #[error("sign must be +1 or -1, got {0}")]
    InvalidSign(f64),
    #[error("scale factor must be finite and > 1, got {0}")]
    InvalidScale(f64),
    #[error("invalid {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("amplification needs norm <= {bound}, got {norm}")]
    NormBoundViolated { norm: f64, bound: f64 },
    #[error("polynomial reaches {sup} on [-1, 1], bound is 1/2")]
    PolyBoundViolated { sup: f64 },
    #[error("corner block is not Hermitian")]
    NotHermitian,
    #[error("input state has norm {norm}, expected 1")]
    NotNormalized { norm: f64 },
}
