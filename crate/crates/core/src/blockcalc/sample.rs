//! Seeded random inputs for tests and benchmarks.

use rand::Rng;

use super::encoding::spectral_norm;
use super::{BlockEncoding, CMatrix, ResourceCounter, C64};

/// Dense complex matrix with spectral norm exactly `norm` (zero stays zero).
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R, dim: usize, norm: f64) -> CMatrix {
    let m = CMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let s = spectral_norm(&m);
    if s == 0.0 {
        m
    } else {
        m * C64::new(norm / s, 0.0)
    }
}

/// Hermitian matrix with spectral norm exactly `norm`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, norm: f64) -> CMatrix {
    let m = random_contraction(rng, dim, 1.0);
    let h = &m + m.adjoint();
    let s = spectral_norm(&h);
    if s == 0.0 {
        h
    } else {
        h * C64::new(norm / s, 0.0)
    }
}

/// Exact encoding (alpha 1, one ancilla, zero error) of `corner`.
pub fn exact_encoding(corner: CMatrix) -> BlockEncoding {
    BlockEncoding::new(corner, 1.0, 1, 0.0, ResourceCounter::default())
        .expect("sampled corners are contractions")
}

/// Exact encoding of a random contraction of spectral norm `norm`.
pub fn random_encoding<R: Rng + ?Sized>(rng: &mut R, dim: usize, norm: f64) -> BlockEncoding {
    exact_encoding(random_contraction(rng, dim, norm))
}
