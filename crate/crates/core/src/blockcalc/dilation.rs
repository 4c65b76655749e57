//! Explicit unitaries for validating the corner-block calculus.
//!
//! A [`Dilation`] is a unitary on `ancilla (x) system`, indexed as
//! `ancilla * system_dim + system`; ancilla index 0 is the `|0...0>` branch so
//! the encoded block is the top-left `system_dim x system_dim` submatrix.

use super::encoding::{log2_ceil, spectral_norm};
use super::ops::ry_angle;
use super::{BlockEncoding, BlockError, CMatrix, C64, NORM_TOL};

/// `[[B, sqrt(I - BB*)], [sqrt(I - B*B), -B*]]` for the corner `B`.
pub fn realize_dilation(a: &BlockEncoding) -> Result<CMatrix, BlockError> {
    dilate(a.corner())
}

fn dilate(b: &CMatrix) -> Result<CMatrix, BlockError> {
    let norm = spectral_norm(b);
    if norm > 1.0 + NORM_TOL {
        return Err(BlockError::NormTooLarge { norm });
    }
    let n = b.nrows();
    // B = W S V*, so sqrt(I - BB*) = W sqrt(I - S^2) W* and the same with V.
    let svd = b.clone().svd(true, true);
    let w = svd.u.expect("left vectors requested");
    let v = svd.v_t.expect("right vectors requested").adjoint();
    let comp: Vec<C64> = svd
        .singular_values
        .iter()
        .map(|&s| C64::new((1.0 - s.min(1.0) * s.min(1.0)).max(0.0).sqrt(), 0.0))
        .collect();
    let root = |q: &CMatrix| {
        let mut scaled = q.clone();
        for (j, c) in comp.iter().enumerate() {
            scaled.column_mut(j).scale_mut(c.re);
        }
        scaled * q.adjoint()
    };
    let mut u = CMatrix::zeros(2 * n, 2 * n);
    u.view_mut((0, 0), (n, n)).copy_from(b);
    u.view_mut((0, n), (n, n)).copy_from(&root(&w));
    u.view_mut((n, 0), (n, n)).copy_from(&root(&v));
    u.view_mut((n, n), (n, n)).copy_from(&(-b.adjoint()));
    Ok(u)
}

/// A unitary carrying an encoded block in its ancilla-zero corner.
#[derive(Debug, Clone, PartialEq)]
pub struct Dilation {
    unitary: CMatrix,
    system_dim: usize,
}

impl Dilation {
    pub fn of(a: &BlockEncoding) -> Result<Self, BlockError> {
        Ok(Self {
            unitary: realize_dilation(a)?,
            system_dim: a.dim(),
        })
    }

    /// Wraps an arbitrary unitary whose size is a multiple of `system_dim`.
    pub fn from_unitary(unitary: CMatrix, system_dim: usize) -> Result<Self, BlockError> {
        if !unitary.is_square() || system_dim == 0 || unitary.nrows() % system_dim != 0 {
            return Err(BlockError::DimensionMismatch {
                left: unitary.nrows(),
                right: system_dim,
            });
        }
        Ok(Self {
            unitary,
            system_dim,
        })
    }

    pub fn unitary(&self) -> &CMatrix {
        &self.unitary
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn ancilla_dim(&self) -> usize {
        self.unitary.nrows() / self.system_dim
    }

    /// Number of ancilla qubits needed to hold the ancilla register.
    pub fn ancilla_qubits(&self) -> u32 {
        log2_ceil(self.ancilla_dim())
    }

    pub fn corner(&self) -> CMatrix {
        let n = self.system_dim;
        self.unitary.view((0, 0), (n, n)).into_owned()
    }

    /// `||U* U - I||` in spectral norm.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.unitary.nrows();
        let gram = self.unitary.adjoint() * &self.unitary - CMatrix::identity(n, n);
        spectral_norm(&gram)
    }

    /// Block-diagonal padding `U (+) I` up to `ancilla_dim` ancilla states.
    fn padded(&self, ancilla_dim: usize) -> CMatrix {
        let size = ancilla_dim * self.system_dim;
        let own = self.unitary.nrows();
        let mut out = CMatrix::identity(size, size);
        out.view_mut((0, 0), (own, own)).copy_from(&self.unitary);
        out
    }

    /// Lifts `self` to the ancilla space `outer (x) own (x) inner`.
    fn embed(&self, outer: usize, inner: usize) -> CMatrix {
        let n = self.system_dim;
        let a = self.ancilla_dim();
        let total = outer * a * inner * n;
        let mut out = CMatrix::zeros(total, total);
        let index = |o: usize, x: usize, i: usize, s: usize| ((o * a + x) * inner + i) * n + s;
        for o in 0..outer {
            for i in 0..inner {
                for x in 0..a {
                    for s in 0..n {
                        for y in 0..a {
                            for t in 0..n {
                                let val = self.unitary[(x * n + s, y * n + t)];
                                if val != C64::new(0.0, 0.0) {
                                    out[(index(o, x, i, s), index(o, y, i, t))] = val;
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Unitary whose corner is `corner(self) * corner(other)`.
    pub fn product(&self, other: &Self) -> Result<Self, BlockError> {
        self.same_system(other)?;
        let a = self.ancilla_dim();
        let b = other.ancilla_dim();
        // ancilla order (self, other): self acts with other's register idle
        let left = self.embed(1, b);
        let right = other.embed(a, 1);
        Self::from_unitary(left * right, self.system_dim)
    }

    /// Unitary whose corner is `(1/m) sum_i sign_i corner_i`.
    pub fn lcu(parts: &[&Self], signs: &[f64]) -> Result<Self, BlockError> {
        let first = parts.first().ok_or(BlockError::EmptyCombination)?;
        if signs.len() != parts.len() {
            return Err(BlockError::SignCount {
                encodings: parts.len(),
                signs: signs.len(),
            });
        }
        for p in &parts[1..] {
            first.same_system(p)?;
        }
        let n = first.system_dim;
        let m = parts.len();
        let select_dim = m.next_power_of_two();
        let work = parts.iter().map(|p| p.ancilla_dim()).max().unwrap_or(1);
        let block = work * n;
        let size = select_dim * block;

        let mut select = CMatrix::identity(size, size);
        for (j, (p, &s)) in parts.iter().zip(signs).enumerate() {
            let u = p.padded(work) * C64::new(s, 0.0);
            select.view_mut((j * block, j * block), (block, block)).copy_from(&u);
        }

        // Householder reflection sending |0> to the uniform state on m labels.
        let amp = 1.0 / (m as f64).sqrt();
        let mut w = vec![0.0; select_dim];
        for wj in w.iter_mut().take(m) {
            *wj = -amp;
        }
        w[0] += 1.0;
        let wn: f64 = w.iter().map(|x| x * x).sum();
        let prep_small = CMatrix::from_fn(select_dim, select_dim, |i, j| {
            let id = if i == j { 1.0 } else { 0.0 };
            let h = if wn > 0.0 { id - 2.0 * w[i] * w[j] / wn } else { id };
            C64::new(h, 0.0)
        });
        let prep = prep_small.kronecker(&CMatrix::identity(block, block));
        let u = &prep * select * &prep;
        Self::from_unitary(u, n)
    }

    /// Unitary whose corner is `corner(self) / p`, via a single-qubit `RY`.
    pub fn scale_down(&self, p: f64) -> Result<Self, BlockError> {
        if !(p.is_finite() && p > 1.0) {
            return Err(BlockError::InvalidScale(p));
        }
        let half = ry_angle(p) / 2.0;
        let (s, c) = half.sin_cos();
        let ry = CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)],
        );
        let n = self.system_dim;
        let rot = Self::from_unitary(ry.kronecker(&CMatrix::identity(n, n)), n)?;
        rot.product(self)
    }

    /// Unitary whose corner is `corner(self) (x) corner(other)`.
    pub fn tensor(&self, other: &Self) -> Result<Self, BlockError> {
        let n1 = self.system_dim;
        let (a2, n2) = (other.ancilla_dim(), other.system_dim);
        let raw = self.unitary.kronecker(&other.unitary);
        // raw index (x1, s1, x2, s2) -> (x1, x2, s1, s2)
        let perm = |k: usize| {
            let s2 = k % n2;
            let x2 = (k / n2) % a2;
            let s1 = (k / (n2 * a2)) % n1;
            let x1 = k / (n2 * a2 * n1);
            ((x1 * a2 + x2) * n1 + s1) * n2 + s2
        };
        let size = raw.nrows();
        let mut out = CMatrix::zeros(size, size);
        for i in 0..size {
            for j in 0..size {
                out[(perm(i), perm(j))] = raw[(i, j)];
            }
        }
        Self::from_unitary(out, n1 * n2)
    }

    fn same_system(&self, other: &Self) -> Result<(), BlockError> {
        if self.system_dim != other.system_dim {
            return Err(BlockError::DimensionMismatch {
                left: self.system_dim,
                right: other.system_dim,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockcalc::{diag_encode_real, lcu, product, scale_down, tensor};

    fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_and_identity_blocks() {
        let z = realize_dilation(&BlockEncoding::zero(2)).unwrap();
        let mut swap = CMatrix::zeros(4, 4);
        swap.view_mut((0, 2), (2, 2)).fill_with_identity();
        swap.view_mut((2, 0), (2, 2)).fill_with_identity();
        assert!(max_diff(&z, &swap) < 1e-15);

        let i = realize_dilation(&BlockEncoding::identity(2)).unwrap();
        let mut refl = CMatrix::identity(4, 4);
        refl.view_mut((2, 2), (2, 2)).fill_with_identity();
        refl.view_mut((2, 2), (2, 2)).scale_mut(-1.0);
        assert!(max_diff(&i, &refl) < 1e-15);
    }

    #[test]
    fn diagonal_dilation_is_unitary() {
        let a = diag_encode_real(&[0.3, -0.7, 0.1, 0.5]).unwrap();
        let d = Dilation::of(&a).unwrap();
        assert!(d.unitarity_error() < 1e-12);
        assert_eq!(&d.corner(), a.corner());
    }

    #[test]
    fn compositions_match_calculus() {
        let a = diag_encode_real(&[0.3, -0.7]).unwrap();
        let b = diag_encode_real(&[0.6, 0.2]).unwrap();
        let (da, db) = (Dilation::of(&a).unwrap(), Dilation::of(&b).unwrap());

        let p = da.product(&db).unwrap();
        assert!(p.unitarity_error() < 1e-12);
        assert!(max_diff(&p.corner(), product(&a, &b).unwrap().corner()) < 1e-14);

        let l = Dilation::lcu(&[&da, &db, &da], &[1.0, -1.0, 1.0]).unwrap();
        assert!(l.unitarity_error() < 1e-12);
        let expect = lcu(&[&a, &b, &a], &[1.0, -1.0, 1.0]).unwrap();
        assert!(max_diff(&l.corner(), expect.corner()) < 1e-14);

        let s = da.scale_down(3.0).unwrap();
        assert!(max_diff(&s.corner(), scale_down(&a, 3.0).unwrap().corner()) < 1e-15);

        let t = da.tensor(&db).unwrap();
        assert!(t.unitarity_error() < 1e-12);
        assert!(max_diff(&t.corner(), tensor(&[&a, &b]).unwrap().corner()) < 1e-15);
    }

    #[test]
    fn rejects_large_norm() {
        let big = CMatrix::identity(2, 2) * C64::new(1.1, 0.0);
        assert!(matches!(dilate(&big), Err(BlockError::NormTooLarge { .. })));
    }
}
