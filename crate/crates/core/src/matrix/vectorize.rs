//! Real coordinates for skew-Hermitian matrices.
//!
//! Two coordinate systems are provided:
//!
//! * [`vectorize`]: the entry layout. For an `n×n` skew-Hermitian `X` the
//!   `n²` reals are `Im X[k][k]` for each diagonal entry, followed by
//!   `(Re X[r][c], Im X[r][c])` for every `r < c` in row-major order. This is
//!   the layout all conditioning and Gram-determinant figures are quoted in.
//! * [`tensor_components`]: coefficients over the orthogonal basis
//!   `i·(u_j ⊗ u_k)` built from the quaternion units with `u₀ = i·1`.

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{c64, ensure_square, fro_norm, kron, CMatrix};
use crate::error::{Error, Result};

/// Real coordinates of a skew-Hermitian matrix in the entry layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorizedElement(Vec<f64>);

impl VectorizedElement {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn to_dvector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }

    /// Matrix dimension `n` such that `len = n²`.
    pub fn matrix_dim(&self) -> Option<usize> {
        let n = (self.0.len() as f64).sqrt().round() as usize;
        (n * n == self.0.len()).then_some(n)
    }
}

impl From<DVector<f64>> for VectorizedElement {
    fn from(v: DVector<f64>) -> Self {
        Self(v.iter().copied().collect())
    }
}

/// The quaternion units `1, i, j, k` as 2×2 complex matrices.
pub fn quaternion_units() -> [CMatrix; 4] {
    let z = c64(0.0, 0.0);
    let one = c64(1.0, 0.0);
    let im = c64(0.0, 1.0);
    [
        CMatrix::from_row_slice(2, 2, &[one, z, z, one]),
        CMatrix::from_row_slice(2, 2, &[z, im, im, z]),
        CMatrix::from_row_slice(2, 2, &[z, -one, one, z]),
        CMatrix::from_row_slice(2, 2, &[im, z, z, -im]),
    ]
}

fn tensor_factors() -> [CMatrix; 4] {
    let [one, qi, qj, qk] = quaternion_units();
    [one * c64(0.0, 1.0), qi, qj, qk]
}

/// The sixteen skew-Hermitian matrices `i·(u_j ⊗ u_k)`, index `4j + k`.
pub fn tensor_basis() -> Vec<CMatrix> {
    let u = tensor_factors();
    let mut out = Vec::with_capacity(16);
    for a in &u {
        for b in &u {
            out.push(kron(a, b) * c64(0.0, 1.0));
        }
    }
    out
}

/// Coefficients of a 4×4 matrix over [`tensor_basis`].
///
/// Non-skew-Hermitian input is projected; the coefficients are those of the
/// skew-Hermitian part.
pub fn tensor_components(x: &CMatrix) -> Result<[f64; 16]> {
    if x.shape() != (4, 4) {
        return Err(Error::Dimension(format!(
            "tensor components need a 4x4 matrix, got {:?}",
            x.shape()
        )));
    }
    let mut out = [0.0; 16];
    for (slot, e) in out.iter_mut().zip(tensor_basis()) {
        // <E, X> / <E, E> with <A, B> = Re tr(A†B); every E has norm² 4.
        *slot = (e.adjoint() * x).trace().re / 4.0;
    }
    Ok(out)
}

/// Entry-layout coordinates of the skew-Hermitian part of `x`, together with
/// the Frobenius distance from `x` to that part.
pub fn vectorize_with_residual(x: &CMatrix) -> Result<(VectorizedElement, f64)> {
    let n = ensure_square(x)?;
    let skew = (x - x.adjoint()) * c64(0.5, 0.0);
    let residual = fro_norm(&(x - &skew));
    let mut coords = Vec::with_capacity(n * n);
    for k in 0..n {
        coords.push(skew[(k, k)].im);
    }
    for r in 0..n {
        for c in (r + 1)..n {
            let z = skew[(r, c)];
            coords.push(z.re);
            coords.push(z.im);
        }
    }
    Ok((VectorizedElement(coords), residual))
}

pub fn vectorize(x: &CMatrix) -> Result<VectorizedElement> {
    vectorize_with_residual(x).map(|(v, _)| v)
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &VectorizedElement) -> Result<CMatrix> {
    let n = v
        .matrix_dim()
        .ok_or_else(|| Error::Dimension(format!("{} is not a square number", v.len())))?;
    let c = v.as_slice();
    let mut m = CMatrix::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = Complex64::new(0.0, c[k]);
    }
    let mut idx = n;
    for r in 0..n {
        for col in (r + 1)..n {
            let z = Complex64::new(c[idx], c[idx + 1]);
            m[(r, col)] = z;
            m[(col, r)] = -z.conj();
            idx += 2;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{identity, is_skew_hermitian, rms_distance};

    #[test]
    fn tensor_basis_is_orthogonal_skew_hermitian() {
        let basis = tensor_basis();
        for (a, ea) in basis.iter().enumerate() {
            assert!(is_skew_hermitian(ea, 1e-15));
            for (b, eb) in basis.iter().enumerate() {
                let ip = (ea.adjoint() * eb).trace().re;
                let want = if a == b { 4.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn scalar_identity_is_single_tensor_component() {
        // u₀⊗u₀ = −1⊗1, so i·1⊗1 = −i·(u₀⊗u₀).
        let c = tensor_components(&(identity(4) * c64(0.0, 1.0))).unwrap();
        assert!((c[0] + 1.0).abs() < 1e-15);
        assert!(c[1..].iter().all(|x| x.abs() < 1e-15));
    }

    #[test]
    fn entry_layout_round_trip() {
        let v = VectorizedElement::new((0..16).map(|k| k as f64 * 0.1 - 0.7).collect());
        let m = devectorize(&v).unwrap();
        assert!(is_skew_hermitian(&m, 1e-15));
        assert_eq!(vectorize(&m).unwrap(), v);
    }

    #[test]
    fn projection_residual_for_hermitian_part() {
        let (v, res) = vectorize_with_residual(&identity(4)).unwrap();
        assert!(v.norm() < 1e-15);
        assert!((res - 2.0).abs() < 1e-15);
        let back = devectorize(&v).unwrap();
        assert!(rms_distance(&back, &CMatrix::zeros(4, 4)) < 1e-15);
    }

    #[test]
    fn devectorize_rejects_bad_length() {
        assert!(devectorize(&VectorizedElement::new(vec![0.0; 15])).is_err());
    }
}
