//! Dense complex matrix kernels.
//!
//! Everything here works on `nalgebra::DMatrix<Complex64>`; the Lie-theoretic
//! layers above only ever see 4×4 matrices in practice, but nothing in this
//! module assumes that except [`tensor_components`] and
//! [`gram_determinant_16`].

mod expm;
mod logm;
mod random;
mod rank;
mod vectorize;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub use expm::{expm_generic, mat_exp, mat_exp_real};
pub use logm::{eig_unitary, mat_log_unitary, UnitaryEigen, UnitaryLog};
pub use random::{haar_special_unitary, haar_unitary};
pub use rank::{
    condition_number, gram_determinant_16, independent_subset, numerical_rank, singular_values,
    stack_rows, ConditionReport, DEFAULT_INDEPENDENCE_TOL,
};
pub use vectorize::{
    devectorize, quaternion_units, tensor_basis, tensor_components, vectorize,
    vectorize_with_residual, VectorizedElement,
};

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

/// Build a square matrix from row-major entries.
pub fn from_rows(n: usize, entries: &[Complex64]) -> Result<CMatrix> {
    if entries.len() != n * n {
        return Err(Error::Dimension(format!(
            "expected {} entries for a {n}x{n} matrix, got {}",
            n * n,
            entries.len()
        )));
    }
    Ok(CMatrix::from_row_slice(n, n, entries))
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn dagger(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn ensure_square(a: &CMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "matrix is {}x{}, expected square",
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a.nrows())
}

pub fn ensure_finite(a: &CMatrix) -> Result<()> {
    if a.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn ensure_same_dims(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Dimension(format!(
            "{:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(())
}

/// Frobenius norm.
pub fn fro_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Induced 1-norm (maximum absolute column sum).
pub fn norm1(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Entrywise rms distance `sqrt(tr((A-B)†(A-B)) / n²)`.
///
/// For 4×4 matrices this is the `1/16`-normalised figure used to report
/// synthesis accuracy.
pub fn rms_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = (a.nrows() * a.ncols()) as f64;
    (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / n.sqrt()
}

pub fn is_skew_hermitian(a: &CMatrix, tol: f64) -> bool {
    a.is_square() && fro_norm(&(a + a.adjoint())) <= tol * fro_norm(a).max(1.0)
}

pub fn is_traceless(a: &CMatrix, tol: f64) -> bool {
    a.is_square() && a.trace().norm() <= tol * fro_norm(a).max(1.0)
}

pub fn is_unitary(a: &CMatrix, tol: f64) -> bool {
    a.is_square() && {
        let n = a.nrows();
        fro_norm(&(a.adjoint() * a - identity(n))) <= tol
    }
}

/// The Lie bracket `ad(X)Y = XY − YX`.
pub fn ad(x: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
    ensure_square(x)?;
    ensure_same_dims(x, y)?;
    Ok(commutator(x, y))
}

/// Unchecked bracket for hot loops where dimensions are known to agree.
#[inline]
pub fn commutator(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x * y - y * x
}

/// Conjugation `Ad(g)Y = g Y g⁻¹`. Unitary `g` uses `g†` as its inverse.
pub fn big_ad(g: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
    ensure_square(g)?;
    ensure_same_dims(g, y)?;
    if is_unitary(g, 1e-12) {
        return Ok(g * y * g.adjoint());
    }
    let inv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("Ad with non-invertible g".into()))?;
    Ok(g * y * inv)
}

/// `Ad(exp(X)) Y` for skew-Hermitian `X`, i.e. `e^X Y e^{-X}`.
pub fn conjugate_by_exp(x: &CMatrix, y: &CMatrix) -> Result<CMatrix> {
    let g = mat_exp(x)?;
    Ok(&g * y * g.adjoint())
}
