//! Matrix exponential by scaling and squaring around a Padé(13) core.

use nalgebra::{ComplexField, DMatrix};

use super::{ensure_finite, ensure_square, CMatrix, RMatrix};
use crate::error::{Error, Result};

// Padé(13,13) numerator coefficients b_k; the denominator uses (-1)^k b_k.
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which Padé(13) is accurate to double precision.
const THETA13: f64 = 5.371_920_351_148_152;

fn norm1_generic<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.clone().modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^A` for any real or complex square matrix.
///
/// The squaring count comes from `‖A‖₁` so the routine is deterministic for a
/// given input.
pub fn expm_generic<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Option<DMatrix<T>> {
    let n = a.nrows();
    if n == 0 {
        return Some(a.clone());
    }
    let norm = norm1_generic(a);
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scale = T::from_real(0.5f64.powi(squarings));
    let a = a * scale;

    let ident = DMatrix::<T>::identity(n, n);
    let b = |k: usize| T::from_real(PADE13[k]);

    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let u_inner = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    let u_outer = &a6 * u_inner + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &ident * b(1);
    let u = &a * u_outer;

    let v_inner = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    let v = &a6 * v_inner + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &ident * b(0);

    let numer = &v + &u;
    let denom = &v - &u;
    let mut r = denom.lu().solve(&numer)?;
    for _ in 0..squarings {
        r = &r * &r;
    }
    Some(r)
}

/// Complex matrix exponential.
pub fn mat_exp(a: &CMatrix) -> Result<CMatrix> {
    ensure_square(a)?;
    ensure_finite(a)?;
    expm_generic(a).ok_or_else(|| Error::Numeric("Padé denominator is singular".into()))
}

/// Real matrix exponential, used for `exp(τ·ad(X))` in structure-constant form.
pub fn mat_exp_real(a: &RMatrix) -> Result<RMatrix> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "matrix is {}x{}, expected square",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    expm_generic(a).ok_or_else(|| Error::Numeric("Padé denominator is singular".into()))
}
