//! Rank, independence and conditioning of stacked coordinate vectors.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::{c64, identity, vectorize, CMatrix, RMatrix, VectorizedElement};
use crate::error::{Error, Result};

/// Relative tolerance below which a Gram-Schmidt residual counts as zero.
pub const DEFAULT_INDEPENDENCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub sigma_max: f64,
    pub sigma_min: f64,
    /// `sigma_max / sigma_min`, `+∞` when the stack is rank deficient.
    pub ratio: f64,
}

/// Rows of the result are the given vectors.
pub fn stack_rows(vectors: &[VectorizedElement]) -> Result<RMatrix> {
    let Some(first) = vectors.first() else {
        return Ok(RMatrix::zeros(0, 0));
    };
    let cols = first.len();
    if let Some(bad) = vectors.iter().find(|v| v.len() != cols) {
        return Err(Error::Dimension(format!(
            "vector of length {} in a stack of length {cols}",
            bad.len()
        )));
    }
    Ok(RMatrix::from_fn(vectors.len(), cols, |r, c| {
        vectors[r].as_slice()[c]
    }))
}

/// Singular values in decreasing order.
pub fn singular_values(m: &RMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `tol · σmax`.
pub fn numerical_rank(m: &RMatrix, tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > tol * top).count(),
        _ => 0,
    }
}

/// Indices of a maximal independent subset, scanned in input order.
///
/// Each vector is normalised before projection, so a vector is rejected when
/// its residual against the accepted span is at most `tol` times its own norm.
pub fn independent_subset(vectors: &[VectorizedElement], tol: f64) -> Vec<usize> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut out = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            continue;
        }
        let mut r = v.to_dvector() / norm;
        if basis.first().is_some_and(|b| b.len() != r.len()) {
            continue;
        }
        // Two passes of classical Gram-Schmidt keep the residual honest.
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&r);
                r.axpy(-c, b, 1.0);
            }
        }
        let res = r.norm();
        if res > tol {
            basis.push(r / res);
            out.push(idx);
        }
    }
    out
}

pub fn condition_number(vectors: &[VectorizedElement]) -> Result<ConditionReport> {
    let m = stack_rows(vectors)?;
    let sv = singular_values(&m);
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    // A row stack with more rows than columns has extra zero singular values
    // that SVD does not report.
    let mut sigma_min = if m.nrows() > m.ncols() {
        0.0
    } else {
        sv.last().copied().unwrap_or(0.0)
    };
    if sigma_min <= 1e-13 * sigma_max {
        sigma_min = 0.0;
    }
    let ratio = if sigma_min > 0.0 {
        sigma_max / sigma_min
    } else {
        f64::INFINITY
    };
    Ok(ConditionReport {
        sigma_max,
        sigma_min,
        ratio,
    })
}

/// Determinant of the 16×16 matrix whose rows are the entry-layout
/// coordinates of the fifteen given 4×4 elements followed by `i·1⊗1`.
pub fn gram_determinant_16(elements: &[CMatrix]) -> Result<f64> {
    if elements.len() != 15 {
        return Err(Error::Dimension(format!(
            "expected 15 elements, got {}",
            elements.len()
        )));
    }
    let mut rows = Vec::with_capacity(16);
    for e in elements {
        if e.shape() != (4, 4) {
            return Err(Error::Dimension(format!(
                "element is {:?}, expected 4x4",
                e.shape()
            )));
        }
        rows.push(vectorize(e)?);
    }
    rows.push(vectorize(&(identity(4) * c64(0.0, 1.0)))?);
    Ok(stack_rows(&rows)?.determinant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ve(v: &[f64]) -> VectorizedElement {
        VectorizedElement::new(v.to_vec())
    }

    #[test]
    fn duplicate_is_dependent() {
        let v = ve(&[1.0, 2.0, 0.0, -1.0]);
        let w = ve(&[2.0, 4.0, 0.0, -2.0]);
        assert_eq!(
            independent_subset(&[v, w], DEFAULT_INDEPENDENCE_TOL),
            vec![0]
        );
    }

    #[test]
    fn zero_vectors_are_skipped() {
        let z = ve(&[0.0; 4]);
        assert!(independent_subset(&[z.clone(), z], 1e-9).is_empty());
    }

    #[test]
    fn orthonormal_rows_have_unit_ratio() {
        let rows: Vec<_> = (0..4)
            .map(|k| {
                ve(&(0..4)
                    .map(|j| if j == k { 1.0 } else { 0.0 })
                    .collect::<Vec<_>>())
            })
            .collect();
        let c = condition_number(&rows).unwrap();
        assert!((c.ratio - 1.0).abs() < 1e-14);
    }

    #[test]
    fn rank_deficient_stack_has_zero_sigma_min() {
        let rows = vec![ve(&[1.0, 0.0, 0.0]), ve(&[2.0, 0.0, 0.0])];
        let c = condition_number(&rows).unwrap();
        assert_eq!(c.sigma_min, 0.0);
        assert!(c.ratio.is_infinite());
        let tall = vec![ve(&[1.0, 0.0]), ve(&[0.0, 1.0]), ve(&[1.0, 1.0])];
        assert_eq!(condition_number(&tall).unwrap().sigma_min, 0.0);
    }

    #[test]
    fn repeated_element_gives_zero_determinant() {
        let mut rng_vals = (1..=16).map(|k| (k as f64 * 0.37).sin());
        let base = super::super::devectorize(&ve(&(0..16)
            .map(|_| rng_vals.next().unwrap())
            .collect::<Vec<_>>()))
        .unwrap();
        let elements = vec![base; 15];
        assert_eq!(gram_determinant_16(&elements).unwrap(), 0.0);
        assert!(gram_determinant_16(&elements[..3]).is_err());
    }

    proptest! {
        #[test]
        fn subset_size_matches_svd_rank(
            seed in proptest::collection::vec(-1.0f64..1.0, 24),
            dup in 0usize..6,
        ) {
            // Six vectors of length 4, one of them a combination of two others.
            let mut vs: Vec<VectorizedElement> = seed.chunks(4).map(ve).collect();
            let a = (dup + 1) % 6;
            let b = (dup + 2) % 6;
            let comb: Vec<f64> = vs[a].as_slice().iter().zip(vs[b].as_slice())
                .map(|(x, y)| 0.5 * x - 1.5 * y).collect();
            vs[dup] = ve(&comb);
            let subset = independent_subset(&vs, DEFAULT_INDEPENDENCE_TOL);
            let m = stack_rows(&vs).unwrap();
            prop_assert_eq!(subset.len(), numerical_rank(&m, 1e-9));
        }
    }
}
