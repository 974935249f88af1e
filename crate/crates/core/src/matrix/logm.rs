//! Logarithm of unitary matrices via a canonicalised eigendecomposition.
//!
//! A unitary `U` is normal, so its complex Schur form is diagonal. Within a
//! degenerate eigenspace the Schur vectors are arbitrary, which would make the
//! branch choice below depend on rounding noise. Each cluster is therefore
//! re-expressed in a canonical orthonormal basis obtained from the projections
//! of the standard basis vectors (pivoted, lowest index first).

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use super::{ensure_square, fro_norm, is_unitary, CMatrix};
use crate::error::{Error, Result};

const CLUSTER_TOL: f64 = 1e-7;
const BRANCH_TOL: f64 = 1e-8;
const RESIDUAL_LIMIT: f64 = 1e-9;

/// Eigendecomposition `U = V diag(λ) V†` of a unitary matrix.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    pub values: Vec<Complex64>,
    pub vectors: CMatrix,
    /// Standard-basis index each eigenvector was derived from.
    pub pivots: Vec<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct UnitaryLog {
    pub log: CMatrix,
    /// Eigenphases actually used, aligned with `eigen.vectors` columns.
    pub phases: Vec<f64>,
    /// Set when an eigenphase sat on the −π cut and was moved to +π.
    pub branch_warning: bool,
    pub residual: f64,
}

pub fn eig_unitary(u: &CMatrix) -> Result<UnitaryEigen> {
    let n = ensure_square(u)?;
    let (q, t) = u.clone().schur().unpack();
    let raw: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();

    // Group eigenvalues into clusters, keeping first-appearance order.
    let mut clusters: Vec<(Complex64, Vec<usize>)> = Vec::new();
    for (k, &lam) in raw.iter().enumerate() {
        match clusters
            .iter_mut()
            .find(|(c, _)| (c - lam).norm() < CLUSTER_TOL)
        {
            Some((_, members)) => members.push(k),
            None => clusters.push((lam, vec![k])),
        }
    }

    let mut values = Vec::with_capacity(n);
    let mut columns: Vec<DVector<Complex64>> = Vec::with_capacity(n);
    let mut pivots = Vec::with_capacity(n);

    for (_, members) in &clusters {
        let qc = CMatrix::from_fn(n, members.len(), |r, c| q[(r, members[c])]);
        let proj = &qc * qc.adjoint();
        let mean = members.iter().map(|&k| raw[k]).sum::<Complex64>() / members.len() as f64;
        let lam = mean / mean.norm();

        let mut accepted: Vec<DVector<Complex64>> = Vec::new();
        let mut used = vec![false; n];
        for _ in 0..members.len() {
            // Pivot: the standard basis vector with the largest remaining
            // component, lowest index on ties.
            let mut best: Option<(usize, DVector<Complex64>, f64)> = None;
            for k in 0..n {
                if used[k] {
                    continue;
                }
                let mut v = proj.column(k).into_owned();
                for _ in 0..2 {
                    for a in &accepted {
                        let c = a.dotc(&v);
                        v -= a * c;
                    }
                }
                let norm = v.norm();
                let better = match &best {
                    None => true,
                    Some((_, _, b)) => norm > b + 1e-9,
                };
                if better {
                    best = Some((k, v, norm));
                }
            }
            let (k, mut v, norm) = best.expect("cluster larger than dimension");
            used[k] = true;
            v /= Complex64::new(norm, 0.0);
            // Fix the global phase: pivot component real and positive.
            let ph = v[k] / v[k].norm();
            v /= ph;
            accepted.push(v.clone());
            columns.push(v);
            values.push(lam);
            pivots.push(k);
        }
    }

    let vectors = CMatrix::from_columns(&columns);
    let d = CMatrix::from_diagonal(&DVector::from_vec(values.clone()));
    let residual = fro_norm(&(u - &vectors * d * vectors.adjoint()));
    Ok(UnitaryEigen {
        values,
        vectors,
        pivots,
        residual,
    })
}

/// Skew-Hermitian `L` with `e^L = U`.
///
/// Eigenphases are taken in `(−π, π]`. When `det U = 1` the largest phases
/// are shifted down by `2π` (or the smallest up) until `tr L = 0`; ties go to
/// the eigenvector with the highest pivot index.
pub fn mat_log_unitary(u: &CMatrix) -> Result<UnitaryLog> {
    let n = ensure_square(u)?;
    if !is_unitary(u, 1e-9) {
        return Err(Error::Domain(
            "mat_log_unitary needs a unitary input".into(),
        ));
    }
    let eig = eig_unitary(u)?;

    let mut branch_warning = false;
    let mut phases: Vec<f64> = eig
        .values
        .iter()
        .map(|z| {
            let th = z.arg();
            if th <= -PI + BRANCH_TOL {
                branch_warning = true;
                PI
            } else {
                th
            }
        })
        .collect();

    let det = u.determinant();
    if (det - Complex64::new(1.0, 0.0)).norm() < 1e-9 {
        let total: f64 = phases.iter().sum();
        let m = (total / (2.0 * PI)).round() as i64;
        for _ in 0..m.unsigned_abs() {
            let pick = (0..n).fold(None::<usize>, |acc, k| match acc {
                None => Some(k),
                Some(j) => {
                    let (pk, pj) = (phases[k], phases[j]);
                    let tie = (pk - pj).abs() < BRANCH_TOL;
                    let wins = if m > 0 { pk > pj } else { pk < pj };
                    if (wins && !tie) || (tie && eig.pivots[k] > eig.pivots[j]) {
                        Some(k)
                    } else {
                        Some(j)
                    }
                }
            });
            let k = pick.expect("non-empty matrix");
            phases[k] -= (m.signum() as f64) * 2.0 * PI;
        }
    }

    let d = CMatrix::from_diagonal(&DVector::from_iterator(
        n,
        phases.iter().map(|&p| Complex64::new(0.0, p)),
    ));
    let v = &eig.vectors;
    let raw = v * d * v.adjoint();
    let log = (&raw - raw.adjoint()) * Complex64::new(0.5, 0.0);

    let back = super::mat_exp(&log)?;
    let residual = fro_norm(&(back - u));
    if !(eig.residual <= RESIDUAL_LIMIT && residual <= RESIDUAL_LIMIT) {
        return Err(Error::Numeric(format!(
            "unitary logarithm residual {residual:e} (eigen residual {:e})",
            eig.residual
        )));
    }
    Ok(UnitaryLog {
        log,
        phases,
        branch_warning,
        residual,
    })
}
