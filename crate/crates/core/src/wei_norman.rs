//! Canonical coordinates of the second kind by integrating the Wei-Norman
//! equations `M(τ) dτ/dt = x`, with determinant monitoring and n-th root
//! splitting when `M` approaches singularity.

use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::algebra::SpanProjector;
use crate::error::{Error, Result};
use crate::matrix::{c64, commutator, fro_norm, identity, mat_exp, rms_distance, CMatrix, RMatrix};

/// Pivot magnitude below which `M` is treated as singular.
const PIVOT_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone)]
pub struct WeiNormanProblem {
    basis: Vec<CMatrix>,
    adjoint_mats: Vec<RMatrix>,
    ad_exps: Vec<AdExp>,
    target_coords: DVector<f64>,
}

/// `e^{τ·ad}` through a fixed real Schur form.
///
/// With `G` the Gram matrix of the basis under `Re tr(A†B)` and `S = G^{1/2}`,
/// `A = S·ad·S⁻¹` is real skew-symmetric (the inner product is Ad-invariant),
/// so `A = Q T Qᵀ` with `T` block diagonal in 2×2 rotation generators and
/// `e^{τ·ad} = S⁻¹Q e^{τT} QᵀS`.
#[derive(Debug, Clone)]
struct AdExp {
    left: RMatrix,
    /// `(i, ω)` for each 2×2 block at rows `i, i+1`.
    blocks: Vec<(usize, f64)>,
    right: RMatrix,
}

impl AdExp {
    fn build(ad: &RMatrix, s: &RMatrix, s_inv: &RMatrix) -> Self {
        let a = s * ad * s_inv;
        let a = (&a - a.transpose()) * 0.5;
        let n = a.nrows();
        let scale = a.amax().max(f64::MIN_POSITIVE);
        let (q, t) = a.schur().unpack();
        let mut blocks = Vec::new();
        let mut i = 0;
        while i + 1 < n {
            if t[(i + 1, i)].abs() > 1e-12 * scale {
                blocks.push((i, 0.5 * (t[(i, i + 1)] - t[(i + 1, i)])));
                i += 2;
            } else {
                i += 1;
            }
        }
        Self {
            left: s_inv * &q,
            blocks,
            right: q.transpose() * s,
        }
    }

    fn exp(&self, tau: f64) -> RMatrix {
        let mut l = self.left.clone();
        for &(i, w) in &self.blocks {
            let (sn, cs) = (w * tau).sin_cos();
            for r in 0..l.nrows() {
                let (a, b) = (l[(r, i)], l[(r, i + 1)]);
                l[(r, i)] = cs * a - sn * b;
                l[(r, i + 1)] = sn * a + cs * b;
            }
        }
        l * &self.right
    }
}

fn gram_sqrt(basis: &[CMatrix]) -> Result<(RMatrix, RMatrix)> {
    let n = basis.len();
    let g = RMatrix::from_fn(n, n, |i, j| (basis[i].adjoint() * &basis[j]).trace().re);
    let eig = g.symmetric_eigen();
    if eig
        .eigenvalues
        .iter()
        .any(|&l| l <= 1e-14 * eig.eigenvalues.amax())
    {
        return Err(Error::Singular("basis Gram matrix".into()));
    }
    let v = &eig.eigenvectors;
    let d = RMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let d_inv = RMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    Ok((v * d * v.transpose(), v * d_inv * v.transpose()))
}

impl WeiNormanProblem {
    /// Precomputes `ad(X̂ⱼ)` in basis coordinates. Fails with `NotInSpan` if
    /// the basis is not bracket-closed to `1e-9` (relative).
    pub fn new(basis: &[CMatrix], target_coords: &[f64]) -> Result<Self> {
        let n = basis.len();
        if target_coords.len() != n {
            return Err(Error::Dimension(format!(
                "{} target coordinates for a basis of {n}",
                target_coords.len()
            )));
        }
        if target_coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let proj = SpanProjector::new(basis)?;
        let mut adjoint_mats = Vec::with_capacity(n);
        for a in basis {
            let mut m = RMatrix::zeros(n, n);
            for (col, b) in basis.iter().enumerate() {
                let br = commutator(a, b);
                let (c, residual) = proj.coords(&br)?;
                if residual > 1e-9 * (fro_norm(a) * fro_norm(b)).max(1.0) {
                    return Err(Error::NotInSpan { residual });
                }
                m.set_column(col, &c);
            }
            adjoint_mats.push(m);
        }
        let (sq, sq_inv) = gram_sqrt(basis)?;
        let ad_exps = adjoint_mats
            .iter()
            .map(|m| AdExp::build(m, &sq, &sq_inv))
            .collect();
        Ok(Self {
            basis: basis.to_vec(),
            adjoint_mats,
            ad_exps,
            target_coords: DVector::from_column_slice(target_coords),
        })
    }

    /// Same basis, new target.
    pub fn with_target(&self, target_coords: &[f64]) -> Result<Self> {
        if target_coords.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "{} target coordinates for a basis of {}",
                target_coords.len(),
                self.dim()
            )));
        }
        Ok(Self {
            target_coords: DVector::from_column_slice(target_coords),
            ..self.clone()
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    pub fn adjoint_mats(&self) -> &[RMatrix] {
        &self.adjoint_mats
    }

    pub fn target_coords(&self) -> &DVector<f64> {
        &self.target_coords
    }

    /// `Σ xⱼ X̂ⱼ`.
    pub fn target_matrix(&self) -> CMatrix {
        combine(&self.basis, self.target_coords.as_slice())
    }
}

fn combine(basis: &[CMatrix], coeffs: &[f64]) -> CMatrix {
    let n = basis[0].nrows();
    basis
        .iter()
        .zip(coeffs)
        .fold(CMatrix::zeros(n, n), |acc, (b, &c)| acc + b * c64(c, 0.0))
}

/// Column `j` is column `j` of `e^{τ₁ad₁}···e^{τ_{j−1}ad_{j−1}}`.
pub fn wn_matrix(problem: &WeiNormanProblem, tau: &[f64]) -> Result<RMatrix> {
    let n = problem.dim();
    if tau.len() != n {
        return Err(Error::Dimension(format!(
            "tau has {} entries, expected {n}",
            tau.len()
        )));
    }
    if tau.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut m = RMatrix::zeros(n, n);
    let mut prod = RMatrix::identity(n, n);
    for j in 0..n {
        m.set_column(j, &prod.column(j));
        if j + 1 < n && tau[j] != 0.0 {
            prod *= problem.ad_exps[j].exp(tau[j]);
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WnState {
    pub t: f64,
    pub tau: DVector<f64>,
}

impl WnState {
    pub fn zero(n: usize) -> Self {
        Self {
            t: 0.0,
            tau: DVector::zeros(n),
        }
    }
}

/// `M(τ)⁻¹ x` together with `det M(τ)`.
fn rhs(
    problem: &WeiNormanProblem,
    tau: &DVector<f64>,
    x: &DVector<f64>,
    t: f64,
) -> Result<(DVector<f64>, f64)> {
    let m = wn_matrix(problem, tau.as_slice())?;
    let lu = m.lu();
    let det = lu.determinant();
    let u = lu.u();
    let min_pivot = u
        .diagonal()
        .iter()
        .map(|p| p.abs())
        .fold(f64::INFINITY, f64::min);
    if !(min_pivot > PIVOT_FLOOR) {
        return Err(Error::Breakdown { time: t, det, n: 1 });
    }
    let sol = lu.solve(x).ok_or(Error::Breakdown { time: t, det, n: 1 })?;
    Ok((sol, det))
}

/// One classical RK4 step of `dτ/dt = M(τ)⁻¹ x`.
pub fn wn_step(
    problem: &WeiNormanProblem,
    x: &DVector<f64>,
    state: &WnState,
    dt: f64,
) -> Result<WnState> {
    let (k1, _) = rhs(problem, &state.tau, x, state.t)?;
    rk4_from(problem, x, state, dt, k1)
}

fn rk4_from(
    problem: &WeiNormanProblem,
    x: &DVector<f64>,
    state: &WnState,
    dt: f64,
    k1: DVector<f64>,
) -> Result<WnState> {
    let h = 0.5 * dt;
    let (k2, _) = rhs(problem, &(&state.tau + &k1 * h), x, state.t + h)?;
    let (k3, _) = rhs(problem, &(&state.tau + &k2 * h), x, state.t + h)?;
    let (k4, _) = rhs(problem, &(&state.tau + &k3 * dt), x, state.t + dt)?;
    let tau = &state.tau + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    Ok(WnState {
        t: state.t + dt,
        tau,
    })
}

/// Integration record on the fixed grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeiNormanTrace {
    pub times: Vec<f64>,
    pub tau: Vec<Vec<f64>>,
    pub dets: Vec<f64>,
    pub breakdown_time: Option<f64>,
    /// Split order the target was divided by.
    pub n: usize,
}

impl WeiNormanTrace {
    pub fn final_tau(&self) -> &[f64] {
        self.tau.last().map(|v| v.as_slice()).unwrap_or(&[])
    }

    fn write_to<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let n = self.tau.first().map_or(0, |v| v.len());
        let mut header = vec!["t".to_string(), "det".to_string()];
        header.extend((1..=n).map(|j| format!("tau{j}")));
        w.write_record(&header)?;
        for ((t, d), tau) in self.times.iter().zip(&self.dets).zip(&self.tau) {
            let mut row = vec![format!("{t:.6}"), format!("{d:.12e}")];
            row.extend(tau.iter().map(|v| format!("{v:.12e}")));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// CSV of `(t, det, tau1 … tauN)`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.write_to(std::fs::File::create(path)?)
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Numeric(e.to_string()))
    }
}

/// Integrates `t: 0 → 1` for target `x/n`, stopping at the first grid point
/// where `det M < det_threshold`.
pub fn integrate(
    problem: &WeiNormanProblem,
    n: usize,
    dt: f64,
    det_threshold: f64,
) -> Result<WeiNormanTrace> {
    if !(dt > 0.0 && dt <= 1.0) {
        return Err(Error::Validation(format!("dt = {dt} outside (0, 1]")));
    }
    if n == 0 {
        return Err(Error::Validation("split order must be positive".into()));
    }
    let steps = (1.0 / dt).round() as usize;
    if ((steps as f64) * dt - 1.0).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "dt = {dt} does not divide [0, 1]"
        )));
    }
    let x = problem.target_coords() / n as f64;
    let dim = problem.dim();
    let mut state = WnState::zero(dim);
    let mut trace = WeiNormanTrace {
        times: Vec::with_capacity(steps + 1),
        tau: Vec::with_capacity(steps + 1),
        dets: Vec::with_capacity(steps + 1),
        breakdown_time: None,
        n,
    };
    for i in 0..=steps {
        let t = i as f64 * dt;
        state.t = t;
        let eval = rhs(problem, &state.tau, &x, t);
        let (k1, det) = match eval {
            Ok(v) => v,
            Err(Error::Breakdown { det, .. }) => {
                trace.times.push(t);
                trace.tau.push(state.tau.iter().copied().collect());
                trace.dets.push(det);
                trace.breakdown_time = Some(t);
                return Ok(trace);
            }
            Err(e) => return Err(e),
        };
        trace.times.push(t);
        trace.tau.push(state.tau.iter().copied().collect());
        trace.dets.push(det);
        if det < det_threshold {
            trace.breakdown_time = Some(t);
            return Ok(trace);
        }
        if i == steps {
            break;
        }
        match rk4_from(problem, &x, &state, dt, k1) {
            Ok(next) => state = next,
            Err(Error::Breakdown { det, .. }) => {
                trace.breakdown_time = Some(t);
                *trace.dets.last_mut().expect("pushed above") = det.min(det_threshold);
                return Ok(trace);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(trace)
}

#[derive(Debug, Clone)]
pub struct WeiNormanSolution {
    pub tau: Vec<f64>,
    pub n: usize,
    /// Breakdown time of the unsplit first pass, if any.
    pub first_breakdown: Option<f64>,
    pub first_pass: WeiNormanTrace,
    pub trace: WeiNormanTrace,
    /// rms distance between `Π e^{τⱼX̂ⱼ}` and `exp(X/n)`.
    pub reconstruction_rms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WnOptions {
    pub dt: f64,
    pub det_threshold: f64,
}

impl Default for WnOptions {
    fn default() -> Self {
        Self {
            dt: 0.001,
            det_threshold: 0.1,
        }
    }
}

/// `n = ⌊1/t*⌋ + 1` from the first-pass breakdown time.
pub fn split_order(breakdown_time: f64) -> usize {
    (1.0 / breakdown_time).floor() as usize + 1
}

pub fn find_coordinates(problem: &WeiNormanProblem, opts: WnOptions) -> Result<WeiNormanSolution> {
    if !(opts.dt > 0.0 && opts.dt <= 0.01) {
        return Err(Error::Validation(format!(
            "dt = {} outside (0, 0.01]",
            opts.dt
        )));
    }
    if !(opts.det_threshold > 0.0 && opts.det_threshold < 1.0) {
        return Err(Error::Validation(format!(
            "det threshold {} outside (0, 1)",
            opts.det_threshold
        )));
    }
    let first = integrate(problem, 1, opts.dt, opts.det_threshold)?;
    let (trace, n) = match first.breakdown_time {
        None => (first.clone(), 1),
        Some(t_star) => {
            let n = split_order(t_star.max(opts.dt));
            let second = integrate(problem, n, opts.dt, opts.det_threshold)?;
            match second.breakdown_time {
                None => (second, n),
                Some(_) => {
                    let third = integrate(problem, n + 1, opts.dt, opts.det_threshold)?;
                    if let Some(time) = third.breakdown_time {
                        return Err(Error::Breakdown {
                            time,
                            det: third.dets.last().copied().unwrap_or(0.0),
                            n: n + 1,
                        });
                    }
                    (third, n + 1)
                }
            }
        }
    };
    let tau = trace.final_tau().to_vec();
    let target = mat_exp(&(problem.target_matrix() * c64(1.0 / n as f64, 0.0)))?;
    let reconstruction_rms = rms_distance(&reconstruct(problem.basis(), &tau)?, &target);
    if !reconstruction_rms.is_finite() {
        return Err(Error::Numeric("non-finite reconstruction".into()));
    }
    Ok(WeiNormanSolution {
        tau,
        n,
        first_breakdown: first.breakdown_time,
        first_pass: first,
        trace,
        reconstruction_rms,
    })
}

/// `e^{τ₁X̂₁} e^{τ₂X̂₂} ··· e^{τ_N X̂_N}`.
pub fn reconstruct(basis: &[CMatrix], tau: &[f64]) -> Result<CMatrix> {
    if basis.len() != tau.len() {
        return Err(Error::Dimension(format!(
            "{} coordinates for {} basis elements",
            tau.len(),
            basis.len()
        )));
    }
    let n = basis.first().map_or(0, |b| b.nrows());
    let mut p = identity(n);
    for (b, &t) in basis.iter().zip(tau) {
        p *= mat_exp(&(b * c64(t, 0.0)))?;
    }
    Ok(p)
}
