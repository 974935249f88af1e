//! The coupled nucleus/electron spin model: constants, generators, unit
//! scalings and the entanglement degree.

mod named;

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, Generator};
use crate::error::{Error, Result};
use crate::matrix::{c64, fro_norm, kron, quaternion_units, CMatrix};

pub use named::{
    gell_mann_basis, killing_form, two_generator_identity_residual, verify_bracket_table,
    BracketReport, BracketRow, NamedBasis15, TwoGeneratorReport, L_VARIANT_LABELS,
};

/// Hardware field cap in units of `B_unit`.
pub const FIELD_CAP_UNITS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// MHz/T
    pub gamma_n: f64,
    /// MHz/T
    pub gamma_e: f64,
    /// MHz
    pub kappa: f64,
    /// mT
    pub b_unit: f64,
    /// ns
    pub tau_unit: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            gamma_n: 17.23,
            gamma_e: 27_970.0,
            kappa: 58.765,
            b_unit: 10.0,
            tau_unit: 100.0,
        }
    }
}

impl PhysicalConstants {
    /// Both ratios set to their mean, which keeps the field scale unchanged.
    pub fn with_equal_gammas(&self) -> Self {
        let g = 0.5 * (self.gamma_n + self.gamma_e);
        Self {
            gamma_n: g,
            gamma_e: g,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.gamma_n,
            self.gamma_e,
            self.kappa,
            self.b_unit,
            self.tau_unit,
        ];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("constants must be finite".into()));
        }
        if self.kappa <= 0.0 {
            return Err(Error::Config("kappa must be positive".into()));
        }
        if self.b_unit <= 0.0 || self.tau_unit <= 0.0 {
            return Err(Error::Config("unit scales must be positive".into()));
        }
        if self.gamma_n + self.gamma_e == 0.0 {
            return Err(Error::Config("gamma_n + gamma_e must be nonzero".into()));
        }
        Ok(())
    }

    /// Parse `key = value` lines; `#` starts a comment.
    pub fn parse_config(text: &str) -> Result<Self> {
        let mut c = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", lineno + 1)))?;
            let value: f64 = value.trim().parse().map_err(|_| {
                Error::Config(format!(
                    "line {}: bad number {:?}",
                    lineno + 1,
                    value.trim()
                ))
            })?;
            match key.trim() {
                "gamma_n_MHz_per_T" => c.gamma_n = value,
                "gamma_e_MHz_per_T" => c.gamma_e = value,
                "kappa_MHz" => c.kappa = value,
                "B_unit_mT" => c.b_unit = value,
                "tau_unit_ns" => c.tau_unit = value,
                other => return Err(Error::Config(format!("unknown key {other:?}"))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn from_config_file(path: &Path) -> Result<Self> {
        Self::parse_config(&std::fs::read_to_string(path)?)
    }

    pub fn to_config(&self) -> String {
        format!(
            "gamma_n_MHz_per_T = {}\ngamma_e_MHz_per_T = {}\nkappa_MHz = {}\nB_unit_mT = {}\ntau_unit_ns = {}\n",
            self.gamma_n, self.gamma_e, self.kappa, self.b_unit, self.tau_unit
        )
    }

    /// Dimensionless factor multiplying `X̂₀, Ŷ₀, Ẑ₀` in the unit system.
    pub fn field_scale(&self) -> f64 {
        (self.b_unit * 1e-3) * (self.gamma_n + self.gamma_e) * 1e6 * (self.tau_unit * 1e-9)
    }

    /// Dimensionless factor multiplying `K̂` in the unit system.
    pub fn coupling_scale(&self) -> f64 {
        self.kappa * 1e6 * (self.tau_unit * 1e-9)
    }

    /// Period of `exp(K̂_U t)` in time units.
    pub fn period_units(&self) -> f64 {
        4.0 * PI / self.coupling_scale()
    }

    pub fn units_to_ns(&self, t: f64) -> f64 {
        t * self.tau_unit
    }

    pub fn units_to_mt(&self, b: f64) -> f64 {
        b * self.b_unit
    }
}

/// `X̂₀, Ŷ₀, Ẑ₀, K̂` and their unit-scaled versions.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    pub constants: PhysicalConstants,
    pub x0: CMatrix,
    pub y0: CMatrix,
    pub z0: CMatrix,
    pub k: CMatrix,
    pub xu: CMatrix,
    pub yu: CMatrix,
    pub zu: CMatrix,
    pub ku: CMatrix,
}

/// `K̂ = (i/2)(i⊗i + j⊗j + k⊗k)`.
pub fn k_hat() -> CMatrix {
    let [_, qi, qj, qk] = quaternion_units();
    (kron(&qi, &qi) + kron(&qj, &qj) + kron(&qk, &qk)) * c64(0.0, 0.5)
}

impl GeneratorSet {
    pub fn new(constants: PhysicalConstants) -> Result<Self> {
        constants.validate()?;
        let [one, qi, qj, qk] = quaternion_units();
        let (gn, ge) = (constants.gamma_n, constants.gamma_e);
        let s = c64(1.0 / (gn + ge), 0.0);
        let x0 = (kron(&qi, &one) * c64(-gn, 0.0) + kron(&one, &qi) * c64(ge, 0.0)) * s;
        let y0 = (kron(&qj, &one) * c64(gn, 0.0) - kron(&one, &qj) * c64(ge, 0.0)) * s;
        let z0 = (kron(&qk, &one) * c64(-gn, 0.0) + kron(&one, &qk) * c64(ge, 0.0)) * s;
        let k = k_hat();
        let f = c64(constants.field_scale(), 0.0);
        let kappa_u = c64(constants.coupling_scale(), 0.0);
        Ok(Self {
            xu: &x0 * f,
            yu: &y0 * f,
            zu: &z0 * f,
            ku: &k * kappa_u,
            x0,
            y0,
            z0,
            k,
            constants,
        })
    }

    pub fn defaults() -> Self {
        Self::new(PhysicalConstants::default()).expect("default constants are valid")
    }

    /// `Bx X̂_U + By Ŷ_U + Bz Ẑ_U + K̂_U`, the per-unit-time generator of a pulse.
    pub fn pulse_matrix(&self, field: [f64; 3]) -> CMatrix {
        &self.xu * c64(field[0], 0.0)
            + &self.yu * c64(field[1], 0.0)
            + &self.zu * c64(field[2], 0.0)
            + &self.ku
    }

    /// `(Bx X̂_U + By Ŷ_U + Bz Ẑ_U + K̂_U)·τ`.
    ///
    /// Fields beyond [`FIELD_CAP_UNITS`] are rejected unless `allow_over_cap`.
    pub fn field_generator(
        &self,
        field: [f64; 3],
        tau: f64,
        allow_over_cap: bool,
    ) -> Result<AlgebraElement> {
        if tau < 0.0 || !tau.is_finite() {
            return Err(Error::Validation(format!(
                "pulse duration {tau} must be non-negative"
            )));
        }
        if field.iter().any(|b| !b.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !allow_over_cap && field.iter().any(|b| b.abs() > FIELD_CAP_UNITS) {
            return Err(Error::Validation(format!(
                "field {field:?} exceeds the {} unit cap",
                FIELD_CAP_UNITS
            )));
        }
        AlgebraElement::new(self.pulse_matrix(field) * c64(tau, 0.0), "pulse")
    }

    pub fn generator(&self, label: impl Into<String>, field: [f64; 3]) -> Generator {
        Generator {
            label: label.into(),
            field,
            matrix: self.pulse_matrix(field),
        }
    }

    /// The idle generator `K̂_U` followed by a unit-field pulse for each
    /// direction letter (`x`, `y`, `z`) in `dirs`.
    pub fn direction_generators(&self, dirs: &str) -> Result<Vec<Generator>> {
        let mut out = vec![self.generator("idle", [0.0; 3])];
        for ch in dirs.chars() {
            let field = match ch.to_ascii_lowercase() {
                'x' => [1.0, 0.0, 0.0],
                'y' => [0.0, 1.0, 0.0],
                'z' => [0.0, 0.0, 1.0],
                other => return Err(Error::Validation(format!("unknown direction {other:?}"))),
            };
            if out.iter().any(|g| g.field == field) {
                return Err(Error::Validation(format!("direction {ch:?} given twice")));
            }
            out.push(self.generator(ch.to_ascii_lowercase().to_string(), field));
        }
        Ok(out)
    }

    /// Spectrum of `K̂` sorted by increasing imaginary part.
    pub fn k_spectrum(&self) -> Vec<Complex64> {
        k_spectrum()
    }
}

pub fn k_spectrum() -> Vec<Complex64> {
    // K̂ is skew-Hermitian, so -iK̂ is Hermitian with real eigenvalues.
    let h = k_hat() * c64(0.0, -1.0);
    let eig = h.symmetric_eigen();
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().map(|e| c64(0.0, e)).collect()
}

/// A normalised two-spin state `(z₁, z₂, z₃, z₄)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector(pub [Complex64; 4]);

impl StateVector {
    pub fn new(z: [Complex64; 4]) -> Result<Self> {
        let n: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::Validation(format!("state norm² is {n}, expected 1")));
        }
        Ok(Self(z))
    }

    /// Scale a nonzero vector to unit norm.
    pub fn normalized(z: [Complex64; 4]) -> Result<Self> {
        let n: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Validation("cannot normalise a zero state".into()));
        }
        Ok(Self(z.map(|c| c / n)))
    }

    pub fn ground() -> Self {
        Self([c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)])
    }

    /// `U ψ`, renormalised against rounding drift.
    pub fn evolve(&self, u: &CMatrix) -> Self {
        let mut out = [c64(0.0, 0.0); 4];
        for (r, slot) in out.iter_mut().enumerate() {
            *slot = (0..4).map(|c| u[(r, c)] * self.0[c]).sum();
        }
        let n: f64 = out.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        Self(out.map(|c| c / n))
    }
}

/// `2|z₁z₄ − z₂z₃|`.
pub fn entanglement_degree(psi: &StateVector) -> f64 {
    let [z1, z2, z3, z4] = psi.0;
    2.0 * (z1 * z4 - z2 * z3).norm()
}

/// Basis of the entanglement-preserving algebra:
/// `i·1⊗1, i⊗1, j⊗1, k⊗1, 1⊗i, 1⊗j, 1⊗k`.
pub fn preserver_basis() -> Vec<CMatrix> {
    let [one, qi, qj, qk] = quaternion_units();
    vec![
        kron(&one, &one) * c64(0.0, 1.0),
        kron(&qi, &one),
        kron(&qj, &one),
        kron(&qk, &one),
        kron(&one, &qi),
        kron(&one, &qj),
        kron(&one, &qk),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreserverTest {
    pub preserves: bool,
    pub phi0: f64,
    /// Residual of `HᵀQ + QH − iφ₀Q` with `Q = j⊗j`.
    pub q_residual: f64,
    /// Distance from `H` to its projection onto [`preserver_basis`].
    pub span_residual: f64,
}

/// Tests `HᵀQ + QH = iφ₀Q` (with fitted `φ₀`) and membership in the span of
/// [`preserver_basis`]. `preserves` requires both residuals within `tol`,
/// relative to `max(‖H‖, 1)`.
pub fn is_entanglement_preserver(h: &CMatrix, tol: f64) -> Result<PreserverTest> {
    if h.shape() != (4, 4) {
        return Err(Error::Dimension(format!(
            "expected 4x4, got {:?}",
            h.shape()
        )));
    }
    let [_, _, qj, _] = quaternion_units();
    let q = kron(&qj, &qj);
    let lhs = h.transpose() * &q + &q * h;
    let fit = (q.adjoint() * &lhs).trace() / (q.adjoint() * &q).trace();
    let phi0 = fit.im;
    let q_residual = fro_norm(&(lhs - &q * c64(0.0, phi0)));

    // The basis is orthogonal with norm² 4 under Re tr(A†B).
    let basis = preserver_basis();
    let mut proj = CMatrix::zeros(4, 4);
    for b in &basis {
        let c = (b.adjoint() * h).trace().re / 4.0;
        proj += b * c64(c, 0.0);
    }
    let span_residual = fro_norm(&(h - proj));
    let scale = fro_norm(h).max(1.0);
    Ok(PreserverTest {
        preserves: q_residual <= tol * scale && span_residual <= tol * scale,
        phi0,
        q_residual,
        span_residual,
    })
}
