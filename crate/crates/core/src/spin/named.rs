//! The fifteen named algebra members, their bracket table, the two-generator
//! identity and the Gell-Mann basis of the equal-ratio case.

use nalgebra::DMatrix;

use super::{k_hat, PhysicalConstants};
use crate::algebra::SpanProjector;
use crate::error::{Error, Result};
use crate::matrix::{c64, commutator, fro_norm, kron, quaternion_units, CMatrix};

/// Named matrices built from raw `γₙ, γₑ, κ` (not unit-scaled).
#[derive(Debug, Clone)]
pub struct NamedBasis15 {
    pub kappa: f64,
    pub k: CMatrix,
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: CMatrix,
    pub kx: CMatrix,
    pub ky: CMatrix,
    pub kz: CMatrix,
    pub kxx: CMatrix,
    pub kyy: CMatrix,
    pub kzz: CMatrix,
    pub lx: CMatrix,
    pub ly: CMatrix,
    pub lz: CMatrix,
    pub kxy: CMatrix,
    pub kyz: CMatrix,
    pub kzx: CMatrix,
    pub xkk: CMatrix,
    pub ykk: CMatrix,
    pub zkk: CMatrix,
}

pub const L_VARIANT_LABELS: [&str; 15] = [
    "X", "Y", "Z", "K_X", "K_Y", "K_Z", "K_XX", "K_YY", "K_ZZ", "L_X", "L_Y", "L_Z", "K_XY",
    "K_YZ", "K_ZX",
];

impl NamedBasis15 {
    pub fn new(c: &PhysicalConstants) -> Result<Self> {
        c.validate()?;
        let [one, qi, qj, qk] = quaternion_units();
        let (gn, ge, kap) = (c.gamma_n, c.gamma_e, c.kappa);
        let s = gn + ge;
        let r = |x: f64| c64(x, 0.0);
        let im = |x: f64| c64(0.0, x);
        let kr = kron;

        let k = k_hat();
        let x0 = (kr(&qi, &one) * r(-gn) + kr(&one, &qi) * r(ge)) * r(1.0 / s);
        let y0 = (kr(&qj, &one) * r(gn) - kr(&one, &qj) * r(ge)) * r(1.0 / s);
        let z0 = (kr(&qk, &one) * r(-gn) + kr(&one, &qk) * r(ge)) * r(1.0 / s);
        let kk = &k * r(kap);

        Ok(Self {
            kappa: kap,
            x: &x0 + &kk,
            y: &y0 + &kk,
            z: &z0 + &kk,
            kx: (kr(&qk, &qj) - kr(&qj, &qk)) * im(0.5),
            ky: (kr(&qk, &qi) - kr(&qi, &qk)) * im(0.5),
            kz: (kr(&qj, &qi) - kr(&qi, &qj)) * im(0.5),
            kxx: (kr(&qj, &qj) + kr(&qk, &qk)) * im(-0.5),
            kyy: (kr(&qi, &qi) + kr(&qk, &qk)) * im(-0.5),
            kzz: (kr(&qi, &qi) + kr(&qj, &qj)) * im(-0.5),
            lx: (kr(&qi, &one) + kr(&one, &qi)) * r(-0.25),
            ly: (kr(&qj, &one) + kr(&one, &qj)) * r(0.25),
            lz: (kr(&qk, &one) + kr(&one, &qk)) * r(-0.25),
            kxy: (kr(&qi, &qj) * r(gn) + kr(&qj, &qi) * r(ge)) * im(-0.5 / s)
                - (kr(&qi, &one) - kr(&one, &qi)) * r(0.5 * kap),
            kyz: (kr(&qj, &qk) * r(gn) + kr(&qk, &qj) * r(ge)) * im(-0.5 / s)
                - (kr(&one, &qj) - kr(&qj, &one)) * r(0.5 * kap),
            kzx: (kr(&qk, &qi) * r(gn) + kr(&qi, &qk) * r(ge)) * im(0.5 / s)
                - (kr(&qk, &one) - kr(&one, &qk)) * r(0.5 * kap),
            xkk: (kr(&qi, &one) - kr(&one, &qi)) * r(0.5),
            ykk: (kr(&one, &qj) - kr(&qj, &one)) * r(0.5),
            zkk: (kr(&qk, &one) - kr(&one, &qk)) * r(0.5),
            k,
        })
    }

    /// `X̂ … K̂_ZX` with the `L̂` triple in positions 10–12.
    pub fn l_variant(&self) -> Vec<CMatrix> {
        vec![
            self.x.clone(),
            self.y.clone(),
            self.z.clone(),
            self.kx.clone(),
            self.ky.clone(),
            self.kz.clone(),
            self.kxx.clone(),
            self.kyy.clone(),
            self.kzz.clone(),
            self.lx.clone(),
            self.ly.clone(),
            self.lz.clone(),
            self.kxy.clone(),
            self.kyz.clone(),
            self.kzx.clone(),
        ]
    }

    /// As [`Self::l_variant`] with `X̂_KK, Ŷ_KK, Ẑ_KK` replacing the `L̂` triple.
    pub fn kk_variant(&self) -> Vec<CMatrix> {
        let mut v = self.l_variant();
        v[9] = self.xkk.clone();
        v[10] = self.ykk.clone();
        v[11] = self.zkk.clone();
        v
    }
}

#[derive(Debug, Clone)]
pub struct BracketRow {
    pub name: &'static str,
    /// Largest entrywise modulus of `table value − named matrix`.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct BracketReport {
    pub rows: Vec<BracketRow>,
    pub max_residual: f64,
    pub violated: Vec<&'static str>,
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Evaluates the 18 bracket identities; rows above `tol` are listed in
/// `violated`.
pub fn verify_bracket_table(b: &NamedBasis15, tol: f64) -> BracketReport {
    let h = |x: &CMatrix, y: &CMatrix| commutator(x, y) * c64(0.5, 0.0);
    let kap = c64(b.kappa, 0.0);
    let table: Vec<(&'static str, CMatrix, &CMatrix)> = vec![
        ("K_X = [K,X]/2", h(&b.k, &b.x), &b.kx),
        ("X_KK = [K,K_X]/2", h(&b.k, &b.kx), &b.xkk),
        (
            "K_XX = [K_X,X]/2 + kX_KK",
            h(&b.kx, &b.x) + &b.xkk * kap,
            &b.kxx,
        ),
        ("K_Y = [K,Y]/2", h(&b.k, &b.y), &b.ky),
        ("Y_KK = [K,K_Y]/2", h(&b.k, &b.ky), &b.ykk),
        (
            "K_YY = [K_Y,Y]/2 + kY_KK",
            h(&b.ky, &b.y) + &b.ykk * kap,
            &b.kyy,
        ),
        ("K_Z = [K,Z]/2", h(&b.k, &b.z), &b.kz),
        ("Z_KK = [K,K_Z]/2", h(&b.k, &b.kz), &b.zkk),
        (
            "K_ZZ = [K_Z,Z]/2 + kZ_KK",
            h(&b.kz, &b.z) + &b.zkk * kap,
            &b.kzz,
        ),
        ("K_XY = [K_X,Y]/2", h(&b.kx, &b.y), &b.kxy),
        ("K_YZ = [K_Y,Z]/2", h(&b.ky, &b.z), &b.kyz),
        ("K_ZX = [K_Z,X]/2", h(&b.kz, &b.x), &b.kzx),
        ("L_Z = [K_X,K_Y]/2", h(&b.kx, &b.ky), &b.lz),
        ("L_X = [K_Y,K_Z]/2", h(&b.ky, &b.kz), &b.lx),
        ("L_Y = [K_Z,K_X]/2", h(&b.kz, &b.kx), &b.ly),
        ("K_X = -[K,X_KK]/2", -h(&b.k, &b.xkk), &b.kx),
        ("K_Y = -[K,Y_KK]/2", -h(&b.k, &b.ykk), &b.ky),
        ("K_Z = -[K,Z_KK]/2", -h(&b.k, &b.zkk), &b.kz),
    ];
    let rows: Vec<BracketRow> = table
        .into_iter()
        .map(|(name, lhs, rhs)| BracketRow {
            name,
            residual: max_abs(&(lhs - rhs)),
        })
        .collect();
    let max_residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let violated = rows
        .iter()
        .filter(|r| !(r.residual <= tol))
        .map(|r| r.name)
        .collect();
    BracketReport {
        rows,
        max_residual,
        violated,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TwoGeneratorReport {
    /// Frobenius norm of left side minus `κ(γₙ−γₑ)/(γₙ+γₑ)·Ẑ`.
    pub residual: f64,
    /// Frobenius norm of that right side.
    pub rhs_norm: f64,
    pub z_coefficient: f64,
}

/// `[K̂_XY, X̂] + κd²[K̂_X, K̂_Y] + κ²dK̂ + 2κ²K̂_X + 2γₑγₙ/(γₙ+γₑ)²·K̂_Y`
/// compared with `κdẐ`, where `d = (γₙ−γₑ)/(γₙ+γₑ)`.
pub fn two_generator_identity_residual(c: &PhysicalConstants) -> Result<TwoGeneratorReport> {
    let b = NamedBasis15::new(c)?;
    let (gn, ge, kap) = (c.gamma_n, c.gamma_e, c.kappa);
    let s = gn + ge;
    let d = (gn - ge) / s;
    let r = |x: f64| c64(x, 0.0);
    let lhs = commutator(&b.kxy, &b.x)
        + commutator(&b.kx, &b.ky) * r(kap * d * d)
        + &b.k * r(kap * kap * d)
        + &b.kx * r(2.0 * kap * kap)
        + &b.ky * r(2.0 * ge * gn / (s * s));
    let rhs = &b.z * r(kap * d);
    Ok(TwoGeneratorReport {
        residual: fro_norm(&(lhs - &rhs)),
        rhs_norm: fro_norm(&rhs),
        z_coefficient: kap * d,
    })
}

/// `λ̂₁ … λ̂₈`; requires `γₙ = γₑ ≠ 0`.
pub fn gell_mann_basis(c: &PhysicalConstants) -> Result<Vec<CMatrix>> {
    let (gn, ge) = (c.gamma_n, c.gamma_e);
    if gn == 0.0 || (gn - ge).abs() > 1e-12 * gn.abs().max(ge.abs()) {
        return Err(Error::Domain(format!(
            "Gell-Mann basis needs gamma_n = gamma_e != 0 (got {gn}, {ge})"
        )));
    }
    let b = NamedBasis15::new(c)?;
    let kap = b.kappa;
    let r = |x: f64| c64(x, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let xk = &b.x - &b.k * r(kap);
    let yk = &b.y - &b.k * r(kap);
    Ok(vec![
        &b.kxx - &b.kyy,
        (&b.kxy - &b.x * r(kap) + &b.k * r(kap * kap)) * r(2.0),
        &b.lz * r(2.0),
        (&xk + &b.ky) * r(h),
        (&yk - &b.kx) * r(h),
        (&xk - &b.ky) * r(h),
        (&yk + &b.kx) * r(-h),
        (&b.kxx + &b.kyy) * r(1.0 / 3f64.sqrt()),
    ])
}

/// `Tr(ad λⱼ ad λₖ)` with `ad` taken on the span of the given elements.
///
/// Fails with `NotInSpan` when the span is not bracket-closed.
pub fn killing_form(elements: &[CMatrix]) -> Result<DMatrix<f64>> {
    let proj = SpanProjector::new(elements)?;
    let n = elements.len();
    let scale = elements.iter().map(fro_norm).fold(0.0, f64::max).max(1.0);
    let mut ads = Vec::with_capacity(n);
    for a in elements {
        let mut m = DMatrix::<f64>::zeros(n, n);
        for (col, bm) in elements.iter().enumerate() {
            let (coords, residual) = proj.coords(&commutator(a, bm))?;
            if residual > 1e-9 * scale * scale {
                return Err(Error::NotInSpan { residual });
            }
            m.set_column(col, &coords);
        }
        ads.push(m);
    }
    Ok(DMatrix::from_fn(n, n, |j, k| (&ads[j] * &ads[k]).trace()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{is_skew_hermitian, is_traceless};

    fn constants(gn: f64, ge: f64, kap: f64) -> PhysicalConstants {
        PhysicalConstants {
            gamma_n: gn,
            gamma_e: ge,
            kappa: kap,
            ..Default::default()
        }
    }

    #[test]
    fn named_matrices_are_traceless_skew() {
        let b = NamedBasis15::new(&PhysicalConstants::default()).unwrap();
        for m in b.l_variant().iter().chain(b.kk_variant().iter()) {
            assert!(is_skew_hermitian(m, 1e-14));
            assert!(is_traceless(m, 1e-14));
        }
    }

    #[test]
    fn bracket_table_holds_at_defaults_and_equal_ratios() {
        for c in [constants(17.23, 27_970.0, 58.765), constants(3.0, 3.0, 0.4)] {
            let r = verify_bracket_table(&NamedBasis15::new(&c).unwrap(), 1e-12);
            assert_eq!(r.rows.len(), 18);
            assert!(r.violated.is_empty(), "{:?}", r.violated);
        }
    }

    #[test]
    fn perturbed_row_is_flagged() {
        let mut b = NamedBasis15::new(&PhysicalConstants::default()).unwrap();
        b.kx[(0, 1)] += c64(1e-6, 0.0);
        let r = verify_bracket_table(&b, 1e-12);
        assert!(r.violated.contains(&"K_X = [K,X]/2"));
        assert!(r.max_residual >= 1e-6 * 0.99);
    }

    #[test]
    fn kk_sum_relation() {
        // K_XX + K_YY + K_ZZ = -2K.
        let b = NamedBasis15::new(&PhysicalConstants::default()).unwrap();
        let s = &b.kxx + &b.kyy + &b.kzz + &b.k * c64(2.0, 0.0);
        assert!(fro_norm(&s) < 1e-15);
    }

    #[test]
    fn two_generator_identity_holds() {
        let rep = two_generator_identity_residual(&PhysicalConstants::default()).unwrap();
        assert!(rep.residual <= 1e-9 * rep.rhs_norm, "{rep:?}");
        let eq = two_generator_identity_residual(&constants(2.0, 2.0, 0.7)).unwrap();
        assert_eq!(eq.z_coefficient, 0.0);
        assert!(eq.residual < 1e-12);
    }

    #[test]
    fn gell_mann_requires_equal_ratios() {
        assert!(matches!(
            gell_mann_basis(&PhysicalConstants::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn killing_form_is_minus_twelve() {
        let lam = gell_mann_basis(&constants(1.0, 1.0, 1.3)).unwrap();
        let kf = killing_form(&lam).unwrap();
        for j in 0..8 {
            for k in 0..8 {
                let want = if j == k { -12.0 } else { 0.0 };
                assert!(
                    (kf[(j, k)] - want).abs() < 1e-8,
                    "({j},{k}) = {}",
                    kf[(j, k)]
                );
            }
        }
    }
}
