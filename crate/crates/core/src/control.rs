//! The fifteen realizable control elements `Ĥ₁ … Ĥ₁₅`, their conditioning,
//! and a coordinate-wise hill climb over the 32 constants that shape them.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Generator, RealizableElement, Recipe, SpanProjector, Step};
use crate::error::{Error, Result};
use crate::matrix::{
    condition_number, independent_subset, is_skew_hermitian, is_traceless, CMatrix,
    ConditionReport, RMatrix, DEFAULT_INDEPENDENCE_TOL,
};
use crate::spin::{GeneratorSet, FIELD_CAP_UNITS};

macro_rules! control_params {
    ($($field:ident = $default:expr),* $(,)?) => {
        /// Field amplitudes `b, c` (units of `B_unit`) and durations `τ, ς`
        /// (units of `tau_unit`).
        #[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct ControlParams {
            $(pub $field: f64,)*
        }

        impl Default for ControlParams {
            fn default() -> Self {
                Self { $($field: $default,)* }
            }
        }

        impl ControlParams {
            pub const NAMES: &'static [&'static str] = &[$(stringify!($field)),*];

            pub fn to_vec(&self) -> Vec<f64> {
                vec![$(self.$field),*]
            }

            pub fn from_slice(v: &[f64]) -> Result<Self> {
                if v.len() != Self::NAMES.len() {
                    return Err(Error::Dimension(format!(
                        "expected {} constants, got {}",
                        Self::NAMES.len(),
                        v.len()
                    )));
                }
                let mut it = v.iter().copied();
                Ok(Self { $($field: it.next().unwrap(),)* })
            }
        }
    };
}

control_params! {
    b1 = 2.003, tau1 = 0.151,
    b2 = 1.5155, tau2 = 0.176,
    b3 = 1.958, tau3 = 0.118,
    tau4 = 1.109,
    b5 = 0.3015, tau5 = 1.021,
    b6 = 0.5195, tau6 = 0.910,
    tau7 = 0.215,
    b8 = 0.1925, tau8 = 0.931,
    b9 = 0.222, tau9 = 0.926,
    tau10 = 0.2005,
    b11 = -0.167, tau11 = 0.9825,
    b12 = 0.394, tau12 = 0.9255,
    b13 = 0.198, tau13 = 1.017, c13 = 0.178, sigma13 = 0.9855,
    b14 = 0.344, tau14 = 1.000, c14 = 0.166, sigma14 = 0.9845,
    b15 = 0.257, tau15 = 0.900, c15 = 0.190, sigma15 = 1.377,
}

impl ControlParams {
    /// True for the entries that are durations (`tau*`, `sigma*`).
    pub fn is_duration(index: usize) -> bool {
        let n = Self::NAMES[index];
        n.starts_with("tau") || n.starts_with("sigma")
    }

    pub fn validate(&self) -> Result<()> {
        for (i, v) in self.to_vec().into_iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Validation(format!(
                    "{} is not finite",
                    Self::NAMES[i]
                )));
            }
            if Self::is_duration(i) && v <= 0.0 {
                return Err(Error::Validation(format!(
                    "{} = {v} must be positive",
                    Self::NAMES[i]
                )));
            }
        }
        Ok(())
    }

    /// Names of field amplitudes exceeding the hardware cap.
    pub fn cap_violations(&self) -> Vec<String> {
        self.to_vec()
            .into_iter()
            .enumerate()
            .filter(|&(i, v)| !Self::is_duration(i) && v.abs() > FIELD_CAP_UNITS)
            .map(|(i, v)| format!("{} = {v}", Self::NAMES[i]))
            .collect()
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let p: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        p.validate()?;
        Ok(p)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    /// Fields uniform in `[−1, 1]`, durations uniform in `[0.1, 1.5]`.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..Self::NAMES.len())
            .map(|i| {
                if Self::is_duration(i) {
                    rng.random_range(0.1..1.5)
                } else {
                    rng.random_range(-1.0..1.0)
                }
            })
            .collect();
        Self::from_slice(&v).expect("length matches")
    }
}

/// Realizable basis `Ĥ₁ … Ĥ₁₅` with its conditioning.
#[derive(Debug, Clone)]
pub struct ControlBasis {
    pub params: ControlParams,
    pub generators: GeneratorSet,
    pub catalog: Vec<Generator>,
    pub elements: Vec<RealizableElement>,
    /// 15×16 entry-layout coordinates, one row per element.
    pub stacked_coords: RMatrix,
    pub condition: ConditionReport,
    projector: SpanProjector,
}

struct CatalogBuilder<'a> {
    gs: &'a GeneratorSet,
    catalog: Vec<Generator>,
}

impl CatalogBuilder<'_> {
    fn pulse(&mut self, label: &str, field: [f64; 3]) -> usize {
        if let Some(i) = self.catalog.iter().position(|g| g.field == field) {
            return i;
        }
        self.catalog.push(self.gs.generator(label, field));
        self.catalog.len() - 1
    }
}

fn recipes(p: &ControlParams, gs: &GeneratorSet) -> (Vec<Generator>, Vec<Recipe>) {
    let mut cb = CatalogBuilder {
        gs,
        catalog: Vec::new(),
    };
    let idle = cb.pulse("idle", [0.0; 3]);
    let x = |b: f64| [b, 0.0, 0.0];
    let y = |b: f64| [0.0, b, 0.0];
    let z = |b: f64| [0.0, 0.0, b];
    let step = |generator, duration| Step {
        generator,
        duration,
    };

    let g1 = cb.pulse("b1 X", x(p.b1));
    let g2 = cb.pulse("b2 Y", y(p.b2));
    let g3 = cb.pulse("b3 Z", z(p.b3));
    let h1 = Recipe::core(g1, p.tau1);
    let h2 = Recipe::core(g2, p.tau2);
    let h3 = Recipe::core(g3, p.tau3);
    let h4 = Recipe::core(idle, p.tau4);

    let mut conj = |label: &str, field, dur, base: &Recipe| {
        let g = cb.pulse(label, field);
        base.conjugated(step(g, dur))
    };
    let h5 = conj("b5 X", x(p.b5), p.tau5, &h4);
    let h6 = conj("b6 X", x(p.b6), p.tau6, &h4);
    let h7 = h1.conjugated(step(idle, p.tau7));
    let h8 = conj("b8 Y", y(p.b8), p.tau8, &h4);
    let h9 = conj("b9 Y", y(p.b9), p.tau9, &h4);
    let h10 = h2.conjugated(step(idle, p.tau10));
    let h11 = conj("b11 Z", z(p.b11), p.tau11, &h4);
    let h12 = conj("b12 Z", z(p.b12), p.tau12, &h4);
    let inner13 = conj("c13 Y", y(p.c13), p.sigma13, &h4);
    let h13 = conj("b13 X", x(p.b13), p.tau13, &inner13);
    let inner14 = conj("c14 Z", z(p.c14), p.sigma14, &h4);
    let h14 = conj("b14 Y", y(p.b14), p.tau14, &inner14);
    let inner15 = conj("c15 X", x(p.c15), p.sigma15, &h4);
    let h15 = conj("b15 Z", z(p.b15), p.tau15, &inner15);

    (
        cb.catalog,
        vec![
            h1, h2, h3, h4, h5, h6, h7, h8, h9, h10, h11, h12, h13, h14, h15,
        ],
    )
}

/// Builds `Ĥ₁ … Ĥ₁₅`; fails with `DegenerateBasis` below rank 15.
pub fn build_control_basis(params: &ControlParams, gs: &GeneratorSet) -> Result<ControlBasis> {
    params.validate()?;
    let (catalog, recipes) = recipes(params, gs);
    let elements: Vec<RealizableElement> = recipes
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            RealizableElement::from_recipe(r, &catalog, format!("H{}", i + 1), "control family")
        })
        .collect::<Result<_>>()?;
    let coords: Vec<_> = elements
        .iter()
        .map(|e| e.element.coords().clone())
        .collect();
    let condition = condition_number(&coords)?;
    let rank = independent_subset(&coords, DEFAULT_INDEPENDENCE_TOL).len();
    if rank < elements.len() || condition.sigma_min == 0.0 {
        return Err(Error::DegenerateBasis {
            rank,
            expected: elements.len(),
            sigma_min: condition.sigma_min,
        });
    }
    let mats: Vec<CMatrix> = elements
        .iter()
        .map(|e| e.element.matrix().clone())
        .collect();
    let projector = SpanProjector::new(&mats)?;
    Ok(ControlBasis {
        params: *params,
        generators: gs.clone(),
        catalog,
        stacked_coords: crate::matrix::stack_rows(&coords)?,
        elements,
        condition,
        projector,
    })
}

/// Condition number of the family, `+∞` when it is degenerate or invalid.
pub fn objective(params: &ControlParams, gs: &GeneratorSet) -> f64 {
    match build_control_basis(params, gs) {
        Ok(b) => b.condition.ratio,
        Err(_) => f64::INFINITY,
    }
}

impl ControlBasis {
    pub fn matrices(&self) -> Vec<CMatrix> {
        self.elements
            .iter()
            .map(|e| e.element.matrix().clone())
            .collect()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Largest recipe reconstruction residual over the family.
    pub fn soundness_residual(&self) -> Result<f64> {
        self.elements
            .iter()
            .map(|e| e.soundness_residual(&self.catalog))
            .try_fold(0.0f64, |acc, r| Ok(acc.max(r?)))
    }
}

/// Components `x` with `Σ xⱼ Ĥⱼ = X` and the fit residual.
///
/// Fails with `NotInSpan` when the residual exceeds `1e-10·max(‖X‖, 1)`.
pub fn components_in_basis(x: &CMatrix, basis: &ControlBasis) -> Result<(Vec<f64>, f64)> {
    if x.shape() != (4, 4) {
        return Err(Error::Dimension(format!(
            "expected 4x4, got {:?}",
            x.shape()
        )));
    }
    if !is_skew_hermitian(x, 1e-10) || !is_traceless(x, 1e-10) {
        return Err(Error::Validation(
            "target is not traceless skew-Hermitian".into(),
        ));
    }
    let (c, residual) = basis.projector.coords(x)?;
    let scale = crate::matrix::fro_norm(x).max(1.0);
    if residual > 1e-10 * scale {
        return Err(Error::NotInSpan { residual });
    }
    Ok((c.iter().copied().collect(), residual))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSchedule {
    pub initial_step: f64,
    /// Minimum objective decrease for a move to count as an improvement.
    pub min_improvement: f64,
}

impl Default for StepSchedule {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            min_improvement: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub initial_cond: f64,
    pub final_cond: f64,
    pub passes: usize,
    pub evaluations: usize,
    pub restarts: usize,
}

/// Coordinate-wise hill climb on the condition number.
///
/// Each coordinate tries `±step`; an accepted move keeps the step, a rejected
/// coordinate halves it. Passes repeat until one makes no improvement larger
/// than `min_improvement` or `max_passes` is reached. A degenerate start is
/// replaced by seeded random restarts.
pub fn optimize_params(
    initial: &ControlParams,
    gs: &GeneratorSet,
    max_passes: usize,
    schedule: StepSchedule,
    seed: u64,
    max_restarts: usize,
) -> Result<(ControlParams, OptimizeReport)> {
    initial.validate()?;
    let mut evaluations = 1;
    let mut restarts = 0;
    let mut p = *initial;
    let mut best = objective(&p, gs);
    while !best.is_finite() {
        if restarts >= max_restarts {
            return Err(Error::DegenerateBasis {
                rank: 0,
                expected: 15,
                sigma_min: 0.0,
            });
        }
        p = ControlParams::random(seed.wrapping_add(restarts as u64));
        restarts += 1;
        best = objective(&p, gs);
        evaluations += 1;
    }
    let initial_cond = best;
    let mut v = p.to_vec();
    let mut steps = vec![schedule.initial_step; v.len()];
    let mut passes = 0;
    while passes < max_passes {
        passes += 1;
        let mut improved = false;
        for i in 0..v.len() {
            let mut accepted = false;
            for dir in [1.0, -1.0] {
                let mut cand = v.clone();
                cand[i] += dir * steps[i];
                if ControlParams::is_duration(i) && cand[i] <= 0.0 {
                    continue;
                }
                let val = objective(&ControlParams::from_slice(&cand)?, gs);
                evaluations += 1;
                if val < best - schedule.min_improvement {
                    v = cand;
                    best = val;
                    accepted = true;
                    break;
                }
            }
            if accepted {
                improved = true;
            } else {
                steps[i] *= 0.5;
            }
        }
        if !improved {
            break;
        }
    }
    Ok((
        ControlParams::from_slice(&v)?,
        OptimizeReport {
            initial_cond,
            final_cond: best,
            passes,
            evaluations,
            restarts,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c64, fro_norm};

    #[test]
    fn names_and_round_trip() {
        let p = ControlParams::default();
        assert_eq!(ControlParams::NAMES.len(), 33);
        assert_eq!(ControlParams::from_slice(&p.to_vec()).unwrap(), p);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<ControlParams>(&json).unwrap(), p);
        assert!(serde_json::from_str::<ControlParams>("{\"b1\": 1.0}").is_err());
    }

    #[test]
    fn default_constants_flag_cap_violations() {
        let v = ControlParams::default().cap_violations();
        assert_eq!(v.len(), 3, "{v:?}");
    }

    #[test]
    fn rejects_non_positive_duration() {
        let p = ControlParams {
            tau4: 0.0,
            ..Default::default()
        };
        assert!(build_control_basis(&p, &GeneratorSet::defaults()).is_err());
    }

    #[test]
    fn core_elements_match_pulses() {
        let gs = GeneratorSet::defaults();
        let b = build_control_basis(&ControlParams::default(), &gs).unwrap();
        let h1 = (&gs.xu * c64(2.003, 0.0) + &gs.ku) * c64(0.151, 0.0);
        assert!(fro_norm(&(b.elements[0].element.matrix() - h1)) < 1e-13);
        let h4 = &gs.ku * c64(1.109, 0.0);
        assert!(fro_norm(&(b.elements[3].element.matrix() - h4)) < 1e-13);
        assert!(b.soundness_residual().unwrap() < 1e-10);
    }

    #[test]
    fn zero_conjugators_collapse_the_family() {
        let mut p = ControlParams::default();
        for (i, name) in ControlParams::NAMES.iter().enumerate() {
            let conj = [
                "tau5", "tau6", "tau7", "tau8", "tau9", "tau10", "tau11", "tau12",
            ];
            if conj.contains(name) {
                let mut v = p.to_vec();
                v[i] = 1e-12;
                p = ControlParams::from_slice(&v).unwrap();
            }
        }
        assert!(matches!(
            build_control_basis(&p, &GeneratorSet::defaults()),
            Err(Error::DegenerateBasis { .. })
        ));
    }

    #[test]
    fn component_of_basis_element_is_unit_vector() {
        let b = build_control_basis(&ControlParams::default(), &GeneratorSet::defaults()).unwrap();
        let (x, _) = components_in_basis(b.elements[2].element.matrix(), &b).unwrap();
        for (j, v) in x.iter().enumerate() {
            let want = if j == 2 { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-10);
        }
    }
}
