//! Target unitary → pulse schedule.
//!
//! The pipeline is: strip the global phase, take the traceless logarithm,
//! expand it over the control family, solve for second-kind coordinates
//! (splitting into `n` equal roots when needed), and expand every factor
//! `exp(hⱼĤⱼ)` into pulses using the element's recipe.
//!
//! Stages are stored in chronological order: the first stage is applied
//! first, so the net unitary is `S_k ··· S_2 S_1`.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{Generator, RealizableElement};
use crate::control::{components_in_basis, ControlBasis};
use crate::error::{Error, Result};
use crate::matrix::{c64, identity, is_unitary, mat_exp, mat_log_unitary, rms_distance, CMatrix};
use crate::spin::{
    entanglement_degree, GeneratorSet, PhysicalConstants, StateVector, FIELD_CAP_UNITS,
};
use crate::wei_norman::{find_coordinates, WeiNormanProblem, WeiNormanSolution, WnOptions};

/// Coordinates at or below this magnitude are dropped from the expansion.
const COORD_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageKind {
    Field,
    Idle,
}

/// A stage in internal units (`B_unit`, `tau_unit`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub field: [f64; 3],
    pub duration: f64,
}

impl Stage {
    pub fn kind(&self) -> StageKind {
        if self.field == [0.0; 3] {
            StageKind::Idle
        } else {
            StageKind::Field
        }
    }

    pub fn matrix(&self, gs: &GeneratorSet) -> CMatrix {
        gs.pulse_matrix(self.field) * c64(self.duration, 0.0)
    }

    pub fn unitary(&self, gs: &GeneratorSet) -> Result<CMatrix> {
        mat_exp(&self.matrix(gs))
    }
}

/// A stage in hardware units, as written to schedule files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseStage {
    #[serde(rename = "Bx_mT")]
    pub bx_mt: f64,
    #[serde(rename = "By_mT")]
    pub by_mt: f64,
    #[serde(rename = "Bz_mT")]
    pub bz_mt: f64,
    pub duration_ns: f64,
    pub kind: StageKind,
}

impl PulseStage {
    pub fn from_stage(s: &Stage, c: &PhysicalConstants) -> Self {
        Self {
            bx_mt: c.units_to_mt(s.field[0]),
            by_mt: c.units_to_mt(s.field[1]),
            bz_mt: c.units_to_mt(s.field[2]),
            duration_ns: c.units_to_ns(s.duration),
            kind: s.kind(),
        }
    }

    pub fn to_stage(&self, c: &PhysicalConstants) -> Stage {
        Stage {
            field: [
                self.bx_mt / c.b_unit,
                self.by_mt / c.b_unit,
                self.bz_mt / c.b_unit,
            ],
            duration: self.duration_ns / c.tau_unit,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PulseSchedule {
    pub n: usize,
    pub per_cycle: usize,
    pub stages: Vec<PulseStage>,
    pub rms_error: f64,
    pub total_time_ns: f64,
    pub cap_violations: Vec<String>,
    /// Field stages left with negative duration.
    pub signed_stages: Vec<usize>,
    /// Stages for which the forward-time search failed.
    pub unrealizable: Vec<usize>,
    pub global_phase: f64,
    /// Row-major `[re, im]` pairs of the SU(4) target.
    pub target: Vec<[f64; 2]>,
    pub constants: PhysicalConstants,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
}

impl PulseSchedule {
    pub fn target_matrix(&self) -> Result<CMatrix> {
        if self.target.len() != 16 {
            return Err(Error::Validation(format!(
                "target has {} entries, expected 16",
                self.target.len()
            )));
        }
        let v: Vec<Complex64> = self.target.iter().map(|[re, im]| c64(*re, *im)).collect();
        Ok(CMatrix::from_row_slice(4, 4, &v))
    }

    pub fn internal_stages(&self) -> Vec<Stage> {
        self.stages
            .iter()
            .map(|s| s.to_stage(&self.constants))
            .collect()
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let s: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        s.constants.validate()?;
        Ok(s)
    }

    /// Errors with `Unrealizable` when the forward search left any stage
    /// unresolved.
    pub fn check_realizable(&self) -> Result<()> {
        match self.unrealizable.first() {
            Some(&index) => Err(Error::Unrealizable {
                index,
                best_rms: f64::NAN,
            }),
            None => Ok(()),
        }
    }
}

fn matrix_entries(m: &CMatrix) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            out.push([m[(r, c)].re, m[(r, c)].im]);
        }
    }
    out
}

/// Stages realising `exp(h·element)`, chronological.
///
/// For `Ĥ = Ad(e^{c₁})···Ad(e^{cₘ})(core)` this is
/// `−c₁, …, −cₘ, h·core, cₘ, …, c₁`.
pub fn expand_recipe(
    h: f64,
    element: &RealizableElement,
    catalog: &[Generator],
) -> Result<Vec<Stage>> {
    let stage = |g: usize, d: f64| -> Result<Stage> {
        let gen = catalog
            .get(g)
            .ok_or_else(|| Error::Validation(format!("unknown generator {g}")))?;
        Ok(Stage {
            field: gen.field,
            duration: d,
        })
    };
    let r = &element.recipe;
    let mut out = Vec::with_capacity(2 * r.conjugators.len() + 1);
    for c in &r.conjugators {
        out.push(stage(c.generator, -c.duration)?);
    }
    out.push(stage(r.core.generator, h * r.core.duration)?);
    for c in r.conjugators.iter().rev() {
        out.push(stage(c.generator, c.duration)?);
    }
    Ok(out)
}

/// Net unitary of chronological stages.
pub fn stage_product(stages: &[Stage], gs: &GeneratorSet) -> Result<CMatrix> {
    let mut u = identity(4);
    for s in stages {
        u = s.unitary(gs)? * u;
    }
    Ok(u)
}

/// Merge neighbours with identical fields and drop zero-length stages.
pub fn merge_stages(stages: &[Stage]) -> Vec<Stage> {
    let mut out: Vec<Stage> = Vec::with_capacity(stages.len());
    for s in stages {
        match out.last_mut() {
            Some(last) if last.field == s.field => last.duration += s.duration,
            _ => out.push(*s),
        }
    }
    out.retain(|s| s.duration != 0.0);
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub enum RealizabilityMode {
    /// Exact idle rewrite; negative field stages stay signed and flagged.
    #[default]
    Signed,
    /// Exact idle rewrite plus a forward-time search for field stages.
    Search { tol: f64, max_horizon: f64 },
}

#[derive(Debug, Clone, Default)]
pub struct RealizabilityOutcome {
    pub stages: Vec<Stage>,
    pub signed: Vec<usize>,
    pub unrealizable: Vec<(usize, f64)>,
}

/// `m·τ_p − |t|` with the smallest `m` making it positive.
pub fn idle_forward_time(t: f64, period: f64) -> f64 {
    if t >= 0.0 {
        return t;
    }
    let m = (t.abs() / period).floor() + 1.0;
    m * period + t
}

/// Smallest `T > 0` found with `‖e^{AT} − e^{At}‖_rms ≤ tol` for `t < 0`.
///
/// Candidates are the times at which one eigenphase of `A` returns to its
/// value at `t`; each is checked on the full matrix.
pub fn forward_inverse_time(a: &CMatrix, t: f64, tol: f64, max_horizon: f64) -> Result<(f64, f64)> {
    let target = mat_exp(&(a * c64(t, 0.0)))?;
    let h = a * c64(0.0, -1.0);
    let h = (&h + h.adjoint()) * c64(0.5, 0.0);
    let freqs: Vec<f64> = h
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|w| w.abs())
        .collect();
    let mut candidates: Vec<f64> = Vec::new();
    for &w in &freqs {
        if w < 1e-12 {
            continue;
        }
        let period = 2.0 * PI / w;
        let mut m = 1.0;
        loop {
            let cand = m * period + t;
            if cand > max_horizon {
                break;
            }
            if cand > 0.0 {
                candidates.push(cand);
            }
            m += 1.0;
        }
    }
    candidates.sort_by(f64::total_cmp);
    let mut best = f64::INFINITY;
    for cand in candidates {
        let rms = rms_distance(&mat_exp(&(a * c64(cand, 0.0)))?, &target);
        if rms <= tol {
            return Ok((cand, rms));
        }
        best = best.min(rms);
    }
    Err(Error::Unrealizable {
        index: 0,
        best_rms: best,
    })
}

pub fn realizability_pass(
    stages: &[Stage],
    gs: &GeneratorSet,
    mode: RealizabilityMode,
) -> Result<RealizabilityOutcome> {
    let period = gs.constants.period_units();
    let mut out = RealizabilityOutcome {
        stages: Vec::with_capacity(stages.len()),
        ..Default::default()
    };
    for (i, s) in stages.iter().enumerate() {
        if s.duration >= 0.0 {
            out.stages.push(*s);
            continue;
        }
        match (s.kind(), mode) {
            (StageKind::Idle, _) => out.stages.push(Stage {
                duration: idle_forward_time(s.duration, period),
                ..*s
            }),
            (StageKind::Field, RealizabilityMode::Signed) => {
                out.signed.push(i);
                out.stages.push(*s);
            }
            (StageKind::Field, RealizabilityMode::Search { tol, max_horizon }) => {
                match forward_inverse_time(&gs.pulse_matrix(s.field), s.duration, tol, max_horizon)
                {
                    Ok((t, _)) => out.stages.push(Stage { duration: t, ..*s }),
                    Err(Error::Unrealizable { best_rms, .. }) => {
                        out.unrealizable.push((i, best_rms));
                        out.signed.push(i);
                        out.stages.push(*s);
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub wn: WnOptions,
    pub merge: bool,
    pub realizability: RealizabilityMode,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            wn: WnOptions::default(),
            merge: true,
            realizability: RealizabilityMode::Signed,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub schedule: PulseSchedule,
    pub stages: Vec<Stage>,
    /// Per-cycle stages before the realizability pass.
    pub cycle_signed: Vec<Stage>,
    pub su4_target: CMatrix,
    pub log: CMatrix,
    pub components: Vec<f64>,
    pub coordinates: Option<WeiNormanSolution>,
    /// Net unitary of the emitted stages.
    pub net: CMatrix,
}

/// `U = e^{iφ}V` with `det V = 1`, using the principal fourth root.
pub fn strip_global_phase(u: &CMatrix) -> Result<(CMatrix, f64)> {
    if u.shape() != (4, 4) {
        return Err(Error::Dimension(format!(
            "expected 4x4, got {:?}",
            u.shape()
        )));
    }
    if !is_unitary(u, 1e-9) {
        return Err(Error::Validation("target is not unitary".into()));
    }
    let phase = u.determinant().arg() / 4.0;
    Ok((u * Complex64::from_polar(1.0, -phase), phase))
}

/// rms distance to `target` minimised over the four SU(4) centre elements.
pub fn rms_up_to_centre(u: &CMatrix, target: &CMatrix) -> f64 {
    [c64(1.0, 0.0), c64(0.0, 1.0), c64(-1.0, 0.0), c64(0.0, -1.0)]
        .iter()
        .map(|z| rms_distance(u, &(target * *z)))
        .fold(f64::INFINITY, f64::min)
}

pub fn synthesize(
    target: &CMatrix,
    basis: &ControlBasis,
    opts: &SynthOptions,
) -> Result<Synthesis> {
    let (su4, global_phase) = strip_global_phase(target)?;
    let log = mat_log_unitary(&su4)?.log;
    let (x, _) = components_in_basis(&log, basis)?;
    let gs = &basis.generators;

    let (tau, n, coordinates) = if x.iter().all(|v| v.abs() <= COORD_FLOOR) {
        (vec![0.0; x.len()], 1, None)
    } else {
        let problem = WeiNormanProblem::new(&basis.matrices(), &x)?;
        let sol = find_coordinates(&problem, opts.wn)?;
        (sol.tau.clone(), sol.n, Some(sol))
    };

    // Π e^{hⱼĤⱼ} applies the last factor first.
    let mut cycle = Vec::new();
    for (h, el) in tau.iter().zip(&basis.elements).rev() {
        if h.abs() > COORD_FLOOR {
            cycle.extend(expand_recipe(*h, el, &basis.catalog)?);
        }
    }
    if opts.merge {
        cycle = merge_stages(&cycle);
    }
    let outcome = realizability_pass(&cycle, gs, opts.realizability)?;
    let per_cycle = outcome.stages.len();
    let mut stages = Vec::with_capacity(per_cycle * n);
    let mut signed = Vec::new();
    let mut unrealizable = Vec::new();
    for k in 0..n {
        stages.extend_from_slice(&outcome.stages);
        signed.extend(outcome.signed.iter().map(|i| i + k * per_cycle));
        unrealizable.extend(outcome.unrealizable.iter().map(|(i, _)| i + k * per_cycle));
    }

    let net = stage_product(&stages, gs)?;
    let rms_error = rms_distance(&net, &su4);
    let c = gs.constants;
    let cap_violations = outcome
        .stages
        .iter()
        .enumerate()
        .filter(|(_, s)| s.field.iter().any(|b| b.abs() > FIELD_CAP_UNITS))
        .map(|(i, s)| {
            let peak = s.field.iter().fold(0.0f64, |m, b| m.max(b.abs()));
            format!(
                "cycle stage {i}: |B| = {:.4} mT exceeds {:.1} mT",
                c.units_to_mt(peak),
                c.units_to_mt(FIELD_CAP_UNITS)
            )
        })
        .collect();
    let schedule = PulseSchedule {
        n,
        per_cycle,
        stages: stages
            .iter()
            .map(|s| PulseStage::from_stage(s, &c))
            .collect(),
        rms_error,
        total_time_ns: stages
            .iter()
            .fold(0.0, |acc, s| acc + c.units_to_ns(s.duration)),
        cap_violations,
        signed_stages: signed,
        unrealizable,
        global_phase,
        target: matrix_entries(&su4),
        constants: c,
        generated_unix: None,
    };
    Ok(Synthesis {
        schedule,
        stages,
        cycle_signed: cycle,
        su4_target: su4,
        log,
        components: x,
        coordinates,
        net,
    })
}

/// Reads a 4×4 target written as four rows of `[re, im]` pairs.
pub fn parse_target_json(text: &str) -> Result<CMatrix> {
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_str(text)?;
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(Error::Dimension(
            "target must be 4 rows of 4 [re, im] pairs".into(),
        ));
    }
    let v: Vec<Complex64> = rows
        .iter()
        .flatten()
        .map(|[re, im]| c64(*re, *im))
        .collect();
    let m = CMatrix::from_row_slice(4, 4, &v);
    crate::matrix::ensure_finite(&m)?;
    Ok(m)
}

pub fn target_to_json(m: &CMatrix) -> String {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
        .map(|r| {
            (0..m.ncols())
                .map(|c| [m[(r, c)].re, m[(r, c)].im])
                .collect()
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("plain numbers serialize") + "\n"
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub unitary: CMatrix,
    /// `(elapsed ns, 𝒟ₑ)` before the first stage and after every stage.
    pub entanglement: Option<Vec<(f64, f64)>>,
}

pub fn simulate(
    stages: &[Stage],
    gs: &GeneratorSet,
    psi0: Option<StateVector>,
) -> Result<Simulation> {
    let mut u = identity(4);
    let mut trace = psi0.map(|p| vec![(0.0, entanglement_degree(&p))]);
    let mut psi = psi0;
    let mut elapsed = 0.0;
    for s in stages {
        let step = s.unitary(gs)?;
        u = &step * u;
        elapsed += gs.constants.units_to_ns(s.duration);
        if let (Some(p), Some(tr)) = (psi.as_mut(), trace.as_mut()) {
            *p = p.evolve(&step);
            tr.push((elapsed, entanglement_degree(p)));
        }
    }
    Ok(Simulation {
        unitary: u,
        entanglement: trace,
    })
}

pub fn write_entanglement_csv(trace: &[(f64, f64)], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["stage", "t_ns", "degree"])?;
    for (i, (t, d)) in trace.iter().enumerate() {
        w.write_record(&[i.to_string(), format!("{t:.6}"), format!("{d:.12e}")])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub rms: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub stages: usize,
}

/// Replays a schedule and compares it with `target` (global phase and SU(4)
/// centre ignored).
pub fn verify_schedule(
    schedule: &PulseSchedule,
    target: &CMatrix,
    tolerance: f64,
) -> Result<VerifyReport> {
    let gs = GeneratorSet::new(schedule.constants)?;
    let (su4, _) = strip_global_phase(target)?;
    let sim = simulate(&schedule.internal_stages(), &gs, None)?;
    let rms = rms_up_to_centre(&sim.unitary, &su4);
    Ok(VerifyReport {
        rms,
        tolerance,
        pass: rms <= tolerance,
        stages: schedule.stages.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::{build_control_basis, ControlParams};

    fn basis() -> ControlBasis {
        build_control_basis(&ControlParams::default(), &GeneratorSet::defaults()).unwrap()
    }

    #[test]
    fn expansion_lengths() {
        let b = basis();
        let len = |j: usize| {
            expand_recipe(0.3, &b.elements[j], &b.catalog)
                .unwrap()
                .len()
        };
        assert_eq!(len(3), 1);
        assert_eq!(len(4), 3);
        assert_eq!(len(12), 5);
        let h4 = expand_recipe(0.3, &b.elements[3], &b.catalog).unwrap();
        assert_eq!(h4[0].kind(), StageKind::Idle);
        assert!((h4[0].duration - 0.3 * 1.109).abs() < 1e-15);
    }

    #[test]
    fn expansion_is_exact_group_identity() {
        let b = basis();
        let gs = &b.generators;
        for (j, el) in b.elements.iter().enumerate() {
            let h = 0.1 * (j as f64 + 1.0) - 0.7;
            let stages = expand_recipe(h, el, &b.catalog).unwrap();
            let got = stage_product(&stages, gs).unwrap();
            let want = mat_exp(&(el.element.matrix() * c64(h, 0.0))).unwrap();
            assert!(rms_distance(&got, &want) < 1e-12, "H{}", j + 1);
        }
    }

    #[test]
    fn idle_rewrite_cases() {
        let tp = PhysicalConstants::default().period_units();
        assert!((idle_forward_time(-0.5, tp) - (tp - 0.5)).abs() < 1e-15);
        assert!((idle_forward_time(-3.0, tp) - (2.0 * tp - 3.0)).abs() < 1e-15);
        assert_eq!(idle_forward_time(0.4, tp), 0.4);
        let gs = GeneratorSet::defaults();
        let s = Stage {
            field: [0.0; 3],
            duration: -0.5,
        };
        let out = realizability_pass(&[s], &gs, RealizabilityMode::Signed).unwrap();
        let a = s.unitary(&gs).unwrap();
        let b = out.stages[0].unitary(&gs).unwrap();
        assert!(rms_distance(&a, &b) < 1e-13);
    }

    #[test]
    fn forward_inverse_on_commensurate_phases() {
        let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c64(0.0, 1.0),
            c64(0.0, 2.0),
            c64(0.0, -1.0),
            c64(0.0, -2.0),
        ]));
        let (t, rms) = forward_inverse_time(&a, -0.4, 1e-10, 20.0).unwrap();
        assert!((t - (2.0 * PI - 0.4)).abs() < 1e-12);
        assert!(rms < 1e-12);
    }

    #[test]
    fn signed_field_stage_is_flagged() {
        let gs = GeneratorSet::defaults();
        let s = Stage {
            field: [0.3, 0.0, 0.0],
            duration: -0.2,
        };
        let out = realizability_pass(&[s], &gs, RealizabilityMode::Signed).unwrap();
        assert_eq!(out.signed, vec![0]);
        assert_eq!(out.stages[0], s);
    }

    #[test]
    fn merge_combines_neighbours() {
        let a = Stage {
            field: [0.0; 3],
            duration: 0.2,
        };
        let b = Stage {
            field: [0.0; 3],
            duration: 0.3,
        };
        let c = Stage {
            field: [1.0, 0.0, 0.0],
            duration: 0.1,
        };
        let d = Stage {
            field: [1.0, 0.0, 0.0],
            duration: -0.1,
        };
        let m = merge_stages(&[a, b, c, d]);
        assert_eq!(m.len(), 1);
        assert!((m[0].duration - 0.5).abs() < 1e-15);
    }

    #[test]
    fn identity_target_gives_empty_schedule() {
        let s = synthesize(&identity(4), &basis(), &SynthOptions::default()).unwrap();
        assert!(s.schedule.stages.is_empty());
        assert_eq!(s.schedule.n, 1);
        assert_eq!(s.schedule.rms_error, 0.0);
    }

    #[test]
    fn single_element_target_is_one_pulse() {
        let b = basis();
        let target = mat_exp(&(b.elements[1].element.matrix() * c64(0.05, 0.0))).unwrap();
        let s = synthesize(&target, &b, &SynthOptions::default()).unwrap();
        assert_eq!(s.schedule.stages.len(), 1);
        assert_eq!(s.schedule.stages[0].kind, StageKind::Field);
        assert!(s.schedule.rms_error <= 1e-10, "{}", s.schedule.rms_error);
    }

    #[test]
    fn rejects_non_unitary_target() {
        let mut m = identity(4);
        m[(0, 0)] = c64(2.0, 0.0);
        assert!(matches!(
            synthesize(&m, &basis(), &SynthOptions::default()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn idle_period_returns_entanglement_to_zero() {
        let gs = GeneratorSet::defaults();
        let tp = gs.constants.period_units();
        let sim = simulate(
            &[Stage {
                field: [0.0; 3],
                duration: tp,
            }],
            &gs,
            Some(StateVector::ground()),
        )
        .unwrap();
        let tr = sim.entanglement.unwrap();
        assert_eq!(tr.len(), 2);
        assert!(tr[1].1 < 1e-12);
    }

    #[test]
    fn target_json_round_trip() {
        let u = mat_exp(&(crate::spin::k_hat() * c64(0.7, 0.0))).unwrap();
        let back = parse_target_json(&target_to_json(&u)).unwrap();
        assert!(rms_distance(&u, &back) < 1e-15);
        assert!(matches!(
            parse_target_json("[[[1,0]]]"),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn empty_schedule_simulates_to_identity() {
        let sim = simulate(&[], &GeneratorSet::defaults(), None).unwrap();
        assert_eq!(sim.unitary, identity(4));
    }
}
