use liesynth::checks::jxi_target;
use liesynth::control::{build_control_basis, ControlBasis, ControlParams};
use liesynth::matrix::{c64, haar_special_unitary, haar_unitary, rms_distance, CMatrix};
use liesynth::spin::{entanglement_degree, GeneratorSet, StateVector};
use liesynth::synth::{
    expand_recipe, idle_forward_time, merge_stages, parse_target_json, realizability_pass,
    rms_up_to_centre, simulate, stage_product, synthesize, target_to_json, verify_schedule,
    PulseSchedule, RealizabilityMode, Stage, StageKind, SynthOptions,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn basis() -> &'static ControlBasis {
    static B: OnceLock<ControlBasis> = OnceLock::new();
    B.get_or_init(|| {
        build_control_basis(&ControlParams::default(), &GeneratorSet::defaults()).unwrap()
    })
}

#[test]
fn haar_targets_are_synthesised() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let gs = &basis().generators;
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let u = haar_special_unitary(&mut rng, 4);
        let syn = synthesize(&u, basis(), &SynthOptions::default()).unwrap();
        let sim = simulate(&syn.stages, gs, None).unwrap();
        worst = worst.max(rms_up_to_centre(&sim.unitary, &u));
    }
    assert!(worst <= 1e-8, "worst rms {worst:e}");
}

#[test]
fn jxi_schedule_accounting() {
    let syn = synthesize(&jxi_target(), basis(), &SynthOptions::default()).unwrap();
    let s = &syn.schedule;
    assert_eq!(s.n, 7);
    assert_eq!(s.stages.len(), s.n * s.per_cycle);
    let c = s.constants;
    let cycle: f64 = s.stages[..s.per_cycle].iter().map(|p| p.duration_ns).sum();
    assert!((s.total_time_ns - s.n as f64 * cycle).abs() <= 1e-9 * s.total_time_ns.abs());
    let from_units: f64 = syn.stages.iter().map(|st| c.units_to_ns(st.duration)).sum();
    assert!((s.total_time_ns - from_units).abs() <= 1e-9 * from_units.abs());
    // Signed bookkeeping matches the emitted durations.
    let negative: Vec<usize> = syn
        .stages
        .iter()
        .enumerate()
        .filter(|(_, st)| st.duration < 0.0)
        .map(|(i, _)| i)
        .collect();
    assert_eq!(negative, s.signed_stages);
    assert!(syn
        .stages
        .iter()
        .filter(|st| st.kind() == StageKind::Idle)
        .all(|st| st.duration >= 0.0));
    assert!(s.rms_error <= 1e-8);
}

#[test]
fn identity_target_gives_empty_schedule() {
    let id = CMatrix::identity(4, 4) * Complex64::from_polar(1.0, 0.4);
    let syn = synthesize(&id, basis(), &SynthOptions::default()).unwrap();
    assert!(syn.schedule.stages.is_empty());
    assert_eq!(syn.schedule.total_time_ns, 0.0);
    assert!(syn.schedule.total_time_ns.is_sign_positive());
}

#[test]
fn json_round_trip_and_verify() {
    let syn = synthesize(&jxi_target(), basis(), &SynthOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("schedule.json");
    syn.schedule.write_json(&path).unwrap();
    let back = PulseSchedule::from_json_file(&path).unwrap();
    assert_eq!(back.stages.len(), syn.schedule.stages.len());
    let report = verify_schedule(&back, &back.target_matrix().unwrap(), 1e-8).unwrap();
    assert!(report.pass, "rms {}", report.rms);
    // Verification compares against the caller's target, global phase ignored.
    let shifted = jxi_target() * Complex64::from_polar(1.0, 1.3);
    assert!(verify_schedule(&back, &shifted, 1e-8).unwrap().pass);

    let mut bad = back.clone();
    bad.stages[3].duration_ns *= 1.01;
    let report = verify_schedule(&bad, &bad.target_matrix().unwrap(), 1e-8).unwrap();
    assert!(!report.pass);
}

#[test]
fn target_json_round_trips() {
    let t = jxi_target();
    let back = parse_target_json(&target_to_json(&t)).unwrap();
    assert!(rms_distance(&t, &back) == 0.0);
    assert!(parse_target_json("[[[1,0]]]").is_err());
    assert!(parse_target_json("not json").is_err());
}

#[test]
fn idle_rewrite_preserves_the_unitary() {
    let gs = &basis().generators;
    let period = gs.constants.period_units();
    for t in [-0.1, -1.0, -period, -2.5 * period] {
        let fwd = idle_forward_time(t, period);
        assert!(fwd > 0.0 && fwd <= period + 1e-12);
        let a = Stage {
            field: [0.0; 3],
            duration: t,
        }
        .unitary(gs)
        .unwrap();
        let b = Stage {
            field: [0.0; 3],
            duration: fwd,
        }
        .unitary(gs)
        .unwrap();
        assert!(rms_distance(&a, &b) <= 1e-12, "t = {t}");
    }
    let stages = [
        Stage {
            field: [0.0; 3],
            duration: -0.7,
        },
        Stage {
            field: [0.2, 0.0, 0.0],
            duration: 0.3,
        },
    ];
    let out = realizability_pass(&stages, gs, RealizabilityMode::Signed).unwrap();
    assert!(out.stages.iter().all(|s| s.duration >= 0.0));
    assert!(out.signed.is_empty());
    let before = stage_product(&stages, gs).unwrap();
    let after = stage_product(&out.stages, gs).unwrap();
    assert!(rms_distance(&before, &after) <= 1e-12);
}

#[test]
fn entanglement_trace_has_one_row_per_stage() {
    let syn = synthesize(&jxi_target(), basis(), &SynthOptions::default()).unwrap();
    let sim = simulate(
        &syn.stages,
        &basis().generators,
        Some(StateVector::ground()),
    )
    .unwrap();
    let tr = sim.entanglement.unwrap();
    assert_eq!(tr.len(), syn.stages.len() + 1);
    assert_eq!(tr[0].1, entanglement_degree(&StateVector::ground()));
    assert!(tr.iter().all(|(_, d)| (0.0..=1.0 + 1e-12).contains(d)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn global_phase_is_ignored(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = haar_unitary(&mut rng, 4);
        let syn = synthesize(&u, basis(), &SynthOptions::default()).unwrap();
        let sim = simulate(&syn.stages, &basis().generators, None).unwrap();
        let phased = &sim.unitary * Complex64::from_polar(1.0, syn.schedule.global_phase);
        prop_assert!(rms_distance(&phased, &u) <= 1e-8);
    }

    #[test]
    fn recipe_expansion_reproduces_the_element(j in 0usize..15, h in -2.0f64..2.0) {
        let b = basis();
        let stages = expand_recipe(h, &b.elements[j], &b.catalog).unwrap();
        let got = stage_product(&stages, &b.generators).unwrap();
        let want = liesynth::matrix::mat_exp(&(b.elements[j].element.matrix() * c64(h, 0.0))).unwrap();
        prop_assert!(rms_distance(&got, &want) <= 1e-12);
    }

    #[test]
    fn merging_keeps_the_product(
        fields in prop::collection::vec((0usize..3, -1.0f64..1.0), 1..12)
    ) {
        let gs = &basis().generators;
        let choices = [[0.0, 0.0, 0.0], [0.3, 0.0, 0.0], [0.0, 0.0, -0.4]];
        let stages: Vec<Stage> = fields
            .iter()
            .map(|(k, d)| Stage { field: choices[*k], duration: *d })
            .collect();
        let merged = merge_stages(&stages);
        prop_assert!(merged.len() <= stages.len());
        prop_assert!(merged.windows(2).all(|w| w[0].field != w[1].field));
        let a = stage_product(&stages, gs).unwrap();
        let b = stage_product(&merged, gs).unwrap();
        prop_assert!(rms_distance(&a, &b) <= 1e-12);
    }
}
