use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};

use liesynth::checks;
use liesynth::closure::{closure, ClosureOptions, Engine};
use liesynth::control::{build_control_basis, optimize_params, ControlParams, StepSchedule};
use liesynth::matrix::{identity, CMatrix};
use liesynth::spin::{GeneratorSet, PhysicalConstants, StateVector};
use liesynth::synth::{
    parse_target_json, simulate, synthesize, verify_schedule, write_entanglement_csv,
    PulseSchedule, RealizabilityMode, SynthOptions,
};
use liesynth::wei_norman::WnOptions;
use liesynth::{Error, Result};

/// Exit code for a completed run whose checks did not pass.
const EXIT_FAIL: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "liesynth",
    version,
    about = "Lie-algebraic pulse synthesis for a coupled spin pair"
)]
struct Cli {
    /// Physical constants file (key = value lines).
    #[arg(long, global = true)]
    constants: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Gammas {
    Unequal,
    Equal,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum EngineArg {
    Abstract,
    Realizable,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Smallest Lie algebra containing the field generators.
    Closure {
        /// Field directions, any of x, y, z.
        #[arg(long, default_value = "xyz")]
        dirs: String,
        #[arg(long, value_enum, default_value = "unequal")]
        gammas: Gammas,
        #[arg(long, value_enum, default_value = "realizable")]
        engine: EngineArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative dependence tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Minimum relative sigma_min of a sample-point stack.
        #[arg(long, default_value_t = 1e-7)]
        sample_tol: f64,
        /// Basis JSON output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Hill-climb the control constants on the basis condition number.
    OptimizeBasis {
        /// Starting constants (JSON); defaults to the published set.
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        max_passes: usize,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Synthesize a pulse schedule for a target unitary.
    Synthesize {
        /// `jxi`, `identity`, or a JSON file of four rows of [re, im] pairs.
        #[arg(long, default_value = "jxi")]
        target: String,
        #[arg(long)]
        params: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0.001)]
        dt: f64,
        #[arg(long, default_value_t = 0.1)]
        det_threshold: f64,
        /// Search forward-time equivalents for negative field stages.
        #[arg(long)]
        search_forward: bool,
        #[arg(long, default_value_t = 1e-6)]
        realize_tol: f64,
        /// Forward search horizon, in time units.
        #[arg(long, default_value_t = 200.0)]
        max_horizon: f64,
        /// Accept stages the forward search could not resolve.
        #[arg(long)]
        allow_signed: bool,
        #[arg(long)]
        no_merge: bool,
        #[arg(long)]
        no_timestamp: bool,
        /// Entanglement-degree trace from (1,0,0,0), CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Wei-Norman integration trace, CSV.
        #[arg(long)]
        wn_trace: Option<PathBuf>,
    },
    /// Replay a schedule and compare it with a target.
    Verify {
        #[arg(long)]
        schedule: PathBuf,
        /// Same forms as `synthesize --target`; defaults to the schedule's own target.
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Run the worked-example reproduction table.
    DemoPaper {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for basis, schedule and trace artifacts.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn load_constants(path: Option<&Path>) -> Result<PhysicalConstants> {
    match path {
        Some(p) => PhysicalConstants::from_config_file(p),
        None => Ok(PhysicalConstants::default()),
    }
}

fn load_params(path: Option<&Path>) -> Result<ControlParams> {
    match path {
        Some(p) => ControlParams::from_json_file(p),
        None => Ok(ControlParams::default()),
    }
}

fn load_target(spec: &str) -> Result<CMatrix> {
    match spec {
        "jxi" => Ok(checks::jxi_target()),
        "identity" => Ok(identity(4)),
        path => parse_target_json(&std::fs::read_to_string(path)?),
    }
}

fn run_closure(
    constants: PhysicalConstants,
    dirs: &str,
    gammas: Gammas,
    engine: EngineArg,
    opts: ClosureOptions,
    output: Option<&Path>,
) -> Result<u8> {
    let c = match gammas {
        Gammas::Unequal => constants,
        Gammas::Equal => constants.with_equal_gammas(),
    };
    let gens = GeneratorSet::new(c)?.direction_generators(dirs)?;
    let opts = ClosureOptions {
        engine: match engine {
            EngineArg::Abstract => Engine::Abstract,
            EngineArg::Realizable => Engine::Realizable,
        },
        ..opts
    };
    let r = closure(&gens, &opts)?;
    println!("dim {}", r.dim);
    println!("passes {}", r.iterations);
    println!("bracket residual {:.2e}", r.bracket_closure_residual()?);
    if let Some(p) = output {
        r.write_json(p)?;
        println!("wrote {}", p.display());
    }
    Ok(0)
}

fn run_optimize(
    constants: PhysicalConstants,
    params: Option<&Path>,
    seed: u64,
    max_passes: usize,
    step: f64,
    restarts: usize,
    output: Option<&Path>,
) -> Result<u8> {
    let gs = GeneratorSet::new(constants)?;
    let start = load_params(params)?;
    let schedule = StepSchedule {
        initial_step: step,
        ..Default::default()
    };
    let (best, report) = optimize_params(&start, &gs, max_passes, schedule, seed, restarts)?;
    let basis = build_control_basis(&best, &gs)?;
    println!("initial cond {:.6}", report.initial_cond);
    println!("final cond {:.6}", report.final_cond);
    println!(
        "sigma_max {:.6} sigma_min {:.6}",
        basis.condition.sigma_max, basis.condition.sigma_min
    );
    println!(
        "passes {} evaluations {} restarts {}",
        report.passes, report.evaluations, report.restarts
    );
    for v in best.cap_violations() {
        println!("cap: {v}");
    }
    if let Some(p) = output {
        best.write_json(p)?;
        println!("wrote {}", p.display());
    }
    Ok(0)
}

struct SynthArgs<'a> {
    target: &'a str,
    params: Option<&'a Path>,
    output: Option<&'a Path>,
    opts: SynthOptions,
    allow_signed: bool,
    timestamp: bool,
    trace: Option<&'a Path>,
    wn_trace: Option<&'a Path>,
}

fn run_synthesize(constants: PhysicalConstants, a: SynthArgs) -> Result<u8> {
    let gs = GeneratorSet::new(constants)?;
    let basis = build_control_basis(&load_params(a.params)?, &gs)?;
    let target = load_target(a.target)?;
    let s = synthesize(&target, &basis, &a.opts)?;
    let mut schedule = s.schedule.clone();
    if a.timestamp {
        schedule.generated_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }
    println!("n {}", schedule.n);
    println!("rms {:.3e}", schedule.rms_error);
    println!(
        "stages {} ({} per cycle)",
        schedule.stages.len(),
        schedule.per_cycle
    );
    println!("total time {:.1} ns", schedule.total_time_ns);
    println!("global phase {:.6}", schedule.global_phase);
    if !schedule.signed_stages.is_empty() {
        println!("signed field stages {}", schedule.signed_stages.len());
    }
    for v in &schedule.cap_violations {
        println!("cap: {v}");
    }
    if let Some(p) = a.output {
        schedule.write_json(p)?;
        println!("wrote {}", p.display());
    }
    if let Some(p) = a.trace {
        let sim = simulate(&s.stages, &gs, Some(StateVector::ground()))?;
        write_entanglement_csv(sim.entanglement.as_deref().unwrap_or(&[]), p)?;
    }
    if let (Some(p), Some(sol)) = (a.wn_trace, &s.coordinates) {
        sol.trace.write_csv(p)?;
    }
    if !a.allow_signed {
        if let Err(e) = schedule.check_realizable() {
            eprintln!("error: {e}");
            return Ok(EXIT_NUMERIC);
        }
    }
    Ok(0)
}

fn run_verify(schedule: &Path, target: Option<&str>, tol: f64) -> Result<u8> {
    let sched = PulseSchedule::from_json_file(schedule)?;
    let target = match target {
        Some(t) => load_target(t)?,
        None => sched.target_matrix()?,
    };
    let r = verify_schedule(&sched, &target, tol)?;
    println!("stages {}", r.stages);
    println!("rms {:.3e} (tolerance {:.1e})", r.rms, r.tolerance);
    println!("{}", if r.pass { "PASS" } else { "FAIL" });
    Ok(if r.pass { 0 } else { EXIT_FAIL })
}

fn run_demo(seed: u64, output: Option<&Path>) -> Result<u8> {
    let rows = checks::run_all(seed);
    print!("{}", checks::format_table(&rows));
    let passed = rows.iter().filter(|r| r.pass).count();
    println!("{passed}/{} passed", rows.len());
    if let Some(dir) = output {
        std::fs::create_dir_all(dir)?;
        let gs = GeneratorSet::defaults();
        let gens = gs.direction_generators("xyz")?;
        closure(&gens, &ClosureOptions::default())?.write_json(&dir.join("basis.json"))?;
        let basis = build_control_basis(&ControlParams::default(), &gs)?;
        let s = synthesize(&checks::jxi_target(), &basis, &SynthOptions::default())?;
        s.schedule.write_json(&dir.join("schedule.json"))?;
        let sim = simulate(&s.stages, &gs, Some(StateVector::ground()))?;
        write_entanglement_csv(
            sim.entanglement.as_deref().unwrap_or(&[]),
            &dir.join("entanglement.csv"),
        )?;
        if let Some(sol) = &s.coordinates {
            sol.first_pass
                .write_csv(&dir.join("wei_norman_first_pass.csv"))?;
            sol.trace.write_csv(&dir.join("wei_norman.csv"))?;
        }
        println!("wrote artifacts to {}", dir.display());
    }
    Ok(if passed == rows.len() { 0 } else { EXIT_FAIL })
}

fn run(cli: Cli) -> Result<u8> {
    let constants = load_constants(cli.constants.as_deref())?;
    match cli.command {
        Command::Closure {
            dirs,
            gammas,
            engine,
            seed,
            tol,
            sample_tol,
            output,
        } => {
            let opts = ClosureOptions {
                seed,
                tol,
                sample_tol,
                ..Default::default()
            };
            run_closure(constants, &dirs, gammas, engine, opts, output.as_deref())
        }
        Command::OptimizeBasis {
            params,
            seed,
            max_passes,
            step,
            restarts,
            output,
        } => run_optimize(
            constants,
            params.as_deref(),
            seed,
            max_passes,
            step,
            restarts,
            output.as_deref(),
        ),
        Command::Synthesize {
            target,
            params,
            output,
            dt,
            det_threshold,
            search_forward,
            realize_tol,
            max_horizon,
            allow_signed,
            no_merge,
            no_timestamp,
            trace,
            wn_trace,
        } => {
            let realizability = if search_forward {
                RealizabilityMode::Search {
                    tol: realize_tol,
                    max_horizon,
                }
            } else {
                RealizabilityMode::Signed
            };
            let opts = SynthOptions {
                wn: WnOptions { dt, det_threshold },
                merge: !no_merge,
                realizability,
            };
            run_synthesize(
                constants,
                SynthArgs {
                    target: &target,
                    params: params.as_deref(),
                    output: output.as_deref(),
                    opts,
                    allow_signed,
                    timestamp: !no_timestamp,
                    trace: trace.as_deref(),
                    wn_trace: wn_trace.as_deref(),
                },
            )
        }
        Command::Verify {
            schedule,
            target,
            tol,
        } => run_verify(&schedule, target.as_deref(), tol),
        Command::DemoPaper { seed, output } => run_demo(seed, output.as_deref()),
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_NUMERIC
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
