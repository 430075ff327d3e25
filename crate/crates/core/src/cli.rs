//! Command-line front end. [`run`] returns the process exit code:
//! 0 on success, 1 when a verification check fails, 2 on usage or parameter
//! errors.

use std::f64::consts::{PI, TAU};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::model::{
    boundary_states, gamma as physical_gamma, propagate_schedule, sample_trajectory,
    to_physical_time, write_trajectory_csv, PhysicalParams, Schedule, Sign, State,
};
use crate::quantum::{
    evolve_with_snapshots, phase_convergence, transport_check, write_snapshot_csv, GridSpec,
};
use crate::synthesis::{
    build_schedule, build_schedule_signed, fit_switching_function, limit_curve,
    shifted_minimum_time, sweep, write_sweep_csv, DEFAULT_EPS_BANG, FIT_TOLERANCE,
};
use crate::verification::{
    brute_force_search, endpoint_residual, integrate_ode, BruteForceOptions, IntegratorConfig,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Targets checked by `verify` when none are given.
pub const DEFAULT_VERIFY_SUITE: [f64; 6] = [0.5 * PI, PI, 1.5 * PI, 2.4 * PI, 2.0 * PI, 4.4 * PI];

const ENDPOINT_TOL: f64 = 1e-8;
const RK4_TOL: f64 = 1e-6;
const RESIDUAL_TOL: f64 = 1e-8;
const BRUTE_FORCE_TOL: f64 = 1e-3;
const BRUTE_FORCE_STEP: f64 = 0.01;

#[derive(Debug, Parser)]
#[command(name = "qtransport", version, about = "Minimum-time transport in a moving harmonic trap")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal bang-bang schedule as JSON.
    Synthesize(SynthesizeArgs),
    /// Sampled phase-space trajectory as CSV.
    Trajectory(TrajectoryArgs),
    /// Minimum time over a range of γ, plus the shifted limit curves.
    Sweep(SweepArgs),
    /// Cross-check synthesized schedules against the independent oracles.
    Verify(VerifyArgs),
    /// Evolve an oscillator eigenstate along the synthesized trap path.
    Quantum(QuantumArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Dimensionless displacement ωd/V.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    /// Trap angular frequency (with --distance and --vmax).
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub distance: Option<f64>,
    #[arg(long)]
    pub vmax: Option<f64>,
    /// Absolute distance in γ from 2ρπ within which the pure bang is used.
    #[arg(long, default_value_t = DEFAULT_EPS_BANG)]
    pub eps_bang: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Directory for written artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print a JSON summary on stdout.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Schedule JSON (as written by `synthesize`) instead of a target.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long, default_value_t = 0.01)]
    pub sample_step: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.05 * PI)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 10.0 * PI)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 1000)]
    pub count: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Comma-separated list of targets; replaces --gamma.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gammas: Vec<f64>,
    /// Check this schedule JSON instead of synthesizing one.
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long)]
    pub skip_brute_force: bool,
    /// Let the brute-force search also start with u = -1.
    #[arg(long)]
    pub allow_negative_start: bool,
    #[arg(long, default_value_t = 1e-4)]
    pub rk4_step: f64,
}

#[derive(Debug, Args)]
pub struct QuantumArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, default_value_t = 0)]
    pub level: usize,
    #[arg(long, default_value_t = 2048)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Trap speed V in oscillator units.
    #[arg(long, default_value_t = 1.0)]
    pub vquantum: f64,
    /// Also run at dt/2 and dt/4 and report phase convergence.
    #[arg(long)]
    pub converge: bool,
    /// Write |ψ|² snapshots (x,prob CSV) at these times into --out.
    #[arg(long, value_delimiter = ',')]
    pub snapshot_times: Vec<f64>,
}

/// Resolved input mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    Gamma(f64),
    Physical(PhysicalParams),
}

impl Target {
    pub fn gamma(&self) -> Result<f64, Error> {
        match self {
            Target::Gamma(g) => Ok(*g),
            Target::Physical(p) => physical_gamma(p),
        }
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Param(Error),
    Io(std::io::Error),
    Failed(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Param(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match &cli.command {
        Command::Synthesize(a) => cmd_synthesize(a),
        Command::Trajectory(a) => cmd_trajectory(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Quantum(a) => cmd_quantum(a),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(CliError::Failed(msg)) => {
            eprintln!("verification failed: {msg}");
            EXIT_VERIFY_FAILED
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Param(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

/// Exactly one of `--gamma` or the full `--omega/--distance/--vmax` triple.
pub fn resolve_target(input: &InputArgs) -> Result<Target, String> {
    let physical = [input.omega, input.distance, input.vmax];
    let given = physical.iter().filter(|v| v.is_some()).count();
    match (input.gamma, given) {
        (Some(_), 0) => Ok(Target::Gamma(input.gamma.unwrap())),
        (Some(_), _) => Err("--gamma cannot be combined with --omega/--distance/--vmax".into()),
        (None, 3) => PhysicalParams::new(
            input.omega.unwrap(),
            1.0,
            1.0,
            input.distance.unwrap(),
            input.vmax.unwrap(),
        )
        .map(Target::Physical)
        .map_err(|e| e.to_string()),
        (None, 0) => Err("give either --gamma or --omega, --distance and --vmax".into()),
        (None, _) => Err("--omega, --distance and --vmax must be given together".into()),
    }
}

fn target_of(input: &InputArgs) -> CliResult<Target> {
    resolve_target(input).map_err(CliError::Usage)
}

fn out_dir(output: &OutputArgs) -> CliResult<PathBuf> {
    let dir = output.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    use std::io::Write;
    let s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.into()))?;
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{s}");
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(f, value).map_err(|e| CliError::Io(e.into()))?;
    Ok(())
}

/// Synthesis output, with physical units when the input had them.
pub fn synthesis_json(target: &Target, eps_bang: f64) -> Result<Value, Error> {
    let gamma = target.gamma()?;
    if gamma == 0.0 {
        return Ok(json!({
            "gamma": 0.0,
            "rho": 0,
            "tau": 0.0,
            "initial_sign": 1,
            "durations": [],
            "total_time": 0.0,
            "switch_times": [],
            "warning": "gamma = 0: the trap is already at the target, nothing to do",
        }));
    }
    let result = build_schedule_signed(gamma, eps_bang)?;
    let mut value = serde_json::to_value(&result).expect("synthesis serializes");
    if let Target::Physical(p) = target {
        let switch_times = result
            .switch_times()
            .iter()
            .map(|&t| to_physical_time(p, t))
            .collect::<Result<Vec<_>, _>>()?;
        let bounds = result.schedule.boundaries();
        let waypoints: Vec<Value> = boundary_states(&result.schedule)
            .iter()
            .zip(&bounds)
            .map(|(x, &t)| {
                let (_, _, s) = p.from_state(x);
                Ok(json!({"t": to_physical_time(p, t)?, "s": s}))
            })
            .collect::<Result<_, Error>>()?;
        value["physical"] = json!({
            "omega": p.omega,
            "distance": p.distance,
            "vmax": p.vmax,
            "total_time": to_physical_time(p, result.total_time)?,
            "switch_times": switch_times,
            "trap_waypoints": waypoints,
        });
    }
    Ok(value)
}

fn cmd_synthesize(a: &SynthesizeArgs) -> CliResult<()> {
    let target = target_of(&a.input)?;
    let value = synthesis_json(&target, a.input.eps_bang)?;
    if let Some(dir) = &a.output.out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("synthesis.json"), &value)?;
    }
    print_json(&value)
}

fn read_schedule(path: &Path) -> CliResult<(Schedule, Option<f64>)> {
    let text = fs::read_to_string(path)?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let schedule: Schedule = serde_json::from_value(value.clone())
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok((schedule, value.get("gamma").and_then(Value::as_f64)))
}

fn cmd_trajectory(a: &TrajectoryArgs) -> CliResult<()> {
    let schedule = match &a.schedule {
        Some(path) => {
            if a.input.gamma.is_some() || a.input.omega.is_some() {
                return Err(CliError::Usage("--schedule replaces the target flags".into()));
            }
            read_schedule(path)?.0
        }
        None => {
            let gamma = target_of(&a.input)?.gamma()?;
            if gamma == 0.0 {
                Schedule::empty()
            } else {
                build_schedule_signed(gamma, a.input.eps_bang)?.schedule
            }
        }
    };
    let samples = sample_trajectory(&schedule, a.sample_step)?;
    let dir = out_dir(&a.output)?;
    let path = dir.join("trajectory.csv");
    write_trajectory_csv(BufWriter::new(File::create(&path)?), &samples)?;
    if a.output.json {
        print_json(&json!({
            "path": path,
            "samples": samples.len(),
            "total_time": schedule.total_time(),
            "endpoint": propagate_schedule(&schedule),
        }))
    } else {
        println!("wrote {} samples to {}", samples.len(), path.display());
        Ok(())
    }
}

fn cmd_sweep(a: &SweepArgs) -> CliResult<()> {
    if a.count < 2 || !(a.gamma_min < a.gamma_max) {
        return Err(CliError::Usage(format!(
            "empty sweep range [{}, {}] with {} points",
            a.gamma_min, a.gamma_max, a.count
        )));
    }
    let rows = sweep(a.gamma_min, a.gamma_max, a.count)?;
    let dir = out_dir(&a.output)?;
    let sweep_path = dir.join("sweep.csv");
    write_sweep_csv(BufWriter::new(File::create(&sweep_path)?), &rows)?;

    let limit_path = dir.join("limit.csv");
    let mut w = BufWriter::new(File::create(&limit_path)?);
    use std::io::Write;
    writeln!(w, "gamma_bar,t_bar_rho1,t_bar_limit")?;
    for k in 1..=a.count {
        let gb = if k == a.count {
            TAU
        } else {
            k as f64 * TAU / a.count as f64
        };
        writeln!(w, "{},{},{}", gb, shifted_minimum_time(gb, 1)?, limit_curve(gb)?)?;
    }
    w.flush()?;

    if a.output.json {
        print_json(&json!({"sweep": sweep_path, "limit": limit_path, "rows": rows.len()}))
    } else {
        println!("wrote {} and {}", sweep_path.display(), limit_path.display());
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub gamma: f64,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn check(out: &mut Vec<CheckOutcome>, name: &str, gamma: f64, value: f64, tolerance: f64) {
    out.push(CheckOutcome {
        name: name.to_string(),
        gamma,
        value,
        tolerance,
        passed: value <= tolerance,
    });
}

/// Oracle checks shared by synthesized and user-supplied schedules.
pub fn verify_schedule(
    schedule: &Schedule,
    gamma: f64,
    rk4_step: f64,
) -> Result<Vec<CheckOutcome>, Error> {
    let mut out = Vec::new();
    let end = propagate_schedule(schedule);
    check(&mut out, "closed_form_endpoint", gamma, (end - State::target(gamma)).norm(), ENDPOINT_TOL);
    let rk4 = integrate_ode(schedule, &IntegratorConfig::new(rk4_step)?);
    check(&mut out, "rk4_agreement", gamma, rk4.max_abs_diff(&end), RK4_TOL);

    let positive = if schedule.initial_sign() == Sign::Minus {
        schedule.negated()
    } else {
        schedule.clone()
    };
    let g = if schedule.initial_sign() == Sign::Minus { -gamma } else { gamma };
    if positive.len() % 2 == 1 {
        let r = endpoint_residual(&positive, g)?;
        check(&mut out, "residual_complex", gamma, r.complex, RESIDUAL_TOL);
        check(&mut out, "residual_x3", gamma, r.x3, RESIDUAL_TOL);
    }
    if schedule.switch_count() >= 2 {
        let value = match fit_switching_function(schedule) {
            Ok(fit) => fit.residual,
            Err(_) => f64::INFINITY,
        };
        check(&mut out, "switching_fit", gamma, value, FIT_TOLERANCE);
    }
    Ok(out)
}

fn brute_force_check(
    out: &mut Vec<CheckOutcome>,
    gamma: f64,
    allow_negative_start: bool,
) -> Result<Value, Error> {
    let analytic = build_schedule(gamma)?;
    let opts = BruteForceOptions {
        max_switchings: 2 * analytic.rho as usize + 2,
        coarse_step: BRUTE_FORCE_STEP,
        allow_negative_start,
    };
    let report = brute_force_search(gamma, &opts)?;
    // A positive gap means the search beat the analytic optimum.
    let gap = analytic.total_time - report.best_time;
    check(out, "brute_force_optimality", gamma, gap, BRUTE_FORCE_TOL);
    Ok(serde_json::to_value(&report).expect("report serializes"))
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<()> {
    let mut checks = Vec::new();
    let mut brute = Vec::new();
    if let Some(path) = &a.schedule {
        let (schedule, recorded) = read_schedule(path)?;
        let gamma = match (a.input.gamma, recorded) {
            (Some(g), _) | (None, Some(g)) => g,
            (None, None) => {
                return Err(CliError::Usage(format!(
                    "{} has no gamma field; pass --gamma",
                    path.display()
                )))
            }
        };
        checks.extend(verify_schedule(&schedule, gamma, a.rk4_step)?);
    } else {
        let gammas: Vec<f64> = if !a.gammas.is_empty() {
            if a.input.gamma.is_some() {
                return Err(CliError::Usage("use either --gamma or --gammas".into()));
            }
            a.gammas.clone()
        } else if a.input.gamma.is_some() || a.input.omega.is_some() || a.input.distance.is_some() {
            vec![target_of(&a.input)?.gamma()?]
        } else {
            DEFAULT_VERIFY_SUITE.to_vec()
        };
        for &gamma in &gammas {
            if gamma == 0.0 {
                return Err(CliError::Usage("gamma = 0 has nothing to verify".into()));
            }
            let r = build_schedule_signed(gamma, a.input.eps_bang)?;
            checks.extend(verify_schedule(&r.schedule, gamma, a.rk4_step)?);
            if !a.skip_brute_force && gamma > 0.0 && r.rho <= 2 {
                brute.push(brute_force_check(&mut checks, gamma, a.allow_negative_start)?);
            }
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    let report = json!({"passed": passed, "checks": checks, "brute_force": brute});
    if let Some(dir) = &a.output.out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("verify.json"), &report)?;
    }
    print_json(&report)?;
    if passed {
        Ok(())
    } else {
        let failed: Vec<String> = checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} at gamma = {} ({} > {})", c.name, c.gamma, c.value, c.tolerance))
            .collect();
        Err(CliError::Failed(failed.join("; ")))
    }
}

fn cmd_quantum(a: &QuantumArgs) -> CliResult<()> {
    let gamma = target_of(&a.input)?.gamma()?;
    if !(gamma > 0.0) {
        return Err(CliError::Usage(format!("quantum check needs gamma > 0, got {gamma}")));
    }
    let grid = GridSpec::with_points(gamma * a.vquantum, a.grid_points, a.dt)?;
    let report = transport_check(a.level, gamma, a.vquantum, &grid)?;
    let mut value = serde_json::to_value(&report).expect("report serializes");
    if a.converge {
        let c = phase_convergence(a.level, gamma, a.vquantum, &grid)?;
        value["convergence"] = serde_json::to_value(&c).expect("convergence serializes");
    }
    if !a.snapshot_times.is_empty() {
        let dir = out_dir(&a.output)?;
        let schedule = build_schedule(gamma)?.schedule;
        let psi0 = crate::quantum::eigenstate(a.level, &grid, 0.0)?;
        let (_, snaps) = evolve_with_snapshots(&psi0, &schedule, a.vquantum, &a.snapshot_times)?;
        let mut files = Vec::new();
        for (k, psi) in snaps.iter().enumerate() {
            let path = dir.join(format!("snapshot_{k:03}.csv"));
            write_snapshot_csv(BufWriter::new(File::create(&path)?), psi)?;
            files.push(json!({"requested": a.snapshot_times[k], "time": psi.time, "path": path}));
        }
        value["snapshots"] = Value::Array(files);
    }
    if let Some(dir) = &a.output.out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("quantum.json"), &value)?;
    }
    print_json(&value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(gamma: Option<f64>, phys: [Option<f64>; 3]) -> InputArgs {
        InputArgs {
            gamma,
            omega: phys[0],
            distance: phys[1],
            vmax: phys[2],
            eps_bang: DEFAULT_EPS_BANG,
        }
    }

    #[test]
    fn exactly_one_input_mode() {
        assert_eq!(resolve_target(&input(Some(1.0), [None; 3])), Ok(Target::Gamma(1.0)));
        assert!(resolve_target(&input(Some(1.0), [Some(1.0), None, None])).is_err());
        assert!(resolve_target(&input(None, [Some(1.0), Some(2.0), None])).is_err());
        assert!(resolve_target(&input(None, [None; 3])).is_err());
        let t = resolve_target(&input(None, [Some(2.0), Some(3.0), Some(1.5)])).unwrap();
        assert_eq!(t.gamma().unwrap(), 4.0);
    }

    #[test]
    fn zero_gamma_gives_warning() {
        let v = synthesis_json(&Target::Gamma(0.0), DEFAULT_EPS_BANG).unwrap();
        assert!(v["warning"].is_string());
        assert_eq!(v["durations"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn physical_output_only_with_physical_input() {
        let v = synthesis_json(&Target::Gamma(PI), DEFAULT_EPS_BANG).unwrap();
        assert!(v.get("physical").is_none());
        let p = PhysicalParams::new(2.0, 1.0, 1.0, PI, 2.0).unwrap();
        let v = synthesis_json(&Target::Physical(p), DEFAULT_EPS_BANG).unwrap();
        let t = v["physical"]["total_time"].as_f64().unwrap();
        assert!((t - v["total_time"].as_f64().unwrap() / 2.0).abs() < 1e-15);
        let last = v["physical"]["trap_waypoints"].as_array().unwrap().last().unwrap().clone();
        assert!((last["s"].as_f64().unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn perturbed_schedule_fails_checks() {
        let r = build_schedule(PI).unwrap();
        let mut d = r.schedule.durations().to_vec();
        d[1] += 0.1;
        let s = Schedule::new(Sign::Plus, d).unwrap();
        let checks = verify_schedule(&s, PI, 1e-3).unwrap();
        assert!(checks.iter().any(|c| c.name == "closed_form_endpoint" && !c.passed));
    }

    #[test]
    fn parse_errors_exit_with_usage_code() {
        assert_eq!(run(["qtransport", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["qtransport", "synthesize", "--gamma", "abc"]), EXIT_USAGE);
    }
}
