//! JSON-config-driven command-line front end.
//!
//! One strictly validated JSON document describes the potential, the grid,
//! and the task; flags only select the config, override the task, and control
//! output location, strictness, and thread count. Exit codes: 0 success,
//! 1 numerical failure, 2 config error.

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::darboux::{
    chain_partner_potential, compose_chain_two, transform_chain_two, transform_first_order,
    transform_inverse, transform_second_order, DarbouxConfig,
};
use crate::diagnostics::{lewis_invariant, quantum_number, quantum_number_shift};
use crate::emp::{
    amplitude_phase_wavefunction, emp_from_pair, emp_residual, integrate_emp,
    AmplitudePhaseParams, EmpCoefficients, EmpSolution,
};
use crate::error::{Error, Result};
use crate::grid::{Grid, Interval};
use crate::interp::CubicSpline;
use crate::numeric::central_diff;
use crate::ode::OdeOptions;
use crate::potentials::{
    partner_pair_first_order, partner_pair_second_order, GeneratingFunction, Potential, RealFn,
    Superpotential, FD_STEP,
};
use crate::quantization::find_bound_states;
use crate::report;
use crate::schrodinger::{integrate_pair, map_wavefunction_first};
use crate::squarewell;

#[derive(Parser, Debug)]
#[command(name = "milne", version, about = "EMP equation toolkit: solve, transform, quantize")]
pub struct Cli {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Task name override; must agree with the config's task unless the
    /// named task needs no parameters (verify-squarewell).
    #[arg(long)]
    pub task: Option<String>,

    /// Output directory for CSV/JSON artifacts.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,

    /// Treat transform inputs that fail the EMP residual guard as errors.
    #[arg(long)]
    pub strict: bool,

    /// Worker threads for energy scans (default: rayon's choice).
    #[arg(long)]
    pub threads: Option<usize>,
}

// ---------------------------------------------------------------------------
// Config schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: Option<PotentialSpec>,
    pub grid: Option<GridSpec>,
    pub task: TaskSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub margin: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub ode_abs: f64,
    pub ode_rel: f64,
    /// EMP residual threshold for the transform-input guard.
    pub guard: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ode_abs: 1e-12,
            ode_rel: 1e-12,
            guard: 1e-5,
        }
    }
}

/// Built-in function catalog shared by potentials and superpotentials.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// Constant -depth (the hard walls live in the grid interval).
    #[serde(rename = "square_well")]
    SquareWell {
        #[serde(default = "default_depth")]
        depth: f64,
    },
    /// coefficient * tan(x).
    Tan {
        #[serde(default = "default_one")]
        coefficient: f64,
    },
    /// slope * x + intercept.
    Linear {
        slope: f64,
        #[serde(default)]
        intercept: f64,
    },
    /// Two-column CSV (x, value) with natural cubic interpolation.
    CustomTabulated { file: PathBuf },
}

fn default_depth() -> f64 {
    1.0
}

fn default_one() -> f64 {
    1.0
}

#[derive(Debug, Clone)]
pub enum PotentialSpec {
    /// V = W^2 - W' (or the partner W^2 + W') for a catalog superpotential.
    Derived {
        superpotential: FunctionSpec,
        partner: bool,
    },
    /// V given directly as a catalog function.
    Direct(FunctionSpec),
}

// Hand-rolled: an untagged wrapper around the internally tagged FunctionSpec
// trips serde's content buffering, so dispatch on the "superpotential" key.
impl<'de> Deserialize<'de> for PotentialSpec {
    fn deserialize<D>(deserializer: D) -> std::result::Result<Self, D::Error>
    where
        D: serde::Deserializer<'de>,
    {
        let value = serde_json::Value::deserialize(deserializer)?;
        if value.get("superpotential").is_some() {
            #[derive(Deserialize)]
            #[serde(deny_unknown_fields)]
            struct Derived {
                superpotential: FunctionSpec,
                #[serde(default)]
                partner: bool,
            }
            let d: Derived = serde_json::from_value(value).map_err(serde::de::Error::custom)?;
            Ok(PotentialSpec::Derived {
                superpotential: d.superpotential,
                partner: d.partner,
            })
        } else {
            let f: FunctionSpec =
                serde_json::from_value(value).map_err(serde::de::Error::custom)?;
            Ok(PotentialSpec::Direct(f))
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformEntry {
    pub order: u8,
    /// Order-1 steps: the superpotential W.
    pub superpotential: Option<FunctionSpec>,
    /// Order-2 steps: the generating function f.
    pub f: Option<FunctionSpec>,
    /// Order-2 irreducible constant d.
    pub d: Option<f64>,
    /// Order-2 reducible shift c (d = -c^2/4), evaluated as a two-step chain.
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskSpec {
    SolveEmp {
        energy: f64,
        rho0: Option<f64>,
        #[serde(default)]
        rho0_prime: f64,
        coefficients: Option<EmpCoefficients>,
    },
    Transform {
        energy: f64,
        transforms: Vec<TransformEntry>,
        rho0: Option<f64>,
        #[serde(default)]
        rho0_prime: f64,
        coefficients: Option<EmpCoefficients>,
    },
    Chain {
        energy: f64,
        f: FunctionSpec,
        c: f64,
        rho0: Option<f64>,
        #[serde(default)]
        rho0_prime: f64,
    },
    Spectrum {
        n_max: usize,
        e_min: f64,
        e_max: f64,
    },
    Invariant {
        energy: f64,
        coefficients: Option<EmpCoefficients>,
        #[serde(default = "default_one")]
        alpha: f64,
        #[serde(default)]
        beta: f64,
        x0: Option<f64>,
    },
    VerifySquarewell {},
}

impl TaskSpec {
    pub fn name(&self) -> &'static str {
        match self {
            TaskSpec::SolveEmp { .. } => "solve-emp",
            TaskSpec::Transform { .. } => "transform",
            TaskSpec::Chain { .. } => "chain",
            TaskSpec::Spectrum { .. } => "spectrum",
            TaskSpec::Invariant { .. } => "invariant",
            TaskSpec::VerifySquarewell {} => "verify-squarewell",
        }
    }
}

// ---------------------------------------------------------------------------
// Catalog -> callable functions
// ---------------------------------------------------------------------------

fn load_tabulated(path: &Path) -> Result<CubicSpline> {
    let text = fs::read_to_string(path)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
            return Err(Error::Config(format!(
                "{}: line {} needs two comma-separated columns",
                path.display(),
                lineno + 1
            )));
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                xs.push(x);
                ys.push(y);
            }
            // Tolerate a single header line.
            _ if lineno == 0 => continue,
            _ => {
                return Err(Error::Config(format!(
                    "{}: line {} is not numeric",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    CubicSpline::new(xs, ys)
}

/// Value and first derivative of a catalog function.
fn build_scalar(spec: &FunctionSpec) -> Result<(RealFn, RealFn, String)> {
    Ok(match spec {
        FunctionSpec::SquareWell { depth } => {
            let v = -depth;
            (
                Arc::new(move |_| v),
                Arc::new(|_| 0.0),
                "square_well".to_string(),
            )
        }
        FunctionSpec::Tan { coefficient } => {
            let a = *coefficient;
            (
                Arc::new(move |x: f64| a * x.tan()),
                Arc::new(move |x: f64| a / x.cos().powi(2)),
                "tan".to_string(),
            )
        }
        FunctionSpec::Linear { slope, intercept } => {
            let (s, b) = (*slope, *intercept);
            (
                Arc::new(move |x| s * x + b),
                Arc::new(move |_| s),
                "linear".to_string(),
            )
        }
        FunctionSpec::CustomTabulated { file } => {
            let spline = Arc::new(load_tabulated(file)?);
            let s2 = spline.clone();
            let value: RealFn = Arc::new(move |x| spline.eval(x));
            let value2 = value.clone();
            let deriv: RealFn = Arc::new(move |x| {
                let _ = &s2; // keep the spline alive with the closure pair
                central_diff(value2.as_ref(), x, FD_STEP)
            });
            (value, deriv, "custom-tabulated".to_string())
        }
    })
}

fn build_superpotential(spec: &FunctionSpec, domain: Interval) -> Result<Superpotential> {
    let (w, w_prime, _) = build_scalar(spec)?;
    Ok(Superpotential::new(w, w_prime, domain))
}

fn build_generating(spec: &FunctionSpec, domain: Interval, d: f64) -> Result<GeneratingFunction> {
    Ok(match spec {
        FunctionSpec::SquareWell { depth } => {
            let v = -depth;
            GeneratingFunction::new(
                Arc::new(move |_| v),
                Arc::new(|_| 0.0),
                Arc::new(|_| 0.0),
                domain,
                d,
            )
        }
        FunctionSpec::Tan { coefficient } => {
            let a = *coefficient;
            GeneratingFunction::new(
                Arc::new(move |x: f64| a * x.tan()),
                Arc::new(move |x: f64| a / x.cos().powi(2)),
                Arc::new(move |x: f64| 2.0 * a * x.tan() / x.cos().powi(2)),
                domain,
                d,
            )
        }
        FunctionSpec::Linear { slope, intercept } => {
            let (s, b) = (*slope, *intercept);
            GeneratingFunction::new(
                Arc::new(move |x| s * x + b),
                Arc::new(move |_| s),
                Arc::new(|_| 0.0),
                domain,
                d,
            )
        }
        FunctionSpec::CustomTabulated { .. } => {
            let (f, _, _) = build_scalar(spec)?;
            GeneratingFunction::from_fn_fd(f, domain, d, FD_STEP)
        }
    })
}

fn build_potential(spec: &PotentialSpec, domain: Interval) -> Result<Potential> {
    match spec {
        PotentialSpec::Direct(f) => {
            let (v, _, label) = build_scalar(f)?;
            Ok(Potential::new(v, domain, label))
        }
        PotentialSpec::Derived {
            superpotential,
            partner,
        } => {
            let w = build_superpotential(superpotential, domain)?;
            let (v, vt) = partner_pair_first_order(&w);
            Ok(if *partner { vt } else { v })
        }
    }
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Io(_) | Error::InvalidGrid(_) => 2,
        _ => 1,
    }
}

pub fn main_entry() -> i32 {
    let _ = env_logger::try_init();
    let cli = Cli::parse();
    match run_cli(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

pub fn run_cli(cli: &Cli) -> Result<i32> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be >= 1".into()));
        }
        // Ignore "already initialized" (e.g. repeated calls in one process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }

    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => match cli.task.as_deref() {
            Some("verify-squarewell") => RunConfig {
                potential: None,
                grid: None,
                task: TaskSpec::VerifySquarewell {},
                tolerances: Tolerances::default(),
            },
            _ => {
                return Err(Error::Config(
                    "--config required (only verify-squarewell runs without one)".into(),
                ))
            }
        },
    };

    if let Some(name) = &cli.task {
        if name == "verify-squarewell" {
            config.task = TaskSpec::VerifySquarewell {};
        } else if name != config.task.name() {
            return Err(Error::Config(format!(
                "--task {name} conflicts with configured task '{}' and carries no parameters",
                config.task.name()
            )));
        }
    }

    fs::create_dir_all(&cli.out)?;
    run(&config, &cli.out, cli.strict)
}

/// Execute a validated config. Returns the process exit code.
pub fn run(config: &RunConfig, out_dir: &Path, strict: bool) -> Result<i32> {
    let opts = OdeOptions {
        abs_tol: config.tolerances.ode_abs,
        rel_tol: config.tolerances.ode_rel,
        ..OdeOptions::default()
    };
    let dcfg = DarbouxConfig {
        strict,
        guard_tol: config.tolerances.guard,
        ..DarbouxConfig::default()
    };

    if let TaskSpec::VerifySquarewell {} = &config.task {
        return run_verify(out_dir, &opts, &dcfg);
    }

    let grid_spec = config
        .grid
        .as_ref()
        .ok_or_else(|| Error::Config("task requires a grid".into()))?;
    let grid = Grid::new(
        Interval::new(grid_spec.lo, grid_spec.hi, grid_spec.margin)?,
        grid_spec.n_points,
    )?;
    let potential_spec = config
        .potential
        .as_ref()
        .ok_or_else(|| Error::Config("task requires a potential".into()))?;
    let v = build_potential(potential_spec, grid.interval)?;

    match &config.task {
        TaskSpec::SolveEmp {
            energy,
            rho0,
            rho0_prime,
            coefficients,
        } => run_solve_emp(&v, &grid, *energy, *rho0, *rho0_prime, *coefficients, &opts, out_dir),
        TaskSpec::Transform {
            energy,
            transforms,
            rho0,
            rho0_prime,
            coefficients,
        } => run_transform(
            &v, &grid, *energy, transforms, *rho0, *rho0_prime, *coefficients, &opts, &dcfg,
            out_dir,
        ),
        TaskSpec::Chain {
            energy,
            f,
            c,
            rho0,
            rho0_prime,
        } => run_chain(&v, &grid, *energy, f, *c, *rho0, *rho0_prime, &opts, &dcfg, out_dir),
        TaskSpec::Spectrum { n_max, e_min, e_max } => {
            run_spectrum(&v, &grid, *n_max, (*e_min, *e_max), &opts, out_dir)
        }
        TaskSpec::Invariant {
            energy,
            coefficients,
            alpha,
            beta,
            x0,
        } => run_invariant(&v, &grid, *energy, *coefficients, *alpha, *beta, *x0, &opts, out_dir),
        TaskSpec::VerifySquarewell {} => unreachable!("handled above"),
    }
}

// ---------------------------------------------------------------------------
// Tasks
// ---------------------------------------------------------------------------

/// Build the working EMP solution: from a solution pair when coefficients
/// are given, otherwise by direct integration seeded with the WKB amplitude.
fn build_rho(
    v: &Potential,
    grid: &Grid,
    energy: f64,
    rho0: Option<f64>,
    rho0_prime: f64,
    coefficients: Option<EmpCoefficients>,
    opts: &OdeOptions,
) -> Result<EmpSolution> {
    if let Some(coeff) = coefficients {
        let pair = integrate_pair(v, energy, grid, opts)?;
        return emp_from_pair(&pair, coeff);
    }
    let rho0 = rho0.unwrap_or_else(|| {
        let v_mid = v.eval(grid.midpoint());
        if energy > v_mid {
            (energy - v_mid).powf(-0.25)
        } else {
            1.0
        }
    });
    integrate_emp(v, energy, grid, rho0, rho0_prime, opts)
}

#[allow(clippy::too_many_arguments)]
fn run_solve_emp(
    v: &Potential,
    grid: &Grid,
    energy: f64,
    rho0: Option<f64>,
    rho0_prime: f64,
    coefficients: Option<EmpCoefficients>,
    opts: &OdeOptions,
    out_dir: &Path,
) -> Result<i32> {
    let sol = build_rho(v, grid, energy, rho0, rho0_prime, coefficients, opts)?;
    report::emp_csv(&sol, v, &out_dir.join("emp.csv"))?;
    let sample = quantum_number(&sol);
    report::json_report(
        "solve-emp",
        &json!({
            "energy": energy,
            "potential": v.label,
            "n_value": sample.n_value,
            "max_residual": emp_residual(&sol, v),
        }),
        &out_dir.join("report.json"),
    )?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn run_transform(
    v: &Potential,
    grid: &Grid,
    energy: f64,
    transforms: &[TransformEntry],
    rho0: Option<f64>,
    rho0_prime: f64,
    coefficients: Option<EmpCoefficients>,
    opts: &OdeOptions,
    dcfg: &DarbouxConfig,
    out_dir: &Path,
) -> Result<i32> {
    if transforms.is_empty() {
        return Err(Error::Config("transform task needs at least one step".into()));
    }

    let input = build_rho(v, grid, energy, rho0, rho0_prime, coefficients, opts)?;
    report::emp_csv(&input, v, &out_dir.join("emp_input.csv"))?;

    let mut current = input;
    let mut current_v = v.clone();
    let mut steps = Vec::new();
    for (index, entry) in transforms.iter().enumerate() {
        let (next, next_v, kind) = apply_entry(&current, entry, grid, dcfg)?;
        let residual = emp_residual(&next, &next_v);
        let shift = quantum_number_shift(&quantum_number(&current), &quantum_number(&next))?;
        report::emp_csv(
            &next,
            &next_v,
            &out_dir.join(format!("emp_step_{}.csv", index + 1)),
        )?;
        steps.push(json!({
            "step": index + 1,
            "kind": kind,
            "potential": next_v.label,
            "max_residual": residual,
            "n_value": quantum_number(&next).n_value,
            "quantum_number_shift": shift,
        }));
        current = next;
        current_v = next_v;
    }
    let _ = current_v;
    report::json_report(
        "transform",
        &json!({ "energy": energy, "steps": steps }),
        &out_dir.join("report.json"),
    )?;
    Ok(0)
}

/// Apply one serialized transform step, returning the new solution and the
/// coefficient function it solves against.
fn apply_entry(
    sol: &EmpSolution,
    entry: &TransformEntry,
    grid: &Grid,
    dcfg: &DarbouxConfig,
) -> Result<(EmpSolution, Potential, &'static str)> {
    match entry.order {
        1 => {
            let spec = entry.superpotential.as_ref().ok_or_else(|| {
                Error::Config("order-1 transform entry needs 'superpotential'".into())
            })?;
            if entry.f.is_some() || entry.d.is_some() || entry.c.is_some() {
                return Err(Error::Config(
                    "order-1 transform entry takes only 'superpotential'".into(),
                ));
            }
            let w = build_superpotential(spec, grid.interval)?;
            let out = transform_first_order(sol, &w, sol.energy, dcfg)?;
            let (_, vt) = partner_pair_first_order(&w);
            Ok((out, vt, "first-order"))
        }
        2 => {
            let spec = entry
                .f
                .as_ref()
                .ok_or_else(|| Error::Config("order-2 transform entry needs 'f'".into()))?;
            if entry.superpotential.is_some() {
                return Err(Error::Config(
                    "order-2 transform entry takes 'f', not 'superpotential'".into(),
                ));
            }
            match (entry.d, entry.c) {
                (Some(d), None) => {
                    let g = build_generating(spec, grid.interval, d)?;
                    let out = transform_second_order(sol, &g, sol.energy, dcfg)?;
                    let (_, vt, _) =
                        partner_pair_second_order(&g, grid, dcfg.singularity_floor)?;
                    Ok((out, vt, "second-order"))
                }
                (None, Some(c)) => {
                    let g = build_generating(spec, grid.interval, -c * c / 4.0)?;
                    let out = transform_chain_two(sol, &g, c, sol.energy, dcfg)?;
                    let vt = chain_partner_potential(&g, c, grid, dcfg.singularity_floor)?;
                    Ok((out, vt, "chain"))
                }
                _ => Err(Error::Config(
                    "order-2 transform entry needs exactly one of 'd' or 'c'".into(),
                )),
            }
        }
        other => Err(Error::Config(format!("transform order must be 1 or 2, got {other}"))),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_chain(
    v: &Potential,
    grid: &Grid,
    energy: f64,
    f: &FunctionSpec,
    c: f64,
    rho0: Option<f64>,
    rho0_prime: f64,
    opts: &OdeOptions,
    dcfg: &DarbouxConfig,
    out_dir: &Path,
) -> Result<i32> {
    let g = build_generating(f, grid.interval, -c * c / 4.0)?;
    let input = build_rho(v, grid, energy, rho0, rho0_prime, None, opts)?;
    report::emp_csv(&input, v, &out_dir.join("emp_input.csv"))?;

    let direct = transform_chain_two(&input, &g, c, energy, dcfg)?;
    let composed = compose_chain_two(&input, &g, c, energy, dcfg)?;
    let vt = chain_partner_potential(&g, c, grid, dcfg.singularity_floor)?;
    report::emp_csv(&direct, &vt, &out_dir.join("emp_chain_direct.csv"))?;
    report::emp_csv(&composed, &vt, &out_dir.join("emp_chain_composed.csv"))?;

    let max_diff = direct
        .rho
        .iter()
        .zip(&composed.rho)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    report::json_report(
        "chain",
        &json!({
            "energy": energy,
            "c": c,
            "max_residual_direct": emp_residual(&direct, &vt),
            "max_residual_composed": emp_residual(&composed, &vt),
            "max_direct_vs_composed": max_diff,
        }),
        &out_dir.join("report.json"),
    )?;
    Ok(0)
}

fn run_spectrum(
    v: &Potential,
    grid: &Grid,
    n_max: usize,
    bracket: (f64, f64),
    opts: &OdeOptions,
    out_dir: &Path,
) -> Result<i32> {
    let report_data = find_bound_states(v, grid, n_max, bracket, opts)?;
    report::spectrum_csv(&report_data, &out_dir.join("spectrum.csv"))?;
    report::scan_csv(&report_data, &out_dir.join("scan.csv"))?;
    report::json_report("spectrum", &report_data, &out_dir.join("report.json"))?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn run_invariant(
    v: &Potential,
    grid: &Grid,
    energy: f64,
    coefficients: Option<EmpCoefficients>,
    alpha: f64,
    beta: f64,
    x0: Option<f64>,
    opts: &OdeOptions,
    out_dir: &Path,
) -> Result<i32> {
    let rho = build_rho(v, grid, energy, None, 0.0, coefficients, opts)?;
    let params = AmplitudePhaseParams {
        alpha,
        beta,
        x0: x0.unwrap_or_else(|| grid.midpoint()),
    };
    let psi = amplitude_phase_wavefunction(&rho, &params)?;
    let invariant = lewis_invariant(&psi, &rho)?;
    let sample = quantum_number(&rho);

    report::emp_csv(&rho, v, &out_dir.join("emp.csv"))?;
    report::wavefunction_csv(&psi, &out_dir.join("psi.csv"))?;
    report::json_report(
        "invariant",
        &json!({
            "E": energy,
            "N": sample.n_value,
            "I": invariant.value,
            "deviations": {
                "invariant_max": invariant.max_deviation,
                "invariant_relative": invariant.relative_deviation,
                "schrodinger_residual": psi.residual(v),
                "emp_residual": emp_residual(&rho, v),
            },
        }),
        &out_dir.join("report.json"),
    )?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify-squarewell
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    println!("{} {name}: {detail}", if passed { "PASS" } else { "FAIL" });
    Check {
        name,
        passed,
        detail,
    }
}

/// Reproduce the square-well reference calculations end to end and print a
/// pass/fail table.
fn run_verify(out_dir: &Path, opts: &OdeOptions, dcfg: &DarbouxConfig) -> Result<i32> {
    let mut checks = Vec::new();

    // Bound-state energies E_n = n(n+2), n = 0..4.
    {
        let grid = squarewell::well_grid(0.0, 4001);
        let v = squarewell::potential(grid.interval);
        let rep = find_bound_states(&v, &grid, 4, (-0.9, 26.0), opts)?;
        let worst = rep
            .levels
            .iter()
            .map(|l| (l.energy - (l.n * (l.n + 2)) as f64).abs())
            .fold(0.0, f64::max);
        checks.push(check(
            "spectrum E_n = n(n+2)",
            rep.levels.len() == 5 && worst < 1e-6,
            format!("max |dE| = {worst:.2e}"),
        ));
    }

    // Partner spectrum: E~_n = E_{n+1}.
    {
        let grid = squarewell::well_grid(1e-4, 4001);
        let vt = squarewell::partner_potential(grid.interval);
        let rep = find_bound_states(&vt, &grid, 3, (2.5, 26.0), opts)?;
        let worst = rep
            .levels
            .iter()
            .map(|l| (l.energy - ((l.n + 1) * (l.n + 3)) as f64).abs())
            .fold(0.0, f64::max);
        checks.push(check(
            "partner spectrum E~_n = E_{n+1}",
            rep.levels.len() == 4 && worst < 1e-6,
            format!("max |dE| = {worst:.2e}"),
        ));
    }

    // First-order transform against the closed form gamma (k^2 + tan^2 x).
    {
        let grid = squarewell::well_grid(1e-4, 2001);
        let w = squarewell::superpotential(grid.interval);
        let mut worst = 0.0_f64;
        for k in 2..=6 {
            let rho = squarewell::oracle_rho(k, &grid)?;
            let out = transform_first_order(&rho, &w, rho.energy, dcfg)?;
            let oracle = squarewell::oracle_rho_tilde(k, &grid)?;
            for i in 0..grid.n_points {
                worst = worst.max((out.rho[i] - oracle.rho[i]).abs());
            }
        }
        checks.push(check(
            "transform matches gamma(k^2 + tan^2 x)",
            worst < 1e-10,
            format!("max |rho - oracle| = {worst:.2e}, k = 2..6"),
        ));
    }

    // Round trip and the auxiliary equality.
    {
        let grid = squarewell::well_grid(1e-2, 2001);
        let w = squarewell::superpotential(grid.interval);
        let rho = squarewell::oracle_rho(3, &grid)?;
        let up = transform_first_order(&rho, &w, rho.energy, dcfg)?;
        let back = transform_inverse(&up, &w, rho.energy, dcfg)?;
        let rt = rho
            .rho
            .iter()
            .zip(&back.rho)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let aux = crate::darboux::auxiliary_equality_residual(&rho, &up, &w);
        checks.push(check(
            "inverse transform round trip",
            rt < 1e-8 && aux < 1e-8,
            format!("round trip {rt:.2e}, auxiliary equality {aux:.2e}"),
        ));
    }

    // Ermakov-Lewis invariant: constancy and preservation.
    {
        let grid = squarewell::well_grid(1e-2, 2001);
        let w = squarewell::superpotential(grid.interval);
        let mut worst = 0.0_f64;
        for k in 2..=6 {
            let kf = k as f64;
            let e = kf * kf - 1.0;
            let psi = crate::schrodinger::Wavefunction {
                grid: grid.clone(),
                psi: grid.points().map(|x| (kf * (x + FRAC_PI_2)).sin()).collect(),
                psi_prime: grid
                    .points()
                    .map(|x| kf * (kf * (x + FRAC_PI_2)).cos())
                    .collect(),
                energy: e,
            };
            let rho = squarewell::oracle_rho(k, &grid)?;
            let before = lewis_invariant(&psi, &rho)?;
            let psi_t = map_wavefunction_first(&psi, &w)?;
            let rho_t = transform_first_order(&rho, &w, e, dcfg)?;
            let after = lewis_invariant(&psi_t, &rho_t)?;
            worst = worst
                .max(before.relative_deviation)
                .max(after.relative_deviation)
                .max((after.value - before.value).abs() / before.value.abs());
        }
        checks.push(check(
            "Ermakov-Lewis invariant preserved",
            worst < 1e-7,
            format!("worst deviation {worst:.2e}, k = 2..6"),
        ));
    }

    // Quantum-number shift N = N~ + 1.
    {
        let grid = squarewell::well_grid(1e-4, 4001);
        let w = squarewell::superpotential(grid.interval);
        let mut ok = true;
        let mut detail = String::new();
        for k in 2..=4 {
            let rho = squarewell::oracle_rho(k, &grid)?;
            let rho_t = transform_first_order(&rho, &w, rho.energy, dcfg)?;
            let shift = quantum_number_shift(&quantum_number(&rho), &quantum_number(&rho_t))?;
            ok &= shift == 1;
            detail.push_str(&format!("k={k}: +{shift} "));
        }
        checks.push(check("quantum-number shift +1", ok, detail.trim().to_string()));
    }

    let all_passed = checks.iter().all(|c| c.passed);
    report::json_report(
        "verify-squarewell",
        &json!({ "passed": all_passed, "checks": checks }),
        &out_dir.join("report.json"),
    )?;
    Ok(if all_passed { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> std::result::Result<RunConfig, serde_json::Error> {
        serde_json::from_str(text)
    }

    #[test]
    fn minimal_spectrum_config_parses() {
        let cfg = parse(
            r#"{
                "potential": {"name": "square_well"},
                "grid": {"lo": -1.5707963, "hi": 1.5707963, "n_points": 101},
                "task": {"name": "spectrum", "n_max": 2, "e_min": -0.9, "e_max": 10.0}
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.task.name(), "spectrum");
        assert!(matches!(
            cfg.potential,
            Some(PotentialSpec::Direct(FunctionSpec::SquareWell { .. }))
        ));
    }

    #[test]
    fn derived_potential_parses() {
        let cfg = parse(
            r#"{
                "potential": {"superpotential": {"name": "tan"}, "partner": true},
                "grid": {"lo": -1.5, "hi": 1.5, "margin": 0.01, "n_points": 64},
                "task": {"name": "solve-emp", "energy": 3.0}
            }"#,
        )
        .unwrap();
        assert!(matches!(
            cfg.potential,
            Some(PotentialSpec::Derived { partner: true, .. })
        ));
    }

    #[test]
    fn unknown_fields_rejected() {
        assert!(parse(
            r#"{
                "potential": {"name": "square_well"},
                "grid": {"lo": 0, "hi": 1, "n_points": 32},
                "task": {"name": "spectrum", "n_max": 1, "e_min": 0, "e_max": 5},
                "bogus": 1
            }"#,
        )
        .is_err());
        assert!(parse(
            r#"{
                "potential": {"name": "square_well", "width": 2},
                "grid": {"lo": 0, "hi": 1, "n_points": 32},
                "task": {"name": "spectrum", "n_max": 1, "e_min": 0, "e_max": 5}
            }"#,
        )
        .is_err());
    }

    #[test]
    fn missing_task_parameter_rejected() {
        assert!(parse(
            r#"{
                "potential": {"name": "square_well"},
                "grid": {"lo": 0, "hi": 1, "n_points": 32},
                "task": {"name": "spectrum", "n_max": 1}
            }"#,
        )
        .is_err());
    }

    #[test]
    fn transform_entry_validation() {
        let g = Grid::new(Interval::new(-1.0, 1.0, 0.0).unwrap(), 64).unwrap();
        let v = Potential::constant(0.0, g.interval, "free");
        let sol = integrate_emp(&v, 1.0, &g, 1.0, 0.0, &OdeOptions::default()).unwrap();
        let entry = TransformEntry {
            order: 2,
            superpotential: None,
            f: Some(FunctionSpec::Linear {
                slope: 0.0,
                intercept: 1.0,
            }),
            d: Some(1.0),
            c: Some(2.0),
        };
        assert!(matches!(
            apply_entry(&sol, &entry, &g, &DarbouxConfig::default()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn tabulated_potential_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.csv");
        let mut text = String::from("x,value\n");
        for i in 0..=200 {
            let x = -1.5 + 3.0 * i as f64 / 200.0;
            text.push_str(&format!("{x},{}\n", x * x));
        }
        std::fs::write(&path, text).unwrap();
        let spec = FunctionSpec::CustomTabulated { file: path };
        let (f, _, _) = build_scalar(&spec).unwrap();
        for x in [-1.2, -0.3, 0.0, 0.7, 1.4] {
            assert!((f(x) - x * x).abs() < 1e-4, "spline mismatch at {x}");
        }
    }
}
