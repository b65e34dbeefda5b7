//! Experiment configuration, execution and artifact export.
//!
//! A run reads one JSON config, evaluates one experiment, writes its CSV
//! series into `output_dir` and finishes with `manifest.json`, which lists
//! every output file with its SHA-256. Checks that fail are reported as
//! invariant violations after the artifacts are on disk.

use crate::error::{Error, Result};
use crate::experiments::{
    ball_average, fit_uniform_kernel_bound, forcing_kernel_samples, green_function, limiting_amplitude_r3,
    stabilization_run, subordination_transform, uniform_kernel_violations, BallAverageMethod, BallAverageReport,
    CauchyData, CompactSource, InitialData, RatioPoint, StabilizationRoute,
};
use crate::fit::loglog_fit;
use crate::kernels::{
    bound_violations, envelope, f_alpha_half, fit_bound, gamma_kernel_with, z1_closed_form, z1_closed_form_derivative,
    z2_closed_form, BoundKind, BoundParams, BoundSample, KernelPath,
};
use crate::specfun::gamma::{gamma, rgamma};
use crate::specfun::{
    macdonald_k, mittag_leffler, wright_density, wright_phi, ComplexSample, FracParams, Regime,
};
use crate::spectral::{evolve_field, geometric_schedule, limiting_amplitude_operator, FiniteSpectralOperator, LatticeField};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsSpec {
    pub alpha: f64,
    pub omega: f64,
}

/// t_j = t0 · factor^j for j < count.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub t0: f64,
    pub factor: f64,
    pub count: usize,
}

impl ScheduleSpec {
    pub fn times(&self) -> Vec<f64> {
        geometric_schedule(self.t0, self.factor, self.count)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Final |ratio - target| / |target| in limiting_amplitude_r3.
    pub residual: f64,
    /// Final normalized residual in limiting_amplitude_operator.
    pub operator_residual: f64,
    /// Relative deviation allowed between fitted and predicted decay exponents.
    pub exponent: f64,
    /// Subordinated value against the heat symbol.
    pub heat: f64,
    /// Ball-average tail spread and distance to the expected limit.
    pub ball: f64,
    /// Spread above which a tail counts as oscillating.
    pub noise_floor: f64,
    /// Deviation allowed for data that must be preserved exactly.
    pub exact: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            residual: 0.05,
            operator_residual: 1e-2,
            exponent: 0.15,
            heat: 1e-4,
            ball: 0.05,
            noise_floor: 0.1,
            exact: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    pub radii: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    20_000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundedKernel {
    Z1,
    Z1Derivative,
    Z2,
    Y,
    /// k(t, x) = ∫₀^t Γ(x, t-τ) φ_ω(τ) dτ against C/|x|.
    ForcingKernel,
}

impl BoundedKernel {
    fn label(self) -> &'static str {
        match self {
            BoundedKernel::Z1 => "z1",
            BoundedKernel::Z1Derivative => "z1_derivative",
            BoundedKernel::Z2 => "z2",
            BoundedKernel::Y => "y",
            BoundedKernel::ForcingKernel => "forcing_kernel",
        }
    }

    fn bound_kind(self) -> Option<BoundKind> {
        match self {
            BoundedKernel::Z1 => Some(BoundKind::Z1),
            BoundedKernel::Z1Derivative => Some(BoundKind::Z1Derivative),
            BoundedKernel::Z2 => Some(BoundKind::Z2),
            BoundedKernel::Y => Some(BoundKind::Y),
            BoundedKernel::ForcingKernel => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpecfunCall {
    pub function: String,
    pub args: Vec<f64>,
}

fn default_sigma_fraction() -> f64 {
    0.8
}

fn default_safety() -> f64 {
    1.5
}

fn default_probe() -> f64 {
    0.3
}

/// The experiment and its specific inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum ExperimentSpec {
    LimitingAmplitudeOperator {
        eigenvalues: Vec<f64>,
        /// Forcing coefficients as [re, im]; all ones when omitted.
        #[serde(default)]
        weights: Option<Vec<Complex64>>,
    },
    LimitingAmplitudeR3 {
        #[serde(default)]
        forcing: Option<CompactSource>,
        #[serde(default)]
        u0: Option<CompactSource>,
        #[serde(default)]
        u1: Option<CompactSource>,
        probes: Vec<[f64; 3]>,
    },
    Stabilization {
        data: InitialData,
        probes: Vec<[f64; 3]>,
        route: StabilizationRoute,
        #[serde(default)]
        ball: Option<BallSpec>,
    },
    SubordinationCheck {
        /// |ξ₀| of each single-mode datum e^{iξ₀x}.
        wave_numbers: Vec<f64>,
        times: Vec<f64>,
        #[serde(default = "default_probe")]
        probe: f64,
    },
    KernelValidation {
        kinds: Vec<BoundedKernel>,
        calibration: GridSpec,
        validation: GridSpec,
        #[serde(default = "default_sigma_fraction")]
        sigma_fraction: f64,
        #[serde(default = "default_safety")]
        safety: f64,
    },
    SpecfunEval {
        evaluations: Vec<SpecfunCall>,
    },
}

impl ExperimentSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentSpec::LimitingAmplitudeOperator { .. } => "limiting_amplitude_operator",
            ExperimentSpec::LimitingAmplitudeR3 { .. } => "limiting_amplitude_r3",
            ExperimentSpec::Stabilization { .. } => "stabilization",
            ExperimentSpec::SubordinationCheck { .. } => "subordination_check",
            ExperimentSpec::KernelValidation { .. } => "kernel_validation",
            ExperimentSpec::SpecfunEval { .. } => "specfun_eval",
        }
    }

    fn needs_schedule(&self) -> bool {
        matches!(
            self,
            ExperimentSpec::LimitingAmplitudeOperator { .. }
                | ExperimentSpec::LimitingAmplitudeR3 { .. }
                | ExperimentSpec::Stabilization { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(flatten)]
    pub experiment: ExperimentSpec,
    pub params: ParamsSpec,
    #[serde(default)]
    pub schedule: Option<ScheduleSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: PathBuf,
}

fn config_error(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        message: message.into(),
    }
}

/// Re-roots an error from a module precondition at a config field.
fn at(path: &str, e: Error) -> Error {
    match e {
        Error::InvalidArgument { name, reason } => config_error(format!("{path}.{name}"), reason),
        Error::NonFinite(what) => config_error(path, format!("non-finite value in {what}")),
        other => config_error(path, other.to_string()),
    }
}

fn check_points(path: &str, points: &[[f64; 3]]) -> Result<()> {
    if points.is_empty() {
        return Err(config_error(path, "at least one point is required"));
    }
    for (i, p) in points.iter().enumerate() {
        if p.iter().any(|v| !v.is_finite()) {
            return Err(config_error(format!("{path}[{i}]"), "coordinates must be finite"));
        }
    }
    Ok(())
}

fn check_ascending(path: &str, values: &[f64], min_len: usize) -> Result<()> {
    if values.len() < min_len {
        return Err(config_error(path, format!("at least {min_len} entries are required")));
    }
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(config_error(path, "entries must be positive, finite and strictly ascending"));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn frac_params(&self) -> Result<FracParams> {
        FracParams::new(self.params.alpha, self.params.omega).map_err(|e| at("params", e))
    }

    /// Checks every precondition, reporting the offending field path.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_error(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        self.frac_params()?;
        let tol = &self.tolerances;
        for (name, v) in [
            ("residual", tol.residual),
            ("operator_residual", tol.operator_residual),
            ("exponent", tol.exponent),
            ("heat", tol.heat),
            ("ball", tol.ball),
            ("noise_floor", tol.noise_floor),
            ("exact", tol.exact),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(config_error(format!("tolerances.{name}"), format!("{v} must be positive")));
            }
        }
        match (&self.schedule, self.experiment.needs_schedule()) {
            (None, true) => return Err(config_error("schedule", "this experiment needs a t-schedule")),
            (Some(s), _) => {
                if !(s.t0.is_finite() && s.t0 > 0.0) {
                    return Err(config_error("schedule.t0", format!("{} must be positive", s.t0)));
                }
                if !(s.factor.is_finite() && s.factor > 1.0) {
                    return Err(config_error("schedule.factor", format!("{} must exceed 1", s.factor)));
                }
                if s.count < 2 {
                    return Err(config_error("schedule.count", "at least two times are required"));
                }
            }
            (None, false) => {}
        }
        match &self.experiment {
            ExperimentSpec::LimitingAmplitudeOperator { eigenvalues, weights } => {
                let w = weights.clone().unwrap_or_else(|| vec![Complex64::new(1.0, 0.0); eigenvalues.len()]);
                FiniteSpectralOperator::new(eigenvalues.clone(), w).map_err(|e| at("eigenvalues", e))?;
                if let Some(i) = eigenvalues.iter().position(|l| *l <= 0.0) {
                    return Err(config_error(format!("eigenvalues[{i}]"), "must be positive"));
                }
            }
            ExperimentSpec::LimitingAmplitudeR3 { forcing, u0, u1, probes } => {
                for (name, s) in [("forcing", forcing), ("u0", u0), ("u1", u1)] {
                    if let Some(s) = s {
                        s.validate().map_err(|e| at(name, e))?;
                    }
                }
                if forcing.is_none() && u0.is_none() && u1.is_none() {
                    return Err(config_error("forcing", "at least one of forcing, u0, u1 is required"));
                }
                check_points("probes", probes)?;
                if forcing.is_some() && self.schedule.is_some_and(|s| s.count < 4) {
                    return Err(config_error("schedule.count", "the tail check needs at least four times"));
                }
            }
            ExperimentSpec::Stabilization { data, probes, route, ball } => {
                data.validate().map_err(|e| at("data", e))?;
                check_points("probes", probes)?;
                if let StabilizationRoute::Torus {
                    points_per_axis,
                    spacing,
                    wrap_tol,
                } = route
                {
                    if *points_per_axis == 0 || *points_per_axis > 512 {
                        return Err(config_error("route.points_per_axis", "must lie in 1..=512"));
                    }
                    if !(spacing.is_finite() && *spacing > 0.0) {
                        return Err(config_error("route.spacing", "must be positive"));
                    }
                    if !(*wrap_tol > 0.0 && *wrap_tol < 1.0) {
                        return Err(config_error("route.wrap_tol", "must lie in (0, 1)"));
                    }
                }
                if matches!(data, InitialData::LogPeriodicBlocks { .. }) && probes.iter().any(|p| p != &[0.0; 3]) {
                    return Err(config_error("probes", "radial block data is probed at the origin only"));
                }
                if let Some(b) = ball {
                    check_ascending("ball.radii", &b.radii, 2)?;
                    if b.samples < 2 {
                        return Err(config_error("ball.samples", "at least two samples are required"));
                    }
                }
            }
            ExperimentSpec::SubordinationCheck {
                wave_numbers,
                times,
                probe,
            } => {
                if wave_numbers.is_empty() || wave_numbers.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
                    return Err(config_error("wave_numbers", "entries must be positive and finite"));
                }
                check_ascending("times", times, 1)?;
                if !probe.is_finite() {
                    return Err(config_error("probe", "must be finite"));
                }
            }
            ExperimentSpec::KernelValidation {
                kinds,
                calibration,
                validation,
                sigma_fraction,
                safety,
            } => {
                if kinds.is_empty() {
                    return Err(config_error("kinds", "at least one kernel is required"));
                }
                for (name, g) in [("calibration", calibration), ("validation", validation)] {
                    check_ascending(&format!("{name}.times"), &g.times, 1)?;
                    check_ascending(&format!("{name}.radii"), &g.radii, 1)?;
                }
                if !(*sigma_fraction > 0.0 && *sigma_fraction <= 1.0) {
                    return Err(config_error("sigma_fraction", "must lie in (0, 1]"));
                }
                if !(safety.is_finite() && *safety >= 1.0) {
                    return Err(config_error("safety", "must be at least 1"));
                }
            }
            ExperimentSpec::SpecfunEval { evaluations } => {
                if evaluations.is_empty() {
                    return Err(config_error("evaluations", "at least one evaluation is required"));
                }
                for (i, c) in evaluations.iter().enumerate() {
                    if !SPECFUN_NAMES.contains(&c.function.as_str()) {
                        return Err(config_error(
                            format!("evaluations[{i}].function"),
                            format!("unknown function `{}` (known: {})", c.function, SPECFUN_NAMES.join(", ")),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Names accepted by [`specfun_eval`].
pub const SPECFUN_NAMES: &[&str] = &[
    "mittag_leffler",
    "macdonald_k",
    "wright_phi",
    "wright_density",
    "gamma",
    "rgamma",
    "gamma_kernel",
    "z1_kernel",
    "z2_kernel",
    "green_function",
    "f_alpha_half",
];

fn arity(name: &str, args: &[f64], allowed: &[usize], usage: &str) -> Result<()> {
    if allowed.contains(&args.len()) {
        Ok(())
    } else {
        Err(Error::InvalidArgument {
            name: "args",
            reason: format!("{name} takes {usage}"),
        })
    }
}

fn complex_arg(args: &[f64], i: usize) -> Complex64 {
    Complex64::new(args[i], args.get(i + 1).copied().unwrap_or(0.0))
}

fn exact(v: f64) -> ComplexSample {
    ComplexSample::new(Complex64::new(v, 0.0), 0.0, Regime::Series)
}

/// Point evaluation of a named special function or kernel.
pub fn specfun_eval(name: &str, args: &[f64]) -> Result<ComplexSample> {
    match name {
        "mittag_leffler" => {
            arity(name, args, &[3, 4], "alpha beta z_re [z_im]")?;
            mittag_leffler(args[0], args[1], complex_arg(args, 2))
        }
        "macdonald_k" => {
            arity(name, args, &[2, 3], "nu z_re [z_im]")?;
            macdonald_k(args[0], complex_arg(args, 1))
        }
        "wright_phi" => {
            arity(name, args, &[3, 4], "rho delta z_re [z_im]")?;
            wright_phi(args[0], args[1], complex_arg(args, 2))
        }
        "wright_density" => {
            arity(name, args, &[2], "alpha z")?;
            wright_density(args[0], args[1])
        }
        "gamma" => {
            arity(name, args, &[1], "x")?;
            Ok(exact(gamma(args[0])))
        }
        "rgamma" => {
            arity(name, args, &[1], "x")?;
            Ok(exact(rgamma(args[0])))
        }
        "gamma_kernel" => {
            arity(name, args, &[4], "alpha n r t")?;
            gamma_kernel_with(args[0], dim_arg(args[1])?, args[2], args[3], KernelPath::Auto)
        }
        "z1_kernel" => {
            arity(name, args, &[3], "alpha r t")?;
            z1_closed_form(args[0], args[1], args[2])
        }
        "z2_kernel" => {
            arity(name, args, &[3], "alpha r t")?;
            z2_closed_form(args[0], args[1], args[2])
        }
        "green_function" => {
            arity(name, args, &[3, 4], "alpha omega r [n]")?;
            let n = if args.len() == 4 { dim_arg(args[3])? } else { 3 };
            green_function(&FracParams::new(args[0], args[1])?, args[2], n)
        }
        "f_alpha_half" => {
            arity(name, args, &[4], "alpha z mu delta")?;
            f_alpha_half(args[0], args[1], args[2], args[3])
        }
        _ => Err(Error::InvalidArgument {
            name: "function",
            reason: format!("unknown function `{name}` (known: {})", SPECFUN_NAMES.join(", ")),
        }),
    }
}

fn dim_arg(v: f64) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v <= 64.0 {
        Ok(v as usize)
    } else {
        Err(Error::invalid("n", format!("{v} is not a dimension")))
    }
}

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub experiment: String,
    pub fracwave_version: String,
    /// Seconds since the Unix epoch; the only field that changes between
    /// identical runs.
    pub created_unix: u64,
    pub config: ExperimentConfig,
    pub results: Value,
    pub checks: Vec<Check>,
    pub outputs: Vec<OutputFile>,
}

/// What an experiment produced before anything is written.
struct Outcome {
    files: Vec<(String, String)>,
    results: Value,
    checks: Vec<Check>,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub manifest_path: PathBuf,
    pub manifest: Manifest,
}

/// Runs the experiment, writes CSVs and the manifest, then fails with the
/// first violated check, if any.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    config.validate()?;
    let outcome = execute(config)?;
    std::fs::create_dir_all(&config.output_dir)?;
    let mut outputs = Vec::new();
    for (name, body) in &outcome.files {
        std::fs::write(config.output_dir.join(name), body)?;
        outputs.push(OutputFile {
            file: name.clone(),
            sha256: hex::encode(Sha256::digest(body.as_bytes())),
            bytes: body.len(),
        });
    }
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        experiment: config.experiment.name().to_string(),
        fracwave_version: env!("CARGO_PKG_VERSION").to_string(),
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config: config.clone(),
        results: outcome.results,
        checks: outcome.checks,
        outputs,
    };
    let manifest_path = config.output_dir.join("manifest.json");
    std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    if let Some(c) = manifest.checks.iter().find(|c| !c.passed) {
        return Err(Error::Invariant {
            invariant: c.name.clone(),
            detail: c.detail.clone(),
        });
    }
    Ok(RunSummary { manifest_path, manifest })
}

fn execute(config: &ExperimentConfig) -> Result<Outcome> {
    let params = config.frac_params()?;
    let times = config.schedule.map(|s| s.times()).unwrap_or_default();
    let tol = &config.tolerances;
    match &config.experiment {
        ExperimentSpec::LimitingAmplitudeOperator { eigenvalues, weights } => {
            let w = weights.clone().unwrap_or_else(|| vec![Complex64::new(1.0, 0.0); eigenvalues.len()]);
            let op = FiniteSpectralOperator::new(eigenvalues.clone(), w)?;
            run_operator(&op, &params, &times, tol)
        }
        ExperimentSpec::LimitingAmplitudeR3 { forcing, u0, u1, probes } => {
            let data = CauchyData {
                forcing: forcing.as_ref(),
                u0: u0.as_ref(),
                u1: u1.as_ref(),
            };
            run_r3(data, &params, probes, &times, tol)
        }
        ExperimentSpec::Stabilization { data, probes, route, ball } => {
            run_stabilization(data, &params, probes, route, ball.as_ref(), &times, config.seed, tol)
        }
        ExperimentSpec::SubordinationCheck {
            wave_numbers,
            times,
            probe,
        } => run_subordination(&params, wave_numbers, times, *probe, tol),
        ExperimentSpec::KernelValidation {
            kinds,
            calibration,
            validation,
            sigma_fraction,
            safety,
        } => run_kernel_validation(&params, kinds, calibration, validation, *sigma_fraction, *safety),
        ExperimentSpec::SpecfunEval { evaluations } => run_specfun(evaluations),
    }
}

fn run_operator(op: &FiniteSpectralOperator, params: &FracParams, times: &[f64], tol: &Tolerances) -> Result<Outcome> {
    let rep = limiting_amplitude_operator(op, params, times)?;
    let mut csv = String::from("t,residual,normalized\n");
    for p in &rep.points {
        writeln!(csv, "{},{},{}", p.t, p.residual, p.normalized).unwrap();
    }
    let first = rep.points[0].normalized;
    let last = rep.points[rep.points.len() - 1].normalized;
    let checks = vec![
        Check::new("residual_tail_monotone", rep.monotone_tail, "residual strictly decreasing over the second half"),
        Check::new(
            "residual_tail_slope_negative",
            rep.tail_slope.is_some_and(|s| s < 0.0),
            format!("log-log tail slope {:?}", rep.tail_slope),
        ),
        Check::new("residual_decreases", last < first, format!("normalized residual {first} -> {last}")),
        Check::new(
            "final_residual_below_tolerance",
            last < tol.operator_residual,
            format!("{last} vs {}", tol.operator_residual),
        ),
    ];
    Ok(Outcome {
        files: vec![("residuals.csv".into(), csv)],
        results: json!({
            "target": rep.target,
            "tail_slope": rep.tail_slope,
            "final_normalized_residual": last,
        }),
        checks,
    })
}

fn decay_check(name: &str, ts: &[f64], values: &[f64], expected: f64, rel_tol: f64) -> (Check, Option<f64>) {
    let k = ts.len() / 2;
    let slope = loglog_fit(&ts[k..], &values[k..]).map(|f| f.slope);
    let passed = slope.is_some_and(|s| (s - expected).abs() <= rel_tol * expected.abs());
    (
        Check::new(name, passed, format!("fitted exponent {slope:?} vs {expected} (relative tolerance {rel_tol})")),
        slope,
    )
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn run_r3(data: CauchyData<'_>, params: &FracParams, probes: &[[f64; 3]], times: &[f64], tol: &Tolerances) -> Result<Outcome> {
    let series: Vec<Vec<RatioPoint>> = probes
        .par_iter()
        .map(|x| limiting_amplitude_r3(data, params, x, times))
        .collect::<Result<_>>()?;
    let mut csv = String::from("probe,t,re,im,target_re,target_im,residual,u1_re,u2_re,u3_re,u3_im\n");
    let mut checks = Vec::new();
    let mut per_probe = Vec::new();
    let alpha = params.alpha;
    for (i, pts) in series.iter().enumerate() {
        for p in pts {
            writeln!(
                csv,
                "{i},{},{},{},{},{},{},{},{},{},{}",
                p.t,
                p.ratio.re,
                p.ratio.im,
                p.target.re,
                p.target.im,
                p.residual,
                p.initial_value_part.re,
                p.initial_velocity_part.re,
                p.forced_part.re,
                p.forced_part.im
            )
            .unwrap();
        }
        let mut summary = json!({ "x": probes[i] });
        if data.forcing.is_some() {
            let last = pts[pts.len() - 1];
            let rel = last.residual / last.target.norm();
            let res: Vec<f64> = pts.iter().map(|p| p.residual).collect();
            checks.push(Check::new(
                format!("probe{i}_final_relative_residual"),
                rel < tol.residual,
                format!("|ratio - target|/|target| = {rel} at t = {}", last.t),
            ));
            checks.push(Check::new(
                format!("probe{i}_residual_tail_decreasing"),
                strictly_decreasing(&res[res.len() - 4..]),
                format!("last four residuals {:?}", &res[res.len() - 4..]),
            ));
            summary["target"] = json!(last.target);
            summary["final_relative_residual"] = json!(rel);
        }
        if data.u0.is_some() {
            let v: Vec<f64> = pts.iter().map(|p| p.initial_value_part.norm()).collect();
            let (c, s) = decay_check(&format!("probe{i}_initial_value_decay"), times, &v, -alpha, tol.exponent);
            checks.push(c);
            summary["initial_value_exponent"] = json!(s);
        }
        if data.u1.is_some() {
            let v: Vec<f64> = pts.iter().map(|p| p.initial_velocity_part.norm()).collect();
            let (c, s) = decay_check(&format!("probe{i}_initial_velocity_decay"), times, &v, 1.0 - alpha, tol.exponent);
            checks.push(c);
            summary["initial_velocity_exponent"] = json!(s);
        }
        per_probe.push(summary);
    }
    Ok(Outcome {
        files: vec![("ratio.csv".into(), csv)],
        results: json!({ "probes": per_probe }),
        checks,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_stabilization(
    data: &InitialData,
    params: &FracParams,
    probes: &[[f64; 3]],
    route: &StabilizationRoute,
    ball: Option<&BallSpec>,
    times: &[f64],
    seed: u64,
    tol: &Tolerances,
) -> Result<Outcome> {
    let rep = stabilization_run(data, params, probes, times, route)?;
    let mut files = Vec::new();
    let mut csv = String::from("probe,t,value\n");
    for (i, p) in rep.probes.iter().enumerate() {
        for (t, v) in times.iter().zip(&p.values) {
            writeln!(csv, "{i},{t},{v}").unwrap();
        }
    }
    files.push(("probes.csv".to_string(), csv));
    let alpha = params.alpha;
    let mut checks = Vec::new();
    for (i, p) in rep.probes.iter().enumerate() {
        match data {
            InitialData::Constant { c } => {
                let worst = p.values.iter().map(|v| (v - c).abs()).fold(0.0, f64::max);
                checks.push(Check::new(
                    format!("probe{i}_constant_preserved"),
                    worst <= tol.exact * c.abs().max(1.0),
                    format!("max |u - c| = {worst}"),
                ));
            }
            InitialData::BumpPlusConstant { c, .. } | InitialData::PlaneWave { amplitude: c, .. } => {
                let limit = if matches!(data, InitialData::PlaneWave { .. }) { 0.0 } else { *c };
                let dev: Vec<f64> = p.values.iter().map(|v| (v - limit).abs()).collect();
                let scale = c.abs().max(1.0);
                if dev.iter().all(|d| *d <= tol.exact * scale) {
                    checks.push(Check::new(format!("probe{i}_at_limit"), true, "deviation at round-off throughout"));
                    continue;
                }
                let k = dev.len() / 2;
                checks.push(Check::new(
                    format!("probe{i}_deviation_tail_decreasing"),
                    strictly_decreasing(&dev[k..]),
                    format!("|u - {limit}| over the tail: {:?}", &dev[k..]),
                ));
                let (c, _) = decay_check(&format!("probe{i}_deviation_decay"), times, &dev, -alpha, tol.exponent);
                checks.push(c);
            }
            InitialData::LogPeriodicBlocks { .. } => {
                checks.push(Check::new(
                    format!("probe{i}_values_oscillate"),
                    p.tail_spread > tol.noise_floor,
                    format!("tail spread {} vs noise floor {}", p.tail_spread, tol.noise_floor),
                ));
            }
        }
    }
    let mut balls: Vec<BallAverageReport> = Vec::new();
    if let Some(spec) = ball {
        let mut csv = String::from("probe,radius,average,std_error\n");
        for (i, x0) in probes.iter().enumerate() {
            let method = match data {
                InitialData::LogPeriodicBlocks { .. } => BallAverageMethod::Radial {
                    breaks: data.radial_breaks(spec.radii[spec.radii.len() - 1]),
                },
                _ => BallAverageMethod::MonteCarlo {
                    samples: spec.samples,
                    seed,
                },
            };
            let b = ball_average(|x| data.value(x), *x0, &spec.radii, &method, tol.ball)?;
            for ((r, a), e) in b.radii.iter().zip(&b.averages).zip(&b.std_errors) {
                writeln!(csv, "{i},{r},{a},{e}").unwrap();
            }
            match rep.expected_limit {
                Some(c) => checks.push(Check::new(
                    format!("probe{i}_ball_average_limit"),
                    b.converged && (b.limit_estimate - c).abs() <= tol.ball,
                    format!("limit estimate {} (spread {}) vs {c}", b.limit_estimate, b.tail_spread),
                )),
                None => checks.push(Check::new(
                    format!("probe{i}_ball_averages_oscillate"),
                    b.tail_spread > tol.noise_floor,
                    format!("tail spread {} vs noise floor {}", b.tail_spread, tol.noise_floor),
                )),
            }
            balls.push(b);
        }
        files.push(("ball_averages.csv".to_string(), csv));
    }
    Ok(Outcome {
        files,
        results: json!({
            "expected_limit": rep.expected_limit,
            "probes": rep.probes.iter().map(|p| json!({
                "x": p.x,
                "limit_estimate": p.limit_estimate,
                "tail_spread": p.tail_spread,
                "deviation_slope": p.deviation_slope,
            })).collect::<Vec<_>>(),
            "ball_averages": balls.iter().map(|b| json!({
                "x0": b.x0,
                "limit_estimate": b.limit_estimate,
                "tail_spread": b.tail_spread,
                "converged": b.converged,
            })).collect::<Vec<_>>(),
        }),
        checks,
    })
}

/// Single-mode datum e^{iξx} on a one-dimensional lattice with one period.
fn single_mode_lattice(xi: f64) -> Result<LatticeField> {
    let n = 8;
    let spacing = 2.0 * PI / xi / n as f64;
    LatticeField::from_fn(&[n], spacing, |x| Complex64::from_polar(1.0, xi * x[0]))
}

fn run_subordination(params: &FracParams, wave_numbers: &[f64], times: &[f64], probe: f64, tol: &Tolerances) -> Result<Outcome> {
    let alpha = params.alpha;
    let mut csv = String::from("xi,t,re,im,heat_re,heat_im,abs_err\n");
    let mut checks = Vec::new();
    let mut worst = 0.0f64;
    for &xi in wave_numbers {
        let u0 = single_mode_lattice(xi)?;
        let traj = |s: f64| -> Result<Complex64> {
            if s == 0.0 {
                return u0.interpolate(&[probe]);
            }
            evolve_field(&u0, None, None, params, s)?.interpolate(&[probe])
        };
        let mut mags = Vec::new();
        for &t in times {
            let span = crate::experiments::required_span(alpha, t);
            let v = subordination_transform(traj, span, alpha, t)?;
            let heat = Complex64::from_polar((-xi * xi * t).exp(), xi * probe);
            worst = worst.max((v.value - heat).norm());
            mags.push(v.value.norm());
            writeln!(csv, "{xi},{t},{},{},{},{},{}", v.value.re, v.value.im, heat.re, heat.im, v.abs_err).unwrap();
        }
        checks.push(Check::new(
            format!("xi{xi}_stabilization_transfer"),
            strictly_decreasing(&mags),
            format!("|u₁(t)| along the times: {mags:?}"),
        ));
    }
    checks.insert(
        0,
        Check::new("heat_symbol_match", worst < tol.heat, format!("max |subordinated - heat| = {worst}")),
    );
    Ok(Outcome {
        files: vec![("subordination.csv".into(), csv)],
        results: json!({ "max_heat_error": worst }),
        checks,
    })
}

fn kernel_samples(kind: BoundedKernel, params: &FracParams, grid: &GridSpec) -> Result<Vec<BoundSample>> {
    let alpha = params.alpha;
    if kind == BoundedKernel::ForcingKernel {
        return forcing_kernel_samples(params, &grid.times, &grid.radii);
    }
    let pairs: Vec<(f64, f64)> = grid.times.iter().flat_map(|&t| grid.radii.iter().map(move |&r| (t, r))).collect();
    pairs
        .par_iter()
        .map(|&(t, r)| {
            let v = match kind {
                BoundedKernel::Z1 => z1_closed_form(alpha, r, t)?,
                BoundedKernel::Z1Derivative => z1_closed_form_derivative(alpha, r, t)?,
                BoundedKernel::Z2 => z2_closed_form(alpha, r, t)?,
                BoundedKernel::Y => gamma_kernel_with(alpha, 3, r, t, KernelPath::Auto)?,
                BoundedKernel::ForcingKernel => unreachable!(),
            };
            Ok(BoundSample {
                t,
                r,
                value: v.value.norm(),
            })
        })
        .collect()
}

fn run_kernel_validation(
    params: &FracParams,
    kinds: &[BoundedKernel],
    calibration: &GridSpec,
    validation: &GridSpec,
    sigma_fraction: f64,
    safety: f64,
) -> Result<Outcome> {
    let alpha = params.alpha;
    let mut csv = String::from("kind,grid,t,r,value,bound\n");
    let mut checks = Vec::new();
    let mut fitted = serde_json::Map::new();
    for &kind in kinds {
        let cal = kernel_samples(kind, params, calibration)?;
        let val = kernel_samples(kind, params, validation)?;
        let label = kind.label();
        let (bound_at, violations, constants): (Box<dyn Fn(&BoundSample) -> f64>, usize, Value) = match kind.bound_kind() {
            Some(bk) => {
                let Some(bp) = fit_bound(bk, alpha, 3, &cal, sigma_fraction, safety) else {
                    checks.push(Check::new(format!("{label}_bound_fit"), false, "no decay could be fitted"));
                    continue;
                };
                let BoundParams { c, sigma } = bp;
                let v = bound_violations(bk, alpha, 3, &bp, &val).len();
                (Box::new(move |s| c * envelope(bk, alpha, 3, sigma, s.t, s.r)), v, json!(bp))
            }
            None => {
                let c = fit_uniform_kernel_bound(&cal, safety);
                let v = uniform_kernel_violations(&val, c).len();
                (Box::new(move |s| c / s.r), v, json!({ "C": c }))
            }
        };
        for (grid, samples) in [("calibration", &cal), ("validation", &val)] {
            for s in samples {
                writeln!(csv, "{label},{grid},{},{},{},{}", s.t, s.r, s.value, bound_at(s)).unwrap();
            }
        }
        checks.push(Check::new(
            format!("{label}_bound_holds"),
            violations == 0,
            format!("{violations} violations on {} validation samples", val.len()),
        ));
        fitted.insert(label.to_string(), constants);
    }
    Ok(Outcome {
        files: vec![("kernel_bounds.csv".into(), csv)],
        results: json!({ "fitted": fitted }),
        checks,
    })
}

fn run_specfun(calls: &[SpecfunCall]) -> Result<Outcome> {
    let mut csv = String::from("function,args,re,im,abs_err,regime\n");
    let mut checks = Vec::new();
    for (i, c) in calls.iter().enumerate() {
        let v = specfun_eval(&c.function, &c.args).map_err(|e| at(&format!("evaluations[{i}]"), e))?;
        let args: Vec<String> = c.args.iter().map(|a| a.to_string()).collect();
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            c.function,
            args.join(";"),
            v.value.re,
            v.value.im,
            v.abs_err,
            v.regime
        )
        .unwrap();
        checks.push(Check::new(
            format!("evaluation{i}_finite"),
            v.value.re.is_finite() && v.value.im.is_finite() && v.abs_err.is_finite(),
            format!("{}({:?})", c.function, c.args),
        ));
    }
    Ok(Outcome {
        files: vec![("specfun.csv".into(), csv)],
        results: json!({ "count": calls.len() }),
        checks,
    })
}
