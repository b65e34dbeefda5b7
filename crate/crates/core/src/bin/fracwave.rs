use clap::{Parser, Subcommand};
use fracwave::runner::{run, specfun_eval, ExperimentConfig};
use fracwave::Error;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

/// Experiments and point evaluations for the time-fractional diffusion-wave equation.
#[derive(Parser)]
#[command(name = "fracwave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run { config: PathBuf },
    /// Check a config without running it.
    Validate { config: PathBuf },
    /// Evaluate a special function, e.g. `specfun mittag_leffler 1 1 1.0`.
    Specfun {
        name: String,
        #[arg(allow_negative_numbers = true)]
        args: Vec<f64>,
    },
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidArgument { .. } => "invalid_argument",
        Error::NonFinite(_) => "non_finite",
        Error::Convergence { .. } => "convergence",
        Error::Unstable { .. } => "unstable",
        Error::ShapeMismatch(_) => "shape_mismatch",
        Error::DomainTooSmall { .. } => "domain_too_small",
        Error::InsufficientSpan { .. } => "insufficient_span",
        Error::Config { .. } => "config",
        Error::Invariant { .. } => "invariant",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

/// Machine-readable report on stderr.
fn report(e: &Error) -> ExitCode {
    let mut body = json!({ "error": error_kind(e), "message": e.to_string() });
    match e {
        Error::Config { path, .. } => body["path"] = json!(path),
        Error::Invariant { invariant, .. } => body["invariant"] = json!(invariant),
        Error::InvalidArgument { name, .. } => body["path"] = json!(name),
        _ => {}
    }
    eprintln!("{body}");
    ExitCode::from(match e {
        Error::Config { .. } | Error::InvalidArgument { .. } => 2,
        Error::Invariant { .. } => 3,
        _ => 1,
    })
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("FRACWAVE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Error::Config {
        path: "FRACWAVE_THREADS".into(),
        message: format!("`{raw}` is not a positive integer"),
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config {
            path: "FRACWAVE_THREADS".into(),
            message: e.to_string(),
        })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        return report(&e);
    }
    let result = match cli.command {
        Command::Run { config } => ExperimentConfig::load(&config).and_then(|c| run(&c)).map(|s| {
            let failed = s.manifest.checks.iter().filter(|c| !c.passed).count();
            println!(
                "{}: {} checks passed, {failed} failed; manifest at {}",
                s.manifest.experiment,
                s.manifest.checks.len() - failed,
                s.manifest_path.display()
            );
        }),
        Command::Validate { config } => ExperimentConfig::load(&config).and_then(|c| c.validate().map(|_| c)).map(|c| {
            println!("{}: valid", c.experiment.name());
        }),
        Command::Specfun { name, args } => specfun_eval(&name, &args).map(|v| {
            println!("value = {} {:+}i", v.value.re, v.value.im);
            println!("abs_err = {:e}", v.abs_err);
            println!("regime = {}", v.regime);
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
