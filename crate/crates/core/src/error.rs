use thiserror::Error;

/// Errors produced by evaluation routines, experiments and the runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("non-finite input to {0}")]
    NonFinite(&'static str),

    #[error("{what} did not reach tolerance {tol:e} (best abs_err {best_err:e})")]
    Convergence {
        what: &'static str,
        tol: f64,
        best_err: f64,
    },

    #[error("time stepper became unstable at step {step} (|y| = {norm:e})")]
    Unstable { step: usize, norm: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("torus of length {length} too small for t_max = {t_max} (need at least {required})")]
    DomainTooSmall {
        length: f64,
        t_max: f64,
        required: f64,
    },

    #[error("trajectory span {span} shorter than required {required}")]
    InsufficientSpan { span: f64, required: f64 },

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("invariant `{invariant}` violated: {detail}")]
    Invariant { invariant: String, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn ensure_finite(what: &'static str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
