use thiserror::Error;

/// Errors produced by the numerical kernels, solvers and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("admissibility violated: {0}")]
    Admissibility(String),

    #[error("Mittag-Leffler evaluation failed for alpha={alpha}, beta={beta}, z={z}: {reason}")]
    Evaluation { alpha: f64, beta: f64, z: f64, reason: String },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("singular evaluation: {0}")]
    Singularity(String),

    #[error("Picard iteration did not reach tol={tol:e} within {max_iter} iterations (last increment {last:e})")]
    Convergence { tol: f64, max_iter: usize, last: f64, history: Vec<f64> },

    #[error("s={s} is outside the admissible set: |L lambda(s)|={transform:e} is below the threshold {threshold:e}")]
    SigmaMembership { s: f64, transform: f64, threshold: f64 },

    #[error("discrete Dirichlet problem is not solvable: {0}")]
    Solvability(String),

    #[error("ill-conditioned inner least-squares system (condition number {condition:e}): {detail}")]
    Conditioning { condition: f64, detail: String },

    #[error("degenerate symbol data: {0}")]
    Degenerate(String),

    #[error("exponent fit failed: {reason}")]
    Fit { reason: String, trace: Vec<f64> },

    #[error("no candidate term count fits below the residual ceiling {ceiling:e} (ladder {ladder:?})")]
    NoModel { ceiling: f64, ladder: Vec<f64> },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { field: field.into(), message: message.into() }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Admissibility(_) => 2,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
