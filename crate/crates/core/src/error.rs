use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Every variant maps to one process exit code (see [`Error::exit_code`]),
/// so library failures surface unchanged through the command-line runner.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation
    /// (non positive-definite tensor, degenerate coefficient, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Evaluation on (or within the cutoff distance of) a declared singular set.
    #[error("evaluation at {point:?} lies on the singular set {set}")]
    SingularSet { point: [f64; 3], set: String },

    /// A parameter violates its documented range.
    #[error("parameter `{name}` = {value} violates {constraint}")]
    Parameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// The frequency (or energy) sits on an eigenvalue of the problem.
    #[error("resonance at {what} = {value} (degree l = {degree}, condition estimate {condition:.3e})")]
    Resonance {
        what: &'static str,
        value: f64,
        degree: u32,
        condition: f64,
    },

    /// A theorem hypothesis required by a sweep does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Integrator or root finder failure.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Internal consistency check failed (for instance an infeasible laminate).
    #[error("internal consistency error: {0}")]
    Consistency(String),

    /// Malformed or out-of-range experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit status: 2 config, 3 resonance, 4 numerical, 5 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parameter { .. } => 2,
            Error::Resonance { .. } | Error::Precondition(_) => 3,
            Error::Io { .. } => 5,
            Error::Domain(_)
            | Error::SingularSet { .. }
            | Error::Numerical(_)
            | Error::Consistency(_) => 4,
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
