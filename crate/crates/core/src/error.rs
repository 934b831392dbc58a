use thiserror::Error;

/// Errors raised by the spectral engine, the integrators and the studies.
#[derive(Debug, Error)]
pub enum Error {
    /// An operation was called on a field in the wrong space, or with
    /// otherwise inconsistent arguments.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The state became non-finite or exceeded the amplitude ceiling.
    /// This signals an under-resolved run.
    #[error("blow-up detected at step {step} (t = {time}): {reason}")]
    BlowUp { step: usize, time: f64, reason: String },

    #[error("fixed-point iteration failed to contract after {iterations} iterations (last residual {residual:e})")]
    NonContraction { iterations: usize, residual: f64 },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    /// Mass reached the outer shell of the box: the wave front is about to wrap.
    #[error("window error: {leaked:.3e} of the mass reached the outer shell at t = {time}; use a larger box")]
    Window { time: f64, leaked: f64 },

    #[error("horizon error: {0}")]
    Horizon(String),

    #[error("study failed for {parameter}: {source}")]
    Study {
        parameter: String,
        #[source]
        source: Box<Error>,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
