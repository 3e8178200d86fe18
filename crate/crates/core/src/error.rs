use std::path::PathBuf;

/// Errors surfaced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Lattice too large for the dense representation.
    #[error("lattice with {sites} sites exceeds the dense capacity of {max} sites")]
    Capacity { sites: usize, max: usize },

    /// An operation's precondition was violated by the caller.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A matrix expected to be Hermitian was not, within tolerance.
    #[error("matrix `{label}` is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { label: String, deviation: f64 },

    /// The spectrum is a single point, so quantities like the timestep are undefined.
    #[error("spectral range is zero; the requested quantity is undefined")]
    DegenerateSpectrum,

    /// Thresholding removed every direction of the overlap matrix.
    #[error("thresholding at {epsilon:.3e} removed every overlap eigenvector")]
    AllRemoved { epsilon: f64 },

    /// A normalizing quantity was zero.
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    /// The chosen coordinate direction has nonpositive noisy norm.
    #[error("coordinate direction has nonpositive noisy norm; cannot rescale")]
    DegenerateDirection,

    /// The requested bound parameters violate the bound's hypotheses.
    #[error("bound parameters infeasible: {0}")]
    Infeasible(String),

    /// A quantity the construction guarantees came out wrong; indicates a bug.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    /// Iterative eigensolver ran out of iterations.
    #[error("eigensolver failed to converge within {0} iterations")]
    NoConvergence(usize),

    /// Invalid experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Filesystem failure, with the offending path attached.
    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
