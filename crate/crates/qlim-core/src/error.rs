use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input parameter fell outside its documented domain.
    #[error("{what} = {value} outside [{lo}, {hi}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A behavior whose derived probabilities leave [0, 1]; the point is
    /// outside the no-signalling polytope.
    #[error("derived probability P({a}{b}|{x}{y}) = {p} outside [0, 1]")]
    NegativeProbability { a: u8, b: u8, x: u8, y: u8, p: f64 },

    /// A probability table violating normalization or no-signalling.
    #[error("invalid probability table: {0}")]
    InvalidTable(String),

    /// Malformed domain input that is not a simple range violation.
    #[error("{0}")]
    Invalid(String),

    /// An iterative solver exceeded its iteration cap without settling.
    #[error("no convergence after {iterations} iterations ({context})")]
    NonConvergence {
        context: &'static str,
        iterations: usize,
    },

    /// The steady-state linear system was singular; indicates an assembly bug.
    #[error("steady-state linear system is singular (N = {n})")]
    SingularSystem { n: usize },

    /// Mean collective spin too small to define a squeezing direction.
    #[error("mean spin magnitude {0:.3e} too small to fix a direction")]
    ZeroMeanSpin(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
