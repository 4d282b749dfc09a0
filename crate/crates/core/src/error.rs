use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Unsupported configuration (dimension range, grid spec, malformed input).
    #[error("configuration error: {0}")]
    Config(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated precondition was violated by the caller.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A shape operator failed strict convexity.
    #[error("not strictly convex{}", match node { Some(i) => format!(" at node {i}"), None => String::new() })]
    NotStrictlyConvex { node: Option<usize> },

    /// A finite-difference frame degenerated.
    #[error("not immersed: frame condition number {cond:.3e}")]
    NotImmersed { cond: f64 },

    /// Normal flow of a shape operator blows up before the requested distance.
    #[error("flow singularity at distance {critical:.6} (requested {requested:.6})")]
    FlowSingularity { critical: f64, requested: f64 },

    /// An iterative solver did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// A spherical domain of elliptic or parabolic type was passed where a
    /// hyperbolic-type domain is required.
    #[error("not hyperbolic type: {0}")]
    NotHyperbolicType(String),
}

pub type Result<T> = std::result::Result<T, Error>;
