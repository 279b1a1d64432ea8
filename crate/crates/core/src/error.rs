//! Error type shared by every module of the crate.

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the geometry, thermodynamics and learner routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(&'static str),

    /// The result is not representable in `f64`.
    #[error("overflow: {0}")]
    Overflow(&'static str),

    /// A NaN or infinity appeared where a finite value is required.
    #[error("non-finite value: {0}")]
    NonFinite(&'static str),

    /// An iterative routine hit its iteration cap before meeting tolerance.
    #[error("convergence failure: {0} (after {iterations} iterations)", iterations = .1)]
    ConvergenceFailure(&'static str, usize),

    /// A metric tensor failed its symmetric-positive-definite invariant.
    #[error("singular metric: g11={g11}, g12={g12}, g22={g22}")]
    SingularMetric { g11: f64, g12: f64, g22: f64 },

    /// A finite-difference stencil would leave the admissible chart.
    #[error("finite-difference stencil leaves the admissible domain")]
    StencilOutOfDomain,

    /// Reported energy falls below the Landauer bound for the erased
    /// information, which no physical process can achieve.
    #[error("second-law violation: actual {actual_joules} J below Landauer bound {bound_joules} J")]
    SecondLawViolation {
        actual_joules: f64,
        bound_joules: f64,
    },

    /// A ratio against squared distance was requested at zero distance.
    #[error("zero distance: {0}")]
    ZeroDistance(&'static str),

    /// A path operation needs more points than the path holds.
    #[error("path too short: need at least {needed} points, got {got}")]
    PathTooShort { needed: usize, got: usize },

    /// A learner left the admissible chart too often and is considered
    /// divergent.
    #[error("learner diverged: {clamp_events} chart clamp events exceed the limit")]
    Diverged { clamp_events: u64 },
}
