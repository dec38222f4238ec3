//! Error type shared by all library modules.

use thiserror::Error;

/// Errors produced by grid construction, solvers, observables, and the
/// inverse designer.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its valid range; the message names the field.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// An evaluation point or time ordering is outside the valid domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested computation exceeds a size or cost budget.
    #[error("capacity error: {0}")]
    Capacity(String),

    /// The time grid is coarser than the default refinement guard and the
    /// caller did not ask to force it.
    #[error("refinement error: {0}")]
    Refinement(String),

    /// A frequency grid does not span the required window.
    #[error("coverage error: {0}")]
    Coverage(String),

    /// The emitter-cavity interaction drops below the designer's floor, so
    /// the target-to-amplitude map is singular there.
    #[error("singular-coupling error: {0}")]
    SingularCoupling(String),

    /// The requested target needs probability amplitudes above one.
    #[error("unphysical-target error: {0}")]
    UnphysicalTarget(String),

    /// The pump-design radicand went negative: no real pump produces the
    /// requested shape at the requested efficiency.
    #[error("design-infeasible error: {0}")]
    DesignInfeasible(String),

    /// The wave-packet shape is undefined because nothing was emitted.
    #[error("undefined-shape error: {0}")]
    UndefinedShape(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed file content (CSV parsing and similar).
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
