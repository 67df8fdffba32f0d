use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("Fock basis for N = {particles}, M = {modes} has {dim} states, above the cap {cap}")]
    DimensionCap {
        particles: usize,
        modes: usize,
        dim: u128,
        cap: usize,
    },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("one-body field is not normalized (defect {defect:e})")]
    NotNormalized { defect: f64 },
    #[error("two-body kernel is not symmetric under slot exchange (defect {defect:e})")]
    AsymmetricKernel { defect: f64 },
    #[error("interaction profile is not even (defect {defect:e})")]
    OddInteraction { defect: f64 },
    #[error("pair interaction needs at least two particles, got {0}")]
    TooFewParticles(usize),
    #[error("sector {k} outside [0, {particles}]")]
    SectorOutOfRange { k: usize, particles: usize },
    #[error("counting order {order} exceeds particle number {particles}")]
    CountingOrder { order: usize, particles: usize },
    #[error("reduced density of order {0} is not supported")]
    DensityOrder(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Krylov step did not converge (estimate {estimate:e} after {halvings} step halvings)")]
    KrylovNotConverged { estimate: f64, halvings: usize },
    #[error("Lanczos did not converge (residual {residual:e} after {iterations} iterations)")]
    EigenNotConverged { residual: f64, iterations: usize },
    #[error("integration failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },
    #[error("sector {k} is not orthogonal to the condensate (defect {defect:e})")]
    NotOrthogonal { k: usize, defect: f64 },
    #[error("hierarchy tail weight {tail:e} at k_max = {k_max} exceeds {bound:e}")]
    TruncationInsufficient { k_max: usize, tail: f64, bound: f64 },
    #[error("time {t} is not on the stored grid")]
    OffGrid { t: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
