use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },
    #[error("matrix is not skew-Hermitian (asymmetry {asymmetry:.3e})")]
    NotSkewHermitian { asymmetry: f64 },
    #[error("eigendecomposition did not converge")]
    EigFailure,
    #[error("numeric overflow in {0}")]
    Overflow(&'static str),
    #[error("group element is singular or too ill-conditioned (condition number {cond:.3e})")]
    Singular { cond: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degenerate filtration: {0}")]
    DegenerateFiltration(String),
    #[error("declared spectrum does not match the numeric spectrum: {0}")]
    SpectrumMismatch(String),
    #[error("could not connect boundary points: {0}")]
    ConnectFailure(String),
    #[error("quadrature did not reach the requested accuracy (estimate {estimate:.3e})")]
    QuadratureFailure { estimate: f64 },
    #[error("ray-mode weight sequence is inconclusive: {0}")]
    Inconclusive(String),
    #[error("precondition not met: {0}")]
    PreconditionUnmet(String),
    #[error("scene is not a torus projective scene")]
    NotATorusScene,
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("step controller stalled at t = {t:.6e} (step {step:.3e})")]
    StepFailure { t: f64, step: f64 },
    #[error("growth bound violated: {0}")]
    BoundViolated(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}
