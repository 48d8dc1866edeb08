use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("bistability lost at v = {v}: fewer than three roots of f(., v)")]
    BistabilityLost { v: f64 },

    #[error("J(v) does not change sign on the v-interval; no balanced state")]
    NoBalancedState,

    #[error("J'(v*) = {j_prime:e} is too small; balance is degenerate")]
    DegenerateBalance { j_prime: f64 },

    #[error("adaptive quadrature on [{a}, {b}] stalled with error estimate {err:e}")]
    Quadrature { a: f64, b: f64, err: f64 },

    #[error("front energy radicand {radicand:e} is negative; J(v*) is not numerically zero")]
    UnbalancedFront { radicand: f64 },

    #[error("mass xi = {xi} outside the admissible interval ({lo}, {hi})")]
    MassOutOfRange { xi: f64, lo: f64, hi: f64 },

    #[error("Newton iteration did not converge after {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("Newton Jacobian is singular; the layer has collapsed or the state is degenerate")]
    JacobianSingular,

    #[error("grid too coarse: spacing {h:e} exceeds epsilon/8 = {limit:e}")]
    UnresolvedLayer { h: f64, limit: f64 },

    #[error("shift-invert factorization failed at shift {shift}")]
    FactorizationFailed { shift: f64 },

    #[error(
        "step size underflow at x = {x} while shooting; epsilon is likely below ~{min_feasible_epsilon:e}"
    )]
    StiffnessOverflow { x: f64, min_feasible_epsilon: f64 },

    #[error("no Evans zero found within |lambda - seed| <= {radius:e} of seed {seed_re}{seed_im:+}i")]
    NoZeroFound { seed_re: f64, seed_im: f64, radius: f64 },

    #[error("resonant denominator |f_u - omega0*lambda| < 1e-10")]
    ResonantDenominator,

    #[error("linear solve failed in time stepping")]
    LinearSolveFailure,

    #[error("no fittable exponential window in the deviation history")]
    WindowNotFound,

    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse { line: usize, column: usize, message: String },

    #[error("config validation failed: {}", .0.join("; "))]
    ConfigValidation(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable identifier used in structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidModel(_) => "InvalidModel",
            Error::InvalidInput(_) => "InvalidInput",
            Error::BistabilityLost { .. } => "BistabilityLost",
            Error::NoBalancedState => "NoBalancedState",
            Error::DegenerateBalance { .. } => "DegenerateBalance",
            Error::Quadrature { .. } => "Quadrature",
            Error::UnbalancedFront { .. } => "UnbalancedFront",
            Error::MassOutOfRange { .. } => "MassOutOfRange",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::JacobianSingular => "JacobianSingular",
            Error::UnresolvedLayer { .. } => "UnresolvedLayer",
            Error::FactorizationFailed { .. } => "FactorizationFailed",
            Error::StiffnessOverflow { .. } => "StiffnessOverflow",
            Error::NoZeroFound { .. } => "NoZeroFound",
            Error::ResonantDenominator => "ResonantDenominator",
            Error::LinearSolveFailure => "LinearSolveFailure",
            Error::WindowNotFound => "WindowNotFound",
            Error::ConfigParse { .. } => "ParseError",
            Error::ConfigValidation(_) => "ValidationError",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}
