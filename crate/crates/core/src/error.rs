use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure mode of the toolkit. Numeric payloads are carried as `f64`
/// regardless of the scalar type the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid Lévy specification: {0}")]
    InvalidSpec(String),
    #[error("degenerate grid: {0}")]
    GridDegenerate(String),
    #[error("grid does not contain the time origin as a grid point")]
    GridMissingOrigin,
    #[error("jump at t = {time} lies outside the grid span [{start}, {end}]")]
    JumpOutsideGrid { time: f64, start: f64, end: f64 },

    #[error("hypergeometric argument z = {0} is out of range (need z <= 0)")]
    ArgumentOutOfRange(f64),
    #[error("2F1 parameters ({alpha}, {beta}, {gamma}) do not follow the (-d, d, d+1) pattern")]
    ParameterPatternMismatch { alpha: f64, beta: f64, gamma: f64 },
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("kernel is singular at s = {s} for t = {t}")]
    SingularPoint { t: f64, s: f64 },
    #[error("integral diverges: {0}")]
    Diverges(String),
    #[error("quadrature tolerance not met: estimated error {estimate:e} exceeds {requested:e}")]
    ToleranceNotMet { estimate: f64, requested: f64 },

    #[error("past horizon {horizon} is shorter than the required {required}")]
    HorizonTooShort { horizon: f64, required: f64 },
    #[error("kernel and grid are incompatible: {0}")]
    KernelGridIncompatible(String),
    #[error("scheme {scheme} is not available for the {kernel} kernel")]
    SchemeUnsupported { scheme: String, kernel: String },
    #[error("cumulant of order {0} is unavailable for this driver")]
    CumulantUnavailable(u32),

    #[error("lag multiple h = {0} is below one")]
    LagBelowOne(f64),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("initial squared volatility must be positive, got {0}")]
    NonPositiveInitial(f64),
    #[error("moment condition violated: {0}")]
    MomentConditionViolated(String),
    #[error("order constraint violated: {0}")]
    OrderConstraintViolated(String),
    #[error("no stationary solution: {0}")]
    NonStationary(String),
    #[error("time {time} precedes the burn-in period ending at {burn_in}")]
    BeforeBurnIn { time: f64, burn_in: f64 },
    #[error("ensemble of {got} paths is below the required {required}")]
    InsufficientEnsemble { got: usize, required: usize },

    #[error("series of length {len} is too short (need more than {required})")]
    SeriesTooShort { len: usize, required: usize },
    #[error("series has zero variance")]
    ZeroVariance,
    #[error("log-log regression needs strictly positive data")]
    NonPositiveData,
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("lag is off the grid: {0}")]
    OffGridLag(String),

    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
