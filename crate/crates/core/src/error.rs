use thiserror::Error;

/// Every failure the lab can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero: quaternion norm {norm:e} below 1e-300")]
    DivisionByZero { norm: f64 },

    #[error("structural set is not orthonormal: <psi_{k}, psi_{m}> = {value:e}")]
    NotOrthonormal { k: usize, m: usize, value: f64 },

    #[error("invalid structural set: {0}")]
    InvalidStructuralSet(String),

    #[error("invalid deformation parameters (q = {q}, q' = {qp}); need 0 < q' < q <= 1")]
    InvalidParameters { q: f64, qp: f64 },

    #[error("derivative at zero requested but no exact derivative supplied")]
    RequiresDerivativeAtZero,

    #[error("difference quotient is singular at x = 0 and no limit value is attached")]
    SingularPoint,

    #[error("axis {axis}: coordinate below zero threshold and field has no exact partial")]
    MissingExactPartial { axis: usize },

    #[error("component {component} vanishes along axis {axis} near x_{axis} = {at}")]
    ComponentVanishes { component: usize, axis: usize, at: f64 },

    #[error("hypothesis violated: residual {residual:e} ({detail})")]
    HypothesisViolated { residual: f64, detail: String },

    #[error("non-finite integrand sample at {location:?}")]
    NonFiniteSample { location: [f64; 4] },

    #[error("sigma calibration ambiguous: residuals {plus:e} (s=+1) and {minus:e} (s=-1)")]
    CalibrationAmbiguous { plus: f64, minus: f64 },

    #[error("pole at distance {distance:e} from the boundary; need at least {required:e}")]
    PoleTooCloseToBoundary { distance: f64, required: f64 },

    #[error("pole hit: |tau - x| = {distance:e}")]
    PoleHit { distance: f64 },

    #[error("invalid box: {0}")]
    InvalidBox(String),

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadSpec(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown case id `{0}`")]
    UnknownCase(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
