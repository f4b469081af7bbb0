use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("t = {t} is outside the field domain [{lo}, {hi}]")]
    DomainError { t: f64, lo: f64, hi: f64 },
    #[error("field is not finite at t = {t}")]
    NonFinite { t: f64 },
    #[error("warping function b = {b:e} at t = {t} is below the guard {guard:e}")]
    SingularWarp { t: f64, b: f64, guard: f64 },
    #[error("lapse f = {f:e} at t = {t} is not positive")]
    NonpositiveLapse { t: f64, f: f64 },
    #[error("metric is singular at stencil node {node:?}")]
    SingularMetric { node: Vec<i32> },
    #[error("stencil out of range: {0}")]
    StencilOutOfRange(String),
    #[error("operation needs h mode {expected}, structure has {found}")]
    WrongHMode { expected: &'static str, found: String },
    #[error("critical point of the potential at t = {t} (f' = {fp:e})")]
    CriticalPoint { t: f64, fp: f64 },
    #[error("potential vanishes at t = {t} (f = {f:e})")]
    ZeroPotential { t: f64, f: f64 },
    #[error("scalar curvature {s:e} at t = {t} is not zero")]
    NonzeroScalar { t: f64, s: f64 },
    #[error("dimension {n} not supported ({reason})")]
    DimensionError { n: usize, reason: String },
    #[error("curvature is outside the radial ansatz: {0}")]
    UnsupportedCurvature(String),
    #[error("wrong metric ansatz: {0}")]
    AnsatzMismatch(String),
    #[error("bad initial data: {0}")]
    BadInitialData(String),
    #[error("integration step failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },
    #[error("degenerate coefficient: {0}")]
    Degenerate(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(String),
}

impl LabError {
    /// Precondition failures become SKIP in identity suites rather than FAIL.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            LabError::WrongHMode { .. }
                | LabError::CriticalPoint { .. }
                | LabError::ZeroPotential { .. }
                | LabError::NonzeroScalar { .. }
                | LabError::Degenerate(_)
                | LabError::AnsatzMismatch(_)
                | LabError::DimensionError { .. }
        )
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
