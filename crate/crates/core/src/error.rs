use thiserror::Error;

/// Every failure the library can report.
///
/// Variants are grouped by the layer that raises them; [`Error::kind`] maps them onto the
/// coarse categories used by the command-line frontend.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    // -- algebra --------------------------------------------------------
    #[error("division by a series with vanishing constant term")]
    DivisionByZeroSeries,
    #[error("series composition requires an argument with zero constant term")]
    NonCompositionalArgument,
    #[error("series is not invertible under composition (needs zero constant and nonzero linear term)")]
    NonInvertibleSeries,
    #[error("reparametrization is singular at the base point (derivative vanishes)")]
    SingularReparametrization,
    #[error("jet order exhausted: {0}")]
    TruncationExceeded(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear system has no solution")]
    InconsistentSystem,
    #[error("scale factor is not rational: {0}")]
    IrrationalScale(String),

    // -- projective curves ----------------------------------------------
    #[error("operation requires parametrization tag `{expected}`, found `{found}`")]
    WrongGauge { expected: String, found: String },
    #[error("curve is not self-dual (odd invariant or coefficient {witness} does not vanish)")]
    NotSelfDual { witness: usize },
    #[error("no nondegenerate invariant symplectic form: {0}")]
    DegenerateForm(String),
    #[error("all Wilczynski invariants vanish: the curve is a piece of the rational normal curve")]
    AllInvariantsVanish,

    // -- classification -------------------------------------------------
    #[error("tuple is exceptional: no compatible rescaling exists")]
    ExceptionalTuple,

    // -- models / jacobi ------------------------------------------------
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),
    #[error("the line does not meet the affine set of admissible velocities")]
    EmptyIntersection,
    #[error("point lies on the annihilator of the cube of the distribution (u4 = u5 = 0)")]
    OnD3Annihilator,
    #[error("point is not regular: {0}")]
    NotRegularPoint(String),
    #[error("moving frame loses rank within jet order: {0}")]
    RankDropAlongCurve(String),
    #[error("osculating derivatives are dependent: {0}")]
    DegenerateOsculation(String),

    // -- input ----------------------------------------------------------
    #[error("parse error: {0}")]
    Parse(String),
}

/// Coarse error category used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Degeneracy,
    Truncation,
}

impl Error {
    pub fn truncation(what: impl Into<String>) -> Self {
        Error::TruncationExceeded(what.into())
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) | Error::DimensionMismatch(_) | Error::BadDimension(_) | Error::WrongGauge { .. } => {
                ErrorKind::Input
            }
            Error::TruncationExceeded(_) => ErrorKind::Truncation,
            _ => ErrorKind::Degeneracy,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
