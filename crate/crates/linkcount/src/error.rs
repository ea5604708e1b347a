use thiserror::Error;

/// Crate-wide error type. Variant names double as machine-readable codes in
/// CLI output, so they stay stable.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not a valid discriminant (must be 0 or 1 mod 4, nonzero, not a square)")]
    NotADiscriminant(i128),

    /// Exact integer arithmetic exceeded the fixed-width range. Results are
    /// never silently wrapped.
    #[error("arithmetic overflow in exact computation")]
    Overflow,

    #[error("trace form determinant is not a rational square; input is not an order-like lattice")]
    NotASquare,

    #[error("rows span a lattice of rank < 4")]
    RankDeficient,

    #[error("invalid triple: {0}")]
    InvalidTriple(String),

    #[error("level {ell} not allowed: {ell}^2 does not divide {m}")]
    LevelNotAllowed { ell: i128, m: i128 },

    #[error("triple ({d1}, {d2}, {x}) is not nice")]
    NotNice { d1: i128, d2: i128, x: i128 },

    #[error("elements belong to different quaternion algebras")]
    AlgebraMismatch,

    #[error("internal invariant violated: {0}")]
    InternalError(String),

    #[error("epsilon is undefined at prime {0} for these discriminants")]
    UndefinedEpsilon(i128),

    #[error("sign of intersection is undefined when x^2 > D1*D2")]
    NoSignDefined,

    #[error("geodesics do not intersect transversely (x^2 >= D1*D2)")]
    NoTransversalIntersection,

    #[error("unsupported level: {0}")]
    UnsupportedLevel(String),

    #[error("hypotheses of the orientation-count corollary fail: {0}")]
    UnsupportedByCorollary(String),

    #[error("brute-force precision insufficient to certify a lift")]
    PrecisionInsufficient,

    #[error("invalid Eichler data: {0}")]
    InvalidOrder(String),
}

impl Error {
    /// Stable machine-readable code, used in per-row batch output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::NotADiscriminant(_) => "NotADiscriminant",
            Error::Overflow => "Overflow",
            Error::NotASquare => "NotASquare",
            Error::RankDeficient => "RankDeficient",
            Error::InvalidTriple(_) => "InvalidTriple",
            Error::LevelNotAllowed { .. } => "LevelNotAllowed",
            Error::NotNice { .. } => "NotNice",
            Error::AlgebraMismatch => "AlgebraMismatch",
            Error::InternalError(_) => "InternalError",
            Error::UndefinedEpsilon(_) => "UndefinedEpsilon",
            Error::NoSignDefined => "NoSignDefined",
            Error::NoTransversalIntersection => "NoTransversalIntersection",
            Error::UnsupportedLevel(_) => "UnsupportedLevel",
            Error::UnsupportedByCorollary(_) => "UnsupportedByCorollary",
            Error::PrecisionInsufficient => "PrecisionInsufficient",
            Error::InvalidOrder(_) => "InvalidOrder",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
