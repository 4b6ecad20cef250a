use thiserror::Error;

/// Broad classes of failure, used by the CLI to choose an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Precondition,
    FieldCapacity,
    Internal,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("arity mismatch: expected {expected} values, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("zero polynomial where a nonzero polynomial is required")]
    ZeroPolynomial,
    #[error("modulus {0} is not a prime below 2^31")]
    InvalidModulus(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(String),

    #[error("curve {label}: defining polynomial is not square-free")]
    NotSquareFree { label: String },
    #[error("curve {label}: polynomial involves jet variables")]
    NotBivariate { label: String },
    #[error("curve {label}: point {point} does not lie on the curve")]
    PointNotOnCurve { label: String, point: String },
    #[error("point {point} does not lie on both curves {first} and {second}")]
    PointNotOnBoth { first: String, second: String, point: String },
    #[error("curve {label}: point {point} is singular")]
    SingularPoint { label: String, point: String },
    #[error("curve {label}: vertical tangent at {point}")]
    VerticalTangent { label: String, point: String },
    #[error("curve {label} is a vertical line")]
    VerticalLine { label: String },
    #[error("operation requires a prime field, got {0}")]
    WrongField(String),
    #[error("characteristic {characteristic} too small: need p > {required}")]
    CharacteristicTooSmall { characteristic: u64, required: usize },
    #[error("curves {first} and {second} share a common component")]
    CommonComponent { first: String, second: String },
    #[error("curves {first} and {second} are the same curve")]
    DuplicateCurve { first: String, second: String },
    #[error("duplicate curve label {0}")]
    DuplicateLabel(String),
    #[error("curve {label}: irreducibility not asserted; counting requires irreducible curves")]
    IrreducibilityNotAsserted { label: String },
    #[error("curve {label}: needed {needed} lift points, found {found}")]
    InsufficientPoints { label: String, needed: usize, found: usize },
    #[error("field {field} too small: curve {label} needs {needed} lift samples, found {found}")]
    InsufficientFieldPoints { field: String, label: String, needed: usize, found: usize },
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("cannot draw {requested} distinct curves from a family of {available}")]
    TooManyCurves { requested: u128, available: u128 },
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("order must be at least {min}, got {got}")]
    InvalidOrder { min: usize, got: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Parse(_) | UnsupportedVersion(_) => ErrorClass::Parse,
            InsufficientPoints { .. }
            | InsufficientFieldPoints { .. }
            | CharacteristicTooSmall { .. }
            | TooManyCurves { .. } => ErrorClass::FieldCapacity,
            Internal(_) => ErrorClass::Internal,
            _ => ErrorClass::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
