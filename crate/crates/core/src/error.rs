use thiserror::Error;

/// Errors surfaced by the kernel and the structure modules.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("context mismatch: expected `{expected}`, found `{found}`")]
    ContextMismatch { expected: String, found: String },

    #[error("duplicate generator name `{0}`")]
    DuplicateGenerator(String),

    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),

    #[error("generator `{name}`: declared parity does not match degree {degree}")]
    ParityMismatch { name: String, degree: i64 },

    #[error("{what} must be homogeneous")]
    GradingRequired { what: String },

    #[error("derivation has no image for generator `{0}`")]
    IncompleteDerivation(String),

    #[error("degree mismatch for {what}: expected {expected}, found {found}")]
    DegreeMismatch {
        what: String,
        expected: i64,
        found: i64,
    },

    #[error("{what} is not square-zero; residual: {residual}")]
    NotSquareZero { what: String, residual: String },

    #[error("differentials do not anticommute; residual: {residual}")]
    NotCommuting { residual: String },

    #[error("structure constants violate the Jacobi identity; residual: {residual}")]
    NotJacobi { residual: String },

    #[error("not a Lie algebroid: {{H,H}} = {residual}")]
    NotAlgebroid { residual: String },

    #[error("bivector is not Poisson: [P,P] = {residual}")]
    NotPoisson { residual: String },

    #[error("background form is not closed: d(psi) = {residual}")]
    NotClosed { residual: String },

    #[error("bracket table entry for ({a}, {b}) conflicts with declared symmetry")]
    SymmetryConflict { a: String, b: String },

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("interior-operator extraction failed: {0}")]
    ExtractionFailed(String),

    #[error("expected {what} of bidegree {expected}")]
    BidegreeMismatch { what: String, expected: String },

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
