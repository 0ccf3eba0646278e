use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unsupported preset: {0}")]
    UnsupportedPreset(String),
    #[error("degree window too small: {0}")]
    WindowTooSmall(String),
    #[error("operation undefined at window boundary: {0}")]
    BoundaryUndefined(String),
    #[error("partial order is only defined on non-regular components: {0}")]
    NotComparableDomain(String),
    #[error("operation requires a finite type object: {0}")]
    NotFiniteType(String),
    #[error("presented subcategory is not an aisle: {0}")]
    NonAisle(String),
    #[error("step budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("tube objects live in different tubes: {0}")]
    DifferentTube(String),
    #[error("no non-split extension exists: {0}")]
    NoExtension(String),
    #[error("invalid chain setup: {0}")]
    InvalidSetup(String),
    #[error("component is not non-regular: {0}")]
    NotNonRegular(String),
    #[error("traces belong to different components: {0}")]
    ComponentMismatch(String),
    #[error("unknown builtin: {0}")]
    UnknownBuiltin(String),
    #[error("permutation is not a quiver symmetry: {0}")]
    NotASymmetry(String),
    #[error("group order cap exceeded (cap {0})")]
    OrderCapExceeded(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
