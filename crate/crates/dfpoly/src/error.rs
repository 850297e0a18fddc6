use thiserror::Error;

/// Every failure mode of the library. Construction-time validation and
/// geometric preconditions surface here; identity checks and Fano checks
/// report booleans instead of erroring.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gram matrix is not symmetric positive definite")]
    GramNotPositiveDefinite,
    #[error("root set is not closed under reflection: s_{alpha}({beta}) is not a root")]
    NotClosedUnderReflection { alpha: String, beta: String },
    #[error("positive root {root} pairs nonpositively with rho (lies on a wall)")]
    RootOnWall { root: String },
    #[error("invalid root system: {0}")]
    InvalidRootSystem(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("vector is not a root of the system")]
    NotARoot,
    #[error("Weyl closure exceeded the cap of {cap} elements")]
    GroupCapExceeded { cap: usize },

    #[error("polytope is empty")]
    Infeasible,
    #[error("polytope is unbounded (recession cone is not {{0}})")]
    Unbounded,
    #[error("polytope is not full-dimensional")]
    NotFullDimensional,
    #[error("positive part P+ is empty")]
    EmptyPositivePart,
    #[error("positive part P+ is lower-dimensional")]
    LowerDimensionalPositivePart,
    #[error("degenerate facet: {0}")]
    DegenerateFacet(String),
    #[error("degenerate simplex (zero volume)")]
    DegenerateSimplex,
    #[error("constraint normal is the zero vector")]
    ZeroNormal,
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
    #[error("desk-scale limit exceeded: {0}")]
    LimitExceeded(String),

    #[error("polytope fails the Fano facet condition")]
    NotFano,
    #[error("test function is not affine on the positive part P+")]
    NotAffineOnPositivePart,
    #[error("test function is not Weyl-invariant on the polytope")]
    NotWeylInvariantFunction,
    #[error("polytope is not Weyl-invariant")]
    NotWeylInvariantPolytope,
    #[error("general and Fano-affine evaluations disagree: {general} vs {affine}")]
    CrossCheckFailed { general: String, affine: String },

    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error in field `{field}`: {message}")]
    Validation { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(field: &str, message: impl Into<String>) -> Self {
        Error::Validation { field: field.to_string(), message: message.into() }
    }
}
