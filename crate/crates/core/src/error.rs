use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("algebra mismatch")]
    AlgebraMismatch,

    #[error("invalid algebra descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("coordinate length {got} does not match algebra dimension {expected}")]
    CoordinateLength { expected: usize, got: usize },

    #[error("operator shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("singular operator (rcond {rcond:.3e})")]
    SingularOperator { rcond: f64 },

    #[error("eigenvalue outside domain of φ: {eigenvalue}")]
    OutsideDomain { eigenvalue: f64 },

    #[error("degenerate center draws exhausted")]
    DegenerateCenterDraws,

    #[error("center pipeline disagrees with factor structure: {0}")]
    PipelineDisagreement(String),

    #[error("Te not in interior of cone (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotInterior { min_eigenvalue: f64 },

    #[error("residual map is not a Jordan isomorphism")]
    NotJordanIsomorphism,

    #[error("element not in cone (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotInCone { min_eigenvalue: f64 },

    #[error("cones not order isomorphic under supported factors")]
    NotOrderIsomorphic,

    #[error("domain has disengaged atoms")]
    DisengagedAtoms,

    #[error("invalid monotone bijection: {0}")]
    InvalidMonotone(String),

    #[error("composition of {0} leaves the monotone bijection catalog")]
    CatalogComposition(String),

    #[error("invalid order isomorphism form: {0}")]
    InvalidForm(String),

    #[error("λ must be strictly positive (λ({t}) = {value})")]
    LambdaNotPositive { t: f64, value: f64 },

    #[error("λ must be 1 on engaged blocks (λ({t}) = {value})")]
    LambdaNotOneOnEngaged { t: f64, value: f64 },

    #[error("affine representation check failed (violation {violation:.3e})")]
    AffinityViolated { violation: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),
}
