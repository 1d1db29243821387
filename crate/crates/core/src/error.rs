use thiserror::Error;

/// Errors raised by the geometry, calculus and solver layers.
///
/// Numerical degeneracies that are part of the geometry (umbilic points,
/// totally geodesic points, branch points of a polar variety) are usually
/// reported as classifications rather than errors; the variants here are
/// for inputs a computation cannot proceed from.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("height coordinate must be positive, got {0}")]
    NonPositiveHeight(f64),

    #[error("point lies on the degenerate set X0 = X3 (|X0 - X3| = {0:e})")]
    DegenerateSet(f64),

    #[error("point violates its quadric constraint by {0:e}")]
    QuadricViolation(f64),

    #[error("parse error at byte {offset}: expected {expected}, found {found}")]
    Parse { offset: usize, expected: String, found: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parameter point ({u}, {v}) is outside the chart domain")]
    OutsideDomain { u: f64, v: f64 },

    #[error("immersion degenerates: |Gram determinant| = {0:e}")]
    NonImmersed(f64),

    #[error("surface signature contradicts the declared causal class: {0}")]
    WrongCausalClass(String),

    #[error("normal orientation is undefined: eta_(n+1) vanishes and no override was given")]
    OrientationUndefined,

    #[error("stereographic image lies on the unit circle (|g| = {0})")]
    UnitCircleSingularity(f64),

    #[error("the normal geodesic ends at the point at infinity")]
    InfiniteG,

    #[error("normal is equatorial (|eta_3| = {0:e}); the polar point lies in S0")]
    EquatorialNormal(f64),

    #[error("branch point of the polar variety (K = {0})")]
    BranchPoint(f64),

    #[error("gradient constraint violated: {0}")]
    CausalityViolation(String),

    #[error("|g| is too close to 1 at grid node ({i}, {j})")]
    UnitModulusSingularity { i: usize, j: usize },

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("singular linear system: zero pivot at row {0}")]
    SingularSystem(usize),

    #[error("height from the representation formula is not real at node ({i}, {j}): |Im|/|x3| = {ratio:e}")]
    NonRealHeight { i: usize, j: usize, ratio: f64 },

    #[error("every sample was dropped by the constraint checks")]
    EmptyOutput,

    #[error("unknown surface family `{0}`")]
    UnknownFamily(String),

    #[error("parameter constraint violated: {0}")]
    ParamConstraint(String),

    #[error("domain constraint violated: {0}")]
    DomainConstraint(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
