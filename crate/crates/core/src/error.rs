use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}) is not strictly inside the unit disk")]
    OutsideDisk { x: f64, y: f64 },

    #[error("degenerate edge: hyperbolic length {length:e} below threshold")]
    DegenerateEdge { length: f64 },

    #[error("side lengths ({a}, {b}, {c}) violate the triangle inequality")]
    InvalidTriangle { a: f64, b: f64, c: f64 },

    #[error("degenerate face {face}: edge lengths violate the strict triangle inequality")]
    DegenerateFace { face: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("face {face} has {arity} vertices; only triangles are supported")]
    NonTriangularFace { face: usize, arity: usize },

    #[error("non-manifold mesh: {0}")]
    NonManifold(String),

    #[error("mesh has {count} boundary halfedges; a closed surface is required")]
    BoundaryDetected { count: usize },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("step halving floored out: every trial step broke a triangle inequality")]
    TriangleDegeneration,

    #[error("side lengths differ: {src} vs {dst}")]
    LengthMismatch { src: f64, dst: f64 },

    #[error("inconsistent side pairing: {0}")]
    InconsistentPairing(String),

    #[error("point could not be located within word length {max_word_len}")]
    NotFound { max_word_len: usize },

    #[error("cut failed: {0}")]
    CutFailed(String),

    #[error("hard constraint violated: residual {residual:e}")]
    ConstraintViolated { residual: f64 },

    #[error("descent diverged at iteration {iteration}: energy {energy:e} exceeds 10x initial {initial:e}; try a smaller step")]
    Diverged {
        iteration: usize,
        energy: f64,
        initial: f64,
    },

    #[error("linear solve broke down: {0}")]
    SingularSystem(String),

    #[error("coverage failure: {uncovered} sample points uncovered at word length {max_word_len}, first at ({x}, {y})")]
    Coverage {
        uncovered: usize,
        max_word_len: usize,
        x: f64,
        y: f64,
    },

    #[error("gluing mismatch: {0}")]
    GluingMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse classification used by the CLI exit-code contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Convergence,
    Topology,
    Divergence,
    Other,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. }
            | Error::NonTriangularFace { .. }
            | Error::Io(_)
            | Error::Json(_)
            | Error::InvalidInput(_) => ErrorKind::Parse,
            Error::NonConvergence { .. } | Error::TriangleDegeneration => ErrorKind::Convergence,
            Error::NonManifold(_)
            | Error::BoundaryDetected { .. }
            | Error::Topology(_)
            | Error::CutFailed(_) => ErrorKind::Topology,
            Error::Diverged { .. } => ErrorKind::Divergence,
            _ => ErrorKind::Other,
        }
    }
}
