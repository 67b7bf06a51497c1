use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("accuracy not attained: {0}")]
    NotConverged(String),

    #[error("requested order {requested} exceeds the supported maximum {max}")]
    OrderTooHigh { requested: usize, max: usize },

    #[error("series diverges: |eta| = {eta} is inside the radius theta = {theta}")]
    Divergence { eta: f64, theta: f64 },

    #[error("series is missing coefficient of order {0}")]
    MissingOrder(i32),

    #[error("imaginary residue {residue:e} in coefficient of order {order}")]
    Consistency { order: i32, residue: f64 },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("singular linear system")]
    SingularSystem,

    #[error("evaluation point coincides with node {0}")]
    NodeCollision(usize),

    #[error("obstacle has empty interior and no boundary")]
    EmptyShape,

    #[error("raster of {cells} cells exceeds the cap of {cap}")]
    ResourceLimit { cells: usize, cap: usize },

    #[error("step budget of {0} exhausted")]
    StepBudget(u64),

    #[error("phase-shift sign normalisation failed: L*xi = {0}")]
    Normalization(f64),

    #[error("lattice count mismatch at n = {n}, k = {k}: enumeration {dp}, closed form {closed}")]
    Inconsistency {
        n: u32,
        k: i64,
        dp: String,
        closed: String,
    },

    #[error("Y_{order}({x}) overflows")]
    Overflow { order: usize, x: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
