//! Crate-wide error type.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("curve needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),

    #[error("degenerate edge {index}: length {length:e} below guard {guard:e}")]
    DegenerateEdge { index: usize, length: f64, guard: f64 },

    #[error("curve is not oriented anticlockwise (signed area {0:e} <= 0)")]
    ClockwiseCurve(f64),

    #[error("field length {found} does not match expected {expected}")]
    FieldSizeMismatch { expected: usize, found: usize },

    #[error("degenerate triangle {index}: |J| = {jacobian:e} below guard {guard:e}")]
    DegenerateTriangle { index: usize, jacobian: f64, guard: f64 },

    #[error("surface is not closed and consistently oriented: {0}")]
    BadTopology(String),

    #[error("surface has genus != 0: V - E + F = {0}, expected 2")]
    UnsupportedGenus(isize),

    #[error("surface encloses no volume (V = {0:e})")]
    ZeroVolume(f64),

    #[error("triangle index {index} out of range for {vertices} vertices")]
    VertexIndexOutOfRange { index: usize, vertices: usize },

    #[error("matrix entry ({row}, {col}) outside dimension {dim}")]
    EntryOutOfRange { row: usize, col: usize, dim: usize },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("matrix row {0} has no entries")]
    EmptyRow(usize),

    #[error("singular factorization at column {column} (pivot {pivot:e})")]
    SingularFactorization { column: usize, pivot: f64 },

    #[error("iterative solver did not reach tolerance {tol:e} in {iterations} iterations (residual {residual:e})")]
    KrylovStalled { iterations: usize, tol: f64, residual: f64 },

    #[error("nonlinear solve did not converge in {iterations} iterations (|dX| = {dx:e}, |dk| = {dk:e})")]
    NoConvergence { iterations: usize, dx: f64, dk: f64 },

    #[error("mesh degenerated during time step: {0}")]
    MeshDegenerated(String),

    #[error("pinch-off guard tripped at t = {time}: min |J| ratio {ratio:e} below {threshold:e}")]
    PinchOff { time: f64, ratio: f64, threshold: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("self-intersecting polygon passed to manifold distance")]
    SelfIntersectingPolygon,

    #[error("snapshot parse error: {0}")]
    SnapshotFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
