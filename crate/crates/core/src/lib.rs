//! Structure-preserving parametric finite element solver for surface
//! diffusion flow.
//!
//! The library discretizes the motion of a closed plane curve (normal
//! velocity `d_ss kappa`) and of a closed surface in space (normal velocity
//! `Laplace-Beltrami H`) with piecewise linear parametric finite elements and
//! a semi-implicit normal built from the current and next time step. The
//! scheme conserves the enclosed area/volume exactly and never increases the
//! perimeter/surface area, and the mesh points asymptotically equidistribute
//! without any re-meshing.
//!
//! Everything numeric is generic over the scalar type via [`scalar::Scalar`]
//! (`f32` or `f64`); concrete `f64` aliases are exported at the crate root.

pub mod curve2d;
pub mod error;
pub mod flow2d;
pub mod flow3d;
pub mod metrics;
pub mod scalar;
pub mod shapes;
pub mod sparse;
pub mod surface3d;
pub mod vec;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Closed polygonal curve in the plane, `f64` coordinates.
pub type Curve = curve2d::PolygonalCurve<f64>;
/// Closed triangulated surface, `f64` coordinates.
pub type Surface = surface3d::TriSurface<f64>;
/// Curve-flow state, `f64`.
pub type CurveState = flow2d::FlowState2D<f64>;
/// Surface-flow state, `f64`.
pub type SurfaceState = flow3d::FlowState3D<f64>;
/// Nonlinear solver parameters, `f64`.
pub type Params = flow2d::SolverParams<f64>;
