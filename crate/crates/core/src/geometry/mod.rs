//! Curves, embedded manifolds, normal transport and tube quadrature grids.

pub mod curve;
pub mod descriptor;
pub mod frame;
pub mod manifold;

pub use curve::{Curve, CurveFoot, CurveJet, CurveKind};
pub use descriptor::GeometryConfig;
pub use frame::{normal_transport, TransportedFrame};
pub use manifold::{stereographic_chart, Manifold, ManifoldFoot};
pub mod tube;

pub use tube::{
    build_tube_grid, centerline_grid, normalize_center, shell_grid, tube_point, BoundaryNode, GridResolution, QuadGrid,
    QuadNode, Region, TubeDomain,
};
