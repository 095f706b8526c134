//! Geodesic ray tracing in the Hamiltonian formulation.

pub mod metric;
pub mod trace;
pub mod wormhole;

pub use metric::{CloakMetric, Euclidean, EventSphere, FieldMetric, RayMetric, SurfaceKind};
pub use trace::{
    compare_with_line, random_ray_family, trace, travel_time_compare, RayComparison, RayLaunch, RaySample, RayState, Termination,
    TraceOptions, TraceResult,
};
pub use wormhole::{wormhole_trace, HandleEnd, Transit, WormholeTrace};
