//! Singular transformation optics toolkit.
//!
//! * [`geometry`]: points, symmetric tensors, metric/conductivity correspondence
//! * [`maps`]: blow-up and truncation maps, push-forwards, design triplets
//! * [`designs`]: ideal, truncated, layered and quantum cloaks, wormhole geometry
//! * [`radial`]: spherical-harmonic solver, DN spectra and convergence sweeps
//! * [`rays`]: Hamiltonian geodesic tracing through cloak and wormhole metrics
//! * [`experiment`]: configuration, sweeps and reproducible output files

pub mod designs;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod maps;
pub mod ode;
pub mod radial;
pub mod rays;
pub mod special;

pub use error::{Error, Result};
