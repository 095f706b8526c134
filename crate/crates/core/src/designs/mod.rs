//! Material-parameter generators.

pub mod cloak;
pub mod profile;
pub mod wormhole;

pub use cloak::{
    ideal_cloak_profile, laminate_phases, layered_isotropic_profile, maxwell_cloak_tensors, quantum_potential_profile,
    quantum_truncation, truncated_cloak_profile, QuantumCloakSpec,
};
pub use profile::{Coef, RadialInterval, RadialMediumProfile, Side, WaveModel};
pub use wormhole::{default_wormhole, wormhole_geometry, Warp, WormholeDesign};
