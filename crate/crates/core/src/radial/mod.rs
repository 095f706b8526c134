//! Per-degree radial solver and the spectra built on it.

pub mod solve;
pub mod sweep;

pub use solve::{radial_solve, RadialSolution, SolveOptions, SourceFn};
pub use sweep::{
    cloak_convergence_sweep, dn_spectrum, dn_spectrum_with, free_spectrum, hidden_bc_flux, hidden_flux_sweep,
    homogenization_sweep, neumann_eigenvalues, quantum_dn_convergence, trapped_ratio, trapped_state_scan,
    ConvergenceRow, ConvergenceTable, DnSpectrum, HiddenFlux, QuantumRow, QuantumTable, TrappedPoint, TrappedScan,
    DEFAULT_LMAX,
};
