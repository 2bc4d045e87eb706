//! Finite-dimensional states, unitary evolution, measurement and observation
//! entanglement, and a partial-trace decoherence toy.

mod grid;
mod joint;
mod operator;
mod state;

pub use grid::{
    energy_shift, marginal_density, pair_density, particle_marginal, GridWavefunction, Particles,
    GRID_NORM_TOL,
};
pub use joint::{
    coherence, entangle_environment, measure_entangle, observe_entangle, partial_trace,
    DensityMatrix, JointState, Register, RegisterKind, MAX_JOINT_DIM,
};
pub use operator::{evolve, HermitianOperator, HERMITIAN_TOL};
pub use state::{
    presence, BasisLabel, PresenceDistribution, StateVector, NORM_TOL, PRESENCE_NORM_TOL,
};
