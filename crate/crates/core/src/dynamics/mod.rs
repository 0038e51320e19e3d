//! State-vector evolution, the factored product formula for the transformed
//! Hamiltonian and a simulated phase-estimation read-out.

mod evolve;
mod qpe;
mod state;

pub use evolve::{
    exact_evolve, exact_evolve_pauli, power_evolution, similarity_pair, split_g,
    trotter_evolve, unitary_of, GParts, TrotterPlan,
};
pub use qpe::{
    auto_time, exact_power_unitaries, phase_to_energy, qpe_run, PhaseHistogram, Sampling,
    QPE_QUBIT_CAP,
};
pub use state::{sector_prepare, FockStateVector, SectorSpec};
