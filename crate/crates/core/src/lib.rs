//! Fock-space Schrieffer-Wolff rank-reducing similarity transformations.
//!
//! The crate builds an anti-Hermitian generator `B` for a second-quantized
//! electronic Hamiltonian `H` such that `G = e^B H e^{-B}` has no
//! energetically distinct off-diagonal external part, and then checks the
//! construction end to end:
//!
//! * [`algebra`]: exact normal-ordered fermionic operator algebra with a
//!   dense occupation-number oracle.
//! * [`partition`]: active/external spin-orbital partition, the sector
//!   projectors and number-operator polynomials.
//! * [`solver`]: truncated commutator-expansion amplitude equations,
//!   construction of `G`, auxiliary rotations and perturbative estimates.
//! * [`qubit`]: Jordan-Wigner mapping, Pauli locality census and rotation
//!   schedules for number-operator exponentials.
//! * [`dynamics`]: statevector evolution, the factored Trotter product and a
//!   simulated phase-estimation read-out.
//! * [`io`]: integral files, run configuration and the pipeline driver.
//! * [`models`]: seeded model Hamiltonians for experiments.

pub mod algebra;
pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod models;
pub mod partition;
pub mod qubit;
pub mod solver;

pub use error::{Error, Result};
