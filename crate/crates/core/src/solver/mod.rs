//! Amplitude equations for the rank-reducing generator `B` and construction
//! of the transformed Hamiltonian `G = e^B H e^{-B}`.

mod bch;
mod generator;
mod h0;
mod perturbative;
mod solve;
mod transform;

pub use bch::{bch_converged, bch_transform, bch_transform_with, ConvergedSeries};
pub use generator::{Domain, GeneratorB};
pub use h0::{split_h0_w, H0Choice, H0Split};
pub use perturbative::{perturbative_b, perturbative_series, PerturbativeSeries};
pub use solve::{residual, solve_swrrst, SolveReport, SolverOptions};
pub use transform::{
    apply_auxiliary, build_g, check_noncommutation, kept_sectors, BuildOptions, BuiltG,
    GDiagnostics, NonCommutation,
};
