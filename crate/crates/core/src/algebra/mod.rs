//! Second-quantized fermionic operators in normal-ordered canonical form.

mod dense;
mod operator;
mod tensors;
mod term;

pub use dense::{
    ladder_matrix, sector_states, to_dense, to_dense_with_cap, DenseOperator, DEFAULT_ORACLE_CAP,
};
pub use operator::{
    normal_order, normal_order_with, AlgebraLimits, FermionOperator, DEFAULT_MAX_LADDER,
    DEFAULT_MAX_TERMS, DEFAULT_PRUNE,
};
pub(crate) use operator::{format_complex, parse_complex};
pub use tensors::{hamiltonian_from_tensors, ManyBodyTensors, SYMMETRY_TOL};
pub use term::{mask_from_indices, mask_indices, Ladder, TermKey, MAX_MODES};
