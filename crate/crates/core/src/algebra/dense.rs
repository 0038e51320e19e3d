use num_complex::Complex64;

use super::operator::FermionOperator;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Default largest spin-orbital count accepted by the dense oracle.
pub const DEFAULT_ORACLE_CAP: usize = 14;

/// Matrix of an operator in the occupation-number basis.
///
/// Basis state `s` has spin-orbital `p` occupied iff bit `p` of `s` is set
/// (spin-orbital 1 is the least significant bit). Signs follow the
/// Jordan-Wigner ordering used by [`crate::qubit::jw_map`].
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    n_modes: usize,
    pub matrix: CMatrix,
}

impl DenseOperator {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        1 << self.n_modes
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        crate::linalg::max_abs_diff(&self.matrix, &self.matrix.adjoint()) <= tol
    }

    /// No entry couples basis states of different particle number.
    pub fn is_number_block_diagonal(&self, tol: f64) -> bool {
        let dim = self.dim();
        (0..dim).all(|r| {
            (0..dim).all(|c| {
                (r as u64).count_ones() == (c as u64).count_ones() || self.matrix[(r, c)].norm() <= tol
            })
        })
    }

    /// Basis states with exactly `n_particles` occupied spin-orbitals.
    pub fn sector_states(&self, n_particles: usize) -> Vec<usize> {
        sector_states(self.n_modes, n_particles)
    }

    /// Restriction to one particle-number sector.
    pub fn sector_block(&self, n_particles: usize) -> CMatrix {
        let states = self.sector_states(n_particles);
        CMatrix::from_fn(states.len(), states.len(), |r, c| {
            self.matrix[(states[r], states[c])]
        })
    }
}

pub fn sector_states(n_modes: usize, n_particles: usize) -> Vec<usize> {
    (0..1usize << n_modes)
        .filter(|s| s.count_ones() as usize == n_particles)
        .collect()
}

pub fn to_dense(op: &FermionOperator, n_modes: usize) -> Result<DenseOperator> {
    to_dense_with_cap(op, n_modes, DEFAULT_ORACLE_CAP)
}

pub fn to_dense_with_cap(op: &FermionOperator, n_modes: usize, cap: usize) -> Result<DenseOperator> {
    if n_modes > cap {
        return Err(Error::Capacity {
            what: "spin-orbitals for dense oracle",
            size: n_modes,
            limit: cap,
        });
    }
    if op.min_modes() > n_modes {
        return Err(Error::Bounds {
            index: op.min_modes() - 1,
            limit: n_modes,
        });
    }
    let dim = 1usize << n_modes;
    let mut matrix = CMatrix::zeros(dim, dim);
    for (key, coeff) in op.terms() {
        // only states containing every annihilated orbital can contribute
        for s in 0..dim as u64 {
            if s & key.annihilators != key.annihilators {
                continue;
            }
            if let Some((target, sign)) = key.apply_to_basis(s) {
                matrix[(target as usize, s as usize)] += coeff * sign;
            }
        }
    }
    Ok(DenseOperator { n_modes, matrix })
}

/// Dense matrix of `a_p` (or `a†_p`) built directly from the Jordan-Wigner
/// sign rule; independent of the symbolic kernels.
pub fn ladder_matrix(p: usize, create: bool, n_modes: usize) -> CMatrix {
    let dim = 1usize << n_modes;
    let mut m = CMatrix::zeros(dim, dim);
    for s in 0..dim {
        let occupied = s & (1 << p) != 0;
        if occupied == create {
            continue;
        }
        let parity = (s & ((1 << p) - 1)).count_ones();
        let sign = if parity.is_multiple_of(2) { 1.0 } else { -1.0 };
        m[(s ^ (1 << p), s)] = Complex64::new(sign, 0.0);
    }
    m
}
