//! Small seeded model Hamiltonians for examples and tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{hamiltonian_from_tensors, FermionOperator, ManyBodyTensors};
use crate::error::{Error, Result};
use crate::io::SpatialIntegrals;
use crate::partition::OrbitalPartition;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    /// Diagonal of `h` per spatial orbital, active orbitals first.
    pub orbital_energies: Vec<f64>,
    pub n_external: usize,
    /// Scale of the random off-diagonal one-body and all two-body integrals.
    pub coupling: f64,
    /// Per-orbital `z_i`: `h` gains `+z_i` on spin up and `-z_i` on spin down.
    pub spin_splitting: Vec<f64>,
    /// `a†_{i↑} a_{i↓} + h.c.` amplitude on every active orbital.
    pub active_spin_flip: f64,
    pub seed: u64,
}

impl ModelSpec {
    /// Two orbitals, one external, gap 2.
    pub fn two_orbital(coupling: f64, seed: u64) -> Self {
        Self {
            orbital_energies: vec![-1.0, 1.0],
            n_external: 1,
            coupling,
            spin_splitting: Vec::new(),
            active_spin_flip: 0.0,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub spatial: SpatialIntegrals,
    pub tensors: ManyBodyTensors,
    pub hamiltonian: FermionOperator,
    pub partition: OrbitalPartition,
}

/// Random real integrals with the full eight-fold symmetry.
pub fn random_integrals(orbital_energies: &[f64], coupling: f64, seed: u64) -> SpatialIntegrals {
    let n = orbital_energies.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = SpatialIntegrals::zeros(n);
    for i in 0..n {
        s.h[i * n + i] = orbital_energies[i];
        for j in 0..i {
            let v = coupling * rng.random_range(-1.0..1.0);
            s.h[i * n + j] = v;
            s.h[j * n + i] = v;
        }
    }
    let pair = |a: usize, b: usize| a.max(b) * (a.max(b) + 1) / 2 + a.min(b);
    let n_pairs = n * (n + 1) / 2;
    let mut unique = vec![vec![0.0; n_pairs]; n_pairs];
    for x in 0..n_pairs {
        for y in 0..=x {
            let v = coupling * rng.random_range(-1.0..1.0);
            unique[x][y] = v;
            unique[y][x] = v;
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    s.g[((i * n + j) * n + k) * n + l] = unique[pair(i, j)][pair(k, l)];
                }
            }
        }
    }
    s
}

pub fn build_model(spec: &ModelSpec) -> Result<Model> {
    let n = spec.orbital_energies.len();
    if !spec.spin_splitting.is_empty() && spec.spin_splitting.len() != n {
        return Err(Error::Argument(format!(
            "{} spin splittings for {n} orbitals",
            spec.spin_splitting.len()
        )));
    }
    let spatial = random_integrals(&spec.orbital_energies, spec.coupling, spec.seed);
    let mut tensors = spatial.to_tensors()?;
    for (i, z) in spec.spin_splitting.iter().enumerate() {
        let (up, down) = (2 * i, 2 * i + 1);
        tensors.set_h(up, up, tensors.h(up, up) + z)?;
        tensors.set_h(down, down, tensors.h(down, down) - z)?;
    }
    if spec.active_spin_flip != 0.0 {
        let f = Complex64::new(spec.active_spin_flip, 0.0);
        for i in 0..n.saturating_sub(spec.n_external) {
            tensors.set_h(2 * i, 2 * i + 1, f)?;
            tensors.set_h(2 * i + 1, 2 * i, f)?;
        }
    }
    let partition = OrbitalPartition::from_orbitals(spec.n_external, &spec.orbital_energies, None)?;
    let hamiltonian = hamiltonian_from_tensors(&tensors)?;
    Ok(Model {
        spatial,
        tensors,
        hamiltonian,
        partition,
    })
}
