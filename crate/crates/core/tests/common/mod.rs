//! Independent dense oracles and seeded generators shared by the tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swrrst::algebra::{FermionOperator, TermKey};
use swrrst::models::{build_model, Model, ModelSpec};

pub type M = DMatrix<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `a†_p` (or `a_p`) on `n` modes; state bit `q` is the occupation of mode
/// `q`, the sign counts occupied modes below `p`.
pub fn ladder(p: usize, create: bool, n: usize) -> M {
    let dim = 1usize << n;
    let mut m = M::zeros(dim, dim);
    for s in 0..dim {
        if let Some((t, sign)) = ladder_on(p, create, s) {
            m[(t, s)] = c(sign);
        }
    }
    m
}

/// `a†_p` / `a_p` on one basis state: `None` if it annihilates the state.
fn ladder_on(p: usize, create: bool, s: usize) -> Option<(usize, f64)> {
    if (s >> p & 1 == 1) == create {
        return None;
    }
    let sign = if (s & ((1 << p) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((s ^ (1 << p), sign))
}

/// Dense matrix of `Σ c E^C_A` with `E^C_A = a†_{c1} .. a†_{ck} a_{rm} .. a_{r1}`,
/// built column by column; the rightmost ladder acts first.
pub fn oracle_dense(op: &FermionOperator, n: usize) -> M {
    let dim = 1usize << n;
    let mut total = M::zeros(dim, dim);
    for (k, coeff) in op.terms() {
        let mut seq: Vec<(usize, bool)> = k.creator_indices().into_iter().map(|p| (p, true)).collect();
        seq.extend(k.annihilator_indices().into_iter().rev().map(|p| (p, false)));
        for col in 0..dim {
            let mut state = Some((col, 1.0));
            for &(p, create) in seq.iter().rev() {
                state = state.and_then(|(s, sg)| ladder_on(p, create, s).map(|(t, x)| (t, sg * x)));
            }
            if let Some((row, sign)) = state {
                total[(row, col)] += coeff * sign;
            }
        }
    }
    total
}

pub fn max_diff(a: &M, b: &M) -> f64 {
    (a - b).iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Random operator with up to `terms` strings of body rank `<= max_rank`.
pub fn random_operator(r: &mut ChaCha8Rng, n: usize, terms: usize, max_rank: usize) -> FermionOperator {
    let mut op = FermionOperator::zero();
    for _ in 0..terms {
        let kc = r.random_range(0..=max_rank);
        let ka = r.random_range(0..=max_rank);
        let cr = random_subset(r, n, kc);
        let an = random_subset(r, n, ka);
        let coeff = Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0));
        op.add_term(TermKey::new(cr, an), coeff);
    }
    op
}

pub fn random_hermitian(r: &mut ChaCha8Rng, n: usize, terms: usize, max_rank: usize) -> FermionOperator {
    let a = random_number_conserving(r, n, terms, max_rank);
    &a + &a.adjoint()
}

pub fn random_number_conserving(r: &mut ChaCha8Rng, n: usize, terms: usize, max_rank: usize) -> FermionOperator {
    let mut op = FermionOperator::zero();
    for _ in 0..terms {
        let k = r.random_range(0..=max_rank);
        let key = TermKey::new(random_subset(r, n, k), random_subset(r, n, k));
        op.add_term(key, Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)));
    }
    op
}

pub fn random_subset(r: &mut ChaCha8Rng, n: usize, k: usize) -> u64 {
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k.min(n) {
        let j = r.random_range(i..n);
        idx.swap(i, j);
    }
    idx[..k.min(n)].iter().fold(0, |m, &p| m | 1 << p)
}

/// Two orbitals, one external, `‖W‖/gap ≈ 0.1`.
pub fn toy_two_orbital() -> Model {
    build_model(&ModelSpec::two_orbital(0.05, 11)).unwrap()
}

/// Same system with orbital-dependent spin splittings, which lift the
/// isoenergetic degeneracies of `H0`, and a spin flip on the active orbital.
pub fn toy_split() -> Model {
    let mut spec = ModelSpec::two_orbital(0.05, 11);
    spec.spin_splitting = vec![0.15, 0.35];
    spec.active_spin_flip = 0.1;
    build_model(&spec).unwrap()
}

/// Three orbitals, two external, generic energies.
pub fn toy_three_two() -> Model {
    let mut spec = ModelSpec::two_orbital(0.05, 5);
    spec.orbital_energies = vec![-1.0, 0.4, 1.3];
    spec.n_external = 2;
    build_model(&spec).unwrap()
}

/// Three orbitals, one external.
pub fn toy_three_one() -> Model {
    let mut spec = ModelSpec::two_orbital(0.05, 7);
    spec.orbital_energies = vec![-1.2, -0.6, 1.0];
    build_model(&spec).unwrap()
}

pub fn sorted_eigenvalues(m: &M) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5);
    let mut v: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// `exp(-i t H)` by eigendecomposition, computed here without the crate.
pub fn expm_oracle(h: &M, t: f64) -> M {
    let hs = (h + h.adjoint()) * c(0.5);
    let e = hs.symmetric_eigen();
    let d = M::from_diagonal(&nalgebra::DVector::from_iterator(
        e.eigenvalues.len(),
        e.eigenvalues.iter().map(|x| Complex64::from_polar(1.0, -t * x)),
    ));
    &e.eigenvectors * d * e.eigenvectors.adjoint()
}

/// `exp(A)` by Taylor series with scaling and squaring.
pub fn expm_series(a: &M) -> M {
    let norm = a.iter().map(|x| x.norm()).sum::<f64>();
    let s = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scaled = a * c(0.5f64.powi(s));
    let dim = a.nrows();
    let mut term = M::identity(dim, dim);
    let mut sum = M::identity(dim, dim);
    for k in 1..30 {
        term = &term * &scaled * c(1.0 / k as f64);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn sector_block(m: &M, n: usize, n_e: usize) -> M {
    let states: Vec<usize> = (0..1usize << n).filter(|s| s.count_ones() as usize == n_e).collect();
    M::from_fn(states.len(), states.len(), |i, j| m[(states[i], states[j])])
}
