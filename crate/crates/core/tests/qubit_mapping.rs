mod common;

use std::collections::BTreeMap;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use swrrst::partition::{NumberPolynomial, SectorLabel};
use swrrst::qubit::{
    jw_map, locality_report, schedule_number_exponential, PauliOperator, PauliString, RotationSchedule,
};
use swrrst::solver::{build_g, solve_swrrst, BuildOptions, H0Choice, SolverOptions};

/// Kronecker product of 2x2 Paulis; qubit 0 is the least significant bit.
fn pauli_matrix(s: &PauliString, n: usize) -> M {
    let i = Complex64::new(0.0, 1.0);
    let mut m = M::identity(1, 1);
    for q in (0..n).rev() {
        let p = match (s.x >> q & 1, s.z >> q & 1) {
            (0, 0) => M::identity(2, 2),
            (1, 0) => M::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]),
            (1, 1) => M::from_row_slice(2, 2, &[c(0.0), -i, i, c(0.0)]),
            _ => M::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]),
        };
        m = m.kronecker(&p);
    }
    m
}

fn pauli_dense(p: &PauliOperator, n: usize) -> M {
    let mut m = M::zeros(1 << n, 1 << n);
    for (s, w) in p.terms() {
        m += pauli_matrix(s, n) * *w;
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn jordan_wigner_preserves_matrices(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let a = random_operator(&mut r, n, 5, 2);
        let p = jw_map(&a, n).unwrap();
        prop_assert!(max_diff(&pauli_dense(&p, n), &oracle_dense(&a, n)) < 1e-10);
        prop_assert!(max_diff(&p.to_dense().unwrap(), &oracle_dense(&a, n)) < 1e-10);
    }

    #[test]
    fn hermitian_images_have_real_weights(seed in any::<u64>()) {
        let mut r = rng(seed);
        let h = random_hermitian(&mut r, 6, 8, 2);
        prop_assert!(jw_map(&h, 6).unwrap().has_real_weights(1e-12));
    }

    #[test]
    fn pauli_products_match_kronecker(x1 in 0u64..64, z1 in 0u64..64, x2 in 0u64..64, z2 in 0u64..64) {
        let (a, b) = (PauliString::new(x1, z1), PauliString::new(x2, z2));
        let (phase, s) = a.multiply(&b);
        let want = pauli_matrix(&a, 6) * pauli_matrix(&b, 6);
        prop_assert!(max_diff(&(pauli_matrix(&s, 6) * phase), &want) < 1e-14);
        let ab = &want - pauli_matrix(&b, 6) * pauli_matrix(&a, 6);
        prop_assert_eq!(a.commutes_with(&b), max_diff(&ab, &M::zeros(64, 64)) < 1e-14);
    }

    #[test]
    fn schedules_are_exact(seed in any::<u64>(), t in -3.0f64..3.0) {
        use rand::Rng;
        let mut r = rng(seed);
        let n = 5;
        let mut monomials = BTreeMap::new();
        for _ in 0..6 {
            let k = r.random_range(1..=3);
            monomials.insert(random_subset(&mut r, n, k), r.random_range(-1.0..1.0));
        }
        let f = NumberPolynomial { monomials };
        let sched = schedule_number_exponential(&f, t);
        let want = expm_oracle(&oracle_dense(&f.to_operator(), n), t);
        prop_assert!(max_diff(&sched.unitary(n).unwrap(), &want) < 1e-12);
        let reread = RotationSchedule::from_text(&sched.to_text()).unwrap();
        prop_assert!(max_diff(&reread.unitary(n).unwrap(), &want) < 1e-12);
    }
}

#[test]
fn converged_g_has_local_sectors() {
    let model = toy_three_one();
    let (h, part) = (&model.hamiltonian, &model.partition);
    let (b, _) = solve_swrrst(h, part, &H0Choice::Diagonal, &SolverOptions::default()).unwrap();
    let g = build_g(h, &b, part, &BuildOptions::default()).unwrap().g;
    let report = locality_report(&g, part).unwrap();
    assert_eq!(report.violations(), 0, "{:?}", report.examples);
    assert!(report.local_form);
    let internal = report.sector(SectorLabel::Internal);
    assert!(internal.census.strings > 0);
    assert_eq!(internal.census.external_touch_histogram.values().sum::<usize>(), internal.census.strings);
    let raw = locality_report(h, part).unwrap();
    assert!(!raw.local_form);
    assert!(raw.sector(SectorLabel::ExternalEnergeticallyDistinct).census.spanning > 0);
}

#[test]
fn pauli_text_round_trip() {
    let model = toy_two_orbital();
    let p = jw_map(&model.hamiltonian, 4).unwrap();
    let back = PauliOperator::from_text(&p.to_text()).unwrap();
    assert!(max_diff(&back.to_dense().unwrap(), &p.to_dense().unwrap()) < 1e-15);
}
