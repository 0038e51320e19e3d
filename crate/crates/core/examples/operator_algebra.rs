// Normal-ordered products, commutators and the dense occupation-number
// oracle on a four-mode example.

use num_complex::Complex64;
use swrrst::algebra::{normal_order, to_dense, FermionOperator, Ladder};
use swrrst::linalg::max_abs_diff;

fn main() -> swrrst::Result<()> {
    let one = Complex64::new(1.0, 0.0);
    // a_1 a†_1 = 1 - n_1
    let op = normal_order(&[Ladder::Annihilate(1), Ladder::Create(1)], one)?;
    for (key, c) in op.terms() {
        println!("a1 a1† contains {:+} [{key}]", c.re);
    }

    let hop = FermionOperator::excitation(&[2], &[0], Complex64::new(0.5, 0.0));
    let hop = &hop + &hop.adjoint();
    let pair = FermionOperator::excitation(&[3, 2], &[1, 0], Complex64::new(0.1, 0.0));
    let comm = hop.commutator(&pair)?;
    println!("[hop, pair] has {} terms, body rank {}", comm.len(), comm.max_body_rank());

    let lhs = to_dense(&comm, 4)?.matrix;
    let (a, b) = (to_dense(&hop, 4)?.matrix, to_dense(&pair, 4)?.matrix);
    let rhs = &a * &b - &b * &a;
    println!("dense check: max |diff| = {:.1e}", max_abs_diff(&lhs, &rhs));
    Ok(())
}
