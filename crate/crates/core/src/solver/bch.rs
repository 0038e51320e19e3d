use crate::algebra::{AlgebraLimits, FermionOperator};
use crate::error::{Error, Result};

/// `H + Σ_{i=1..rank} (1/i!) ad_B^i(H)` with `ad_B(X) = [B, X]`.
///
/// This is the commutator expansion of `e^B H e^{-B}`; written with `[·, B]`
/// nesting the i-th term carries the sign `(-1)^i`. When `body_cap` is set,
/// every nested commutator is truncated to that many-body rank before the
/// next one is formed.
pub fn bch_transform(
    h: &FermionOperator,
    b: &FermionOperator,
    rank: usize,
    body_cap: Option<usize>,
) -> Result<FermionOperator> {
    bch_transform_with(h, b, rank, body_cap, &AlgebraLimits::default())
}

pub fn bch_transform_with(
    h: &FermionOperator,
    b: &FermionOperator,
    rank: usize,
    body_cap: Option<usize>,
    limits: &AlgebraLimits,
) -> Result<FermionOperator> {
    if rank == 0 {
        return Err(Error::Argument("commutator rank must be at least 1".into()));
    }
    let mut total = h.clone();
    let mut nested = h.clone();
    for i in 1..=rank {
        nested = b.commutator_with(&nested, limits)?.scale_real(1.0 / i as f64);
        if let Some(cap) = body_cap {
            nested = nested.truncate_rank(cap);
        }
        if nested.is_empty() {
            break;
        }
        total += &nested;
    }
    Ok(total)
}

/// Result of summing the commutator series until the increments vanish.
#[derive(Debug, Clone)]
pub struct ConvergedSeries {
    pub op: FermionOperator,
    /// Highest commutator rank added.
    pub rank: usize,
    /// Norm of the last increment added.
    pub last_increment: f64,
}

/// Sums `e^B H e^{-B}` by raising the commutator rank until the increment
/// norm falls below `tol`; fails with a capacity error at `max_rank`.
pub fn bch_converged(
    h: &FermionOperator,
    b: &FermionOperator,
    tol: f64,
    max_rank: usize,
) -> Result<ConvergedSeries> {
    let mut total = h.clone();
    let mut nested = h.clone();
    for i in 1..=max_rank {
        nested = b.commutator(&nested)?.scale_real(1.0 / i as f64);
        let inc = nested.norm();
        total += &nested;
        if inc < tol {
            return Ok(ConvergedSeries {
                op: total,
                rank: i,
                last_increment: inc,
            });
        }
    }
    Err(Error::Capacity {
        what: "commutator rank before series convergence",
        size: max_rank + 1,
        limit: max_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_generator_leaves_h() {
        let h = FermionOperator::number(0) + FermionOperator::excitation(&[0], &[1], Complex64::new(0.5, 0.0))
            + FermionOperator::excitation(&[1], &[0], Complex64::new(0.5, 0.0));
        assert_eq!(bch_transform(&h, &FermionOperator::zero(), 4, None).unwrap(), h);
        let conv = bch_converged(&h, &FermionOperator::zero(), 1e-12, 10).unwrap();
        assert_eq!(conv.op, h);
        assert_eq!(conv.rank, 1);
    }

    #[test]
    fn linear_term_matches_definition() {
        let h = FermionOperator::number(0).scale_real(-1.0) + FermionOperator::number(1);
        let b = FermionOperator::excitation(&[1], &[0], Complex64::new(0.1, 0.0))
            - FermionOperator::excitation(&[0], &[1], Complex64::new(0.1, 0.0));
        let g1 = bch_transform(&h, &b, 1, None).unwrap();
        let expected = &h + &b.commutator(&h).unwrap();
        assert_eq!(g1, expected);
        // same thing written as H - [H, B]
        let alt = &h - &h.commutator(&b).unwrap();
        assert!(g1.distance(&alt) < 1e-15);
    }

    #[test]
    fn rank_zero_is_rejected() {
        assert!(bch_transform(&FermionOperator::zero(), &FermionOperator::zero(), 0, None).is_err());
    }
}
