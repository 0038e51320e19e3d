use std::collections::BTreeMap;

use num_complex::Complex64;

use super::generator::{is_upper, Domain, GeneratorB};
use super::h0::{split_h0_w, H0Choice, H0Split};
use crate::algebra::{FermionOperator, TermKey};
use crate::error::{Error, Result};
use crate::partition::OrbitalPartition;

/// Order-by-order generator components `B^(0), B^(1), B^(2)` for
/// `H(λ) = H0 + λW`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbativeSeries {
    pub orders: Vec<GeneratorB>,
}

fn solve_diagonal(
    source: &FermionOperator,
    split: &H0Split,
    domain: Domain,
) -> Result<GeneratorB> {
    let mut amps = BTreeMap::new();
    for (k, s) in source.terms() {
        if !is_upper(k) {
            continue;
        }
        let d = split.denominator(k);
        if d.abs() < 1e-12 {
            return Err(Error::Singularity {
                term: k.to_string(),
                denominator: d.abs(),
            });
        }
        amps.insert(*k, *s / d);
    }
    let rank = amps.keys().map(TermKey::body_rank).max().unwrap_or(0);
    Ok(GeneratorB::from_amplitudes(amps, domain, rank))
}

/// Component `B^(order)` of the generator, `order ∈ {0, 1, 2}`.
///
/// * order 0: `P(-[H0, B0]) = 0` forces `B0 = 0`.
/// * order 1: `P(W - [H0, B1]) = 0`, i.e. `b_μ = w_μ / D_μ`.
/// * order 2: `P(-[H0, B2] + ½[[H0, B1], B1] - [W, B1]) = 0`.
pub fn perturbative_b(
    h: &FermionOperator,
    part: &OrbitalPartition,
    order: usize,
    domain: Domain,
    h0: &H0Choice,
) -> Result<GeneratorB> {
    let series = perturbative_series(h, part, order, domain, h0)?;
    Ok(series.orders[order].clone())
}

pub fn perturbative_series(
    h: &FermionOperator,
    part: &OrbitalPartition,
    max_order: usize,
    domain: Domain,
    h0: &H0Choice,
) -> Result<PerturbativeSeries> {
    if max_order > 2 {
        return Err(Error::Argument(format!(
            "perturbative order must be 0, 1 or 2, got {max_order}"
        )));
    }
    let split = split_h0_w(h, part, h0)?;
    let projector = domain.projector();
    let mut orders = vec![GeneratorB::zero(domain, 0)];
    if max_order >= 1 {
        let source = part.project(&split.w, projector)?;
        orders.push(solve_diagonal(&source, &split, domain)?);
    }
    if max_order >= 2 {
        let b1 = orders[1].op();
        let h0_b1 = split.h0.commutator(b1)?;
        let mut source = h0_b1.commutator(b1)?.scale_real(0.5);
        source -= &split.w.commutator(b1)?;
        let source = part.project(&source, projector)?;
        orders.push(solve_diagonal(&source, &split, domain)?);
    }
    Ok(PerturbativeSeries { orders })
}

impl PerturbativeSeries {
    /// `Σ_i λ^i B^(i)`.
    pub fn sum(&self, lambda: f64) -> FermionOperator {
        let mut total = FermionOperator::zero();
        for (i, b) in self.orders.iter().enumerate() {
            total += &b.op().scale(Complex64::new(lambda.powi(i as i32), 0.0));
        }
        total
    }
}
