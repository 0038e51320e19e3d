use serde::{Deserialize, Serialize};

use super::bch::{bch_converged, bch_transform};
use super::generator::{Domain, GeneratorB};
use crate::algebra::FermionOperator;
use crate::error::{Error, Result};
use crate::partition::OrbitalPartition;

/// Controls how the commutator series for `G` is summed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Increment norm at which the series is considered converged.
    pub series_tol: f64,
    pub max_rank: usize,
    /// Drop terms above two-body rank from `G`, reporting their norm.
    pub truncate_two_body: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            series_tol: 1e-12,
            max_rank: 200,
            truncate_two_body: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltG {
    pub g: FermionOperator,
    /// Everything removed from `e^B H e^{-B}`: the residual domain part and,
    /// if requested, the above-two-body remainder.
    pub discarded: FermionOperator,
    pub diagnostics: GDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GDiagnostics {
    /// `Σ|c|` of the discarded terms; bounds the operator norm of the
    /// discarded part and hence the shift of any eigenvalue.
    pub discarded_norm: f64,
    pub discarded_norm_l2: f64,
    /// Share of the discarded norm that came from two-body truncation.
    pub truncated_norm: f64,
    pub series_rank: usize,
    pub last_increment: f64,
    pub terms: usize,
    pub max_body_rank: usize,
}

/// `G = e^B H e^{-B}` with its `domain` projection removed.
pub fn build_g(
    h: &FermionOperator,
    b: &GeneratorB,
    part: &OrbitalPartition,
    opts: &BuildOptions,
) -> Result<BuiltG> {
    let series = bch_converged(h, b.op(), opts.series_tol, opts.max_rank)?;
    let residual_part = part.project(&series.op, b.domain().projector())?;
    let mut g = &series.op - &residual_part;
    let mut discarded = residual_part;
    let mut truncated_norm = 0.0;
    if opts.truncate_two_body {
        let high = g.filter(|k| k.body_rank() > 2);
        truncated_norm = high.norm_l1();
        g = g.truncate_rank(2);
        discarded += &high;
    }
    let diagnostics = GDiagnostics {
        discarded_norm: discarded.norm_l1(),
        discarded_norm_l2: discarded.norm(),
        truncated_norm,
        series_rank: series.rank,
        last_increment: series.last_increment,
        terms: g.len(),
        max_body_rank: g.max_body_rank(),
    };
    Ok(BuiltG {
        g,
        discarded,
        diagnostics,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonCommutation {
    /// `‖[B, H]‖` (coefficient 2-norm).
    pub norm: f64,
    pub threshold: f64,
    /// False when `B = 0`, where the statement has no content.
    pub applicable: bool,
    pub nonzero: bool,
}

/// A generator solving the elimination equations cannot commute with `H`
/// unless `H` had no energetically distinct part to begin with.
pub fn check_noncommutation(h: &FermionOperator, b: &GeneratorB) -> Result<NonCommutation> {
    let norm = b.op().commutator(h)?.norm();
    let threshold = 1e-8 * h.norm() * b.norm();
    let applicable = !b.is_zero();
    Ok(NonCommutation {
        norm,
        threshold,
        applicable,
        nonzero: applicable && norm > threshold,
    })
}

/// `H_C = e^C H e^{-C}` for a user-supplied anti-Hermitian `C`. With
/// `rank = None` the series is summed to convergence.
pub fn apply_auxiliary(
    h: &FermionOperator,
    c: &FermionOperator,
    rank: Option<usize>,
) -> Result<FermionOperator> {
    if !c.is_anti_hermitian(1e-12 * c.max_abs().max(1.0)) {
        return Err(Error::Validation(
            "auxiliary generator C must be anti-Hermitian".into(),
        ));
    }
    match rank {
        Some(l) => bch_transform(h, c, l, None),
        None => Ok(bch_converged(h, c, 1e-12, BuildOptions::default().max_rank)?.op),
    }
}

/// Convenience: the domain the generator was solved in decides which
/// sectors of `G` survive.
pub fn kept_sectors(domain: Domain) -> &'static [crate::partition::SectorLabel] {
    use crate::partition::SectorLabel::*;
    match domain {
        Domain::Eod => &[Internal, ExternalDiagonal, ExternalIsoenergetic],
        Domain::Od => &[Internal, ExternalDiagonal],
    }
}
