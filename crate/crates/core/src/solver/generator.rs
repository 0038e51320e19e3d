use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{FermionOperator, TermKey};
use crate::error::{Error, Result};
use crate::partition::{OrbitalPartition, Projector, SectorLabel};

/// Excitation domain of the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// Energetically distinct off-diagonal external strings.
    #[default]
    Eod,
    /// All off-diagonal external strings (isoenergetic ones included).
    Od,
}

impl Domain {
    pub fn projector(self) -> Projector {
        match self {
            Domain::Eod => Projector::Sector(SectorLabel::ExternalEnergeticallyDistinct),
            Domain::Od => Projector::OffDiagonal,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Eod => "eod",
            Domain::Od => "od",
        }
    }
}

/// Key representing the pair `{E^C_A, E^A_C}` in amplitude storage.
pub(crate) fn is_upper(key: &TermKey) -> bool {
    *key < key.adjoint()
}

/// Anti-Hermitian generator confined to an off-diagonal external domain.
///
/// Only one amplitude per conjugate pair is stored; the operator is
/// materialized as `Σ b_μ E_μ - conj(b_μ) E_μ†`, which is anti-Hermitian by
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorB {
    amplitudes: BTreeMap<TermKey, Complex64>,
    op: FermionOperator,
    domain: Domain,
    body_rank: usize,
}

impl GeneratorB {
    pub fn zero(domain: Domain, body_rank: usize) -> Self {
        Self {
            amplitudes: BTreeMap::new(),
            op: FermionOperator::zero(),
            domain,
            body_rank,
        }
    }

    /// Builds from amplitudes keyed by upper representatives; a lower key is
    /// folded onto its partner as `-conj(b)`.
    pub fn from_amplitudes(
        amplitudes: impl IntoIterator<Item = (TermKey, Complex64)>,
        domain: Domain,
        body_rank: usize,
    ) -> Self {
        let mut amps: BTreeMap<TermKey, Complex64> = BTreeMap::new();
        for (k, b) in amplitudes {
            if k.is_diagonal() {
                continue;
            }
            if is_upper(&k) {
                *amps.entry(k).or_default() += b;
            } else {
                *amps.entry(k.adjoint()).or_default() -= b.conj();
            }
        }
        amps.retain(|_, b| b.norm() >= crate::algebra::DEFAULT_PRUNE);
        let op = materialize(&amps);
        Self {
            amplitudes: amps,
            op,
            domain,
            body_rank,
        }
    }

    /// Wraps an existing operator, checking anti-Hermiticity and domain
    /// confinement.
    pub fn from_operator(
        op: &FermionOperator,
        domain: Domain,
        part: &OrbitalPartition,
    ) -> Result<Self> {
        let scale = op.max_abs().max(1.0);
        if !op.is_anti_hermitian(1e-12 * scale) {
            return Err(Error::Validation("generator is not anti-Hermitian".into()));
        }
        let body_rank = op.max_body_rank();
        let b = Self::from_amplitudes(
            op.terms().filter(|(k, _)| is_upper(k)).map(|(k, c)| (*k, *c)),
            domain,
            body_rank,
        );
        b.check_confinement(part)?;
        Ok(b)
    }

    pub fn op(&self) -> &FermionOperator {
        &self.op
    }

    pub fn amplitudes(&self) -> &BTreeMap<TermKey, Complex64> {
        &self.amplitudes
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn body_rank(&self) -> usize {
        self.body_rank
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.op.norm()
    }

    /// Largest many-body rank actually present.
    pub fn max_body_rank(&self) -> usize {
        self.op.max_body_rank()
    }

    /// Every stored string lies in the generator's domain.
    pub fn check_confinement(&self, part: &OrbitalPartition) -> Result<()> {
        let target = self.domain.projector();
        for k in self.op.keys() {
            if !target.accepts(part.classify(k)?) {
                return Err(Error::Structure(format!(
                    "generator term {k} lies outside the {} domain",
                    self.domain.name()
                )));
            }
        }
        Ok(())
    }
}

fn materialize(amps: &BTreeMap<TermKey, Complex64>) -> FermionOperator {
    FermionOperator::from_terms(
        amps.iter()
            .flat_map(|(k, b)| [(*k, *b), (k.adjoint(), -b.conj())]),
    )
}
