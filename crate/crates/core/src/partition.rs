//! Active/external partition of spin-orbitals and the sector projectors.
//!
//! Spin-orbitals are addressed by their *position* in the partition
//! ordering: positions `2i` and `2i + 1` hold the up and down spin-orbitals of
//! one spatial orbital, the first `2(n - k)` positions are active and the
//! remaining `2k` external. Operators handed to this module are expected to be
//! expressed in position labels already; [`OrbitalPartition::to_positions`]
//! relabels an operator given in its original spin-orbital labels.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{mask_indices, FermionOperator, TermKey, MAX_MODES};
use crate::error::{Error, Result};

/// Relative tolerance for the isoenergetic energy-sum test.
pub const DEFAULT_ISO_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorLabel {
    Internal,
    ExternalDiagonal,
    ExternalIsoenergetic,
    ExternalEnergeticallyDistinct,
}

impl SectorLabel {
    pub const ALL: [SectorLabel; 4] = [
        SectorLabel::Internal,
        SectorLabel::ExternalDiagonal,
        SectorLabel::ExternalIsoenergetic,
        SectorLabel::ExternalEnergeticallyDistinct,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            SectorLabel::Internal => "internal",
            SectorLabel::ExternalDiagonal => "d",
            SectorLabel::ExternalIsoenergetic => "ie",
            SectorLabel::ExternalEnergeticallyDistinct => "eod",
        }
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

/// Target of a projection: one sector, or the off-diagonal external union.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Projector {
    Sector(SectorLabel),
    /// `ie ∪ eod`.
    OffDiagonal,
}

impl Projector {
    pub fn accepts(self, label: SectorLabel) -> bool {
        match self {
            Projector::Sector(s) => s == label,
            Projector::OffDiagonal => matches!(
                label,
                SectorLabel::ExternalIsoenergetic | SectorLabel::ExternalEnergeticallyDistinct
            ),
        }
    }
}

impl From<SectorLabel> for Projector {
    fn from(s: SectorLabel) -> Self {
        Projector::Sector(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalPartition {
    n_orbitals: usize,
    n_external: usize,
    /// Energy per spin-orbital position.
    energies: Vec<f64>,
    /// `ordering[position]` = original zero-based spin-orbital label.
    ordering: Vec<usize>,
    iso_tol: f64,
}

impl OrbitalPartition {
    /// Partition with the identity ordering and per-position spin-orbital
    /// energies.
    pub fn new(n_orbitals: usize, n_external: usize, energies: Vec<f64>) -> Result<Self> {
        let ordering = (0..2 * n_orbitals).collect();
        Self::with_ordering(n_orbitals, n_external, energies, ordering)
    }

    /// Partition from energies of spatial orbitals (indexed by original
    /// orbital label) and an optional orbital order whose first `n - k`
    /// entries are the active orbitals.
    pub fn from_orbitals(
        n_external: usize,
        orbital_energies: &[f64],
        orbital_order: Option<&[usize]>,
    ) -> Result<Self> {
        let n = orbital_energies.len();
        let order: Vec<usize> = orbital_order.map_or_else(|| (0..n).collect(), <[usize]>::to_vec);
        if order.len() != n {
            return Err(Error::Validation(format!(
                "orbital order has {} entries for {n} orbitals",
                order.len()
            )));
        }
        let mut ordering = Vec::with_capacity(2 * n);
        let mut energies = Vec::with_capacity(2 * n);
        for &orb in &order {
            if orb >= n {
                return Err(Error::Bounds { index: orb, limit: n });
            }
            ordering.extend([2 * orb, 2 * orb + 1]);
            energies.extend([orbital_energies[orb]; 2]);
        }
        Self::with_ordering(n, n_external, energies, ordering)
    }

    pub fn with_ordering(
        n_orbitals: usize,
        n_external: usize,
        energies: Vec<f64>,
        ordering: Vec<usize>,
    ) -> Result<Self> {
        let n_modes = 2 * n_orbitals;
        if n_orbitals == 0 || n_modes > MAX_MODES {
            return Err(Error::Validation(format!(
                "orbital count must be in 1..={}, got {n_orbitals}",
                MAX_MODES / 2
            )));
        }
        if n_external > n_orbitals {
            return Err(Error::Validation(format!(
                "external count {n_external} exceeds orbital count {n_orbitals}"
            )));
        }
        if energies.len() != n_modes || ordering.len() != n_modes {
            return Err(Error::Validation(format!(
                "expected {n_modes} spin-orbital energies and ordering entries, got {} and {}",
                energies.len(),
                ordering.len()
            )));
        }
        let mut seen = vec![false; n_modes];
        for &label in &ordering {
            if label >= n_modes || std::mem::replace(&mut seen[label], true) {
                return Err(Error::Validation(format!(
                    "ordering is not a permutation of 1..={n_modes}"
                )));
            }
        }
        for pair in 0..n_orbitals {
            let (up, down) = (ordering[2 * pair], ordering[2 * pair + 1]);
            if up / 2 != down / 2 || up == down {
                return Err(Error::Validation(format!(
                    "positions {} and {} must hold the two spin-orbitals of one orbital",
                    2 * pair + 1,
                    2 * pair + 2
                )));
            }
            if energies[2 * pair] != energies[2 * pair + 1] {
                return Err(Error::Validation(format!(
                    "isoenergetic pair at positions {} and {} has unequal energies",
                    2 * pair + 1,
                    2 * pair + 2
                )));
            }
        }
        let scale = energies.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        Ok(Self {
            n_orbitals,
            n_external,
            energies,
            ordering,
            iso_tol: DEFAULT_ISO_REL_TOL * scale,
        })
    }

    pub fn with_iso_tol(mut self, tol: f64) -> Self {
        self.iso_tol = tol;
        self
    }

    pub fn n_orbitals(&self) -> usize {
        self.n_orbitals
    }

    pub fn n_external(&self) -> usize {
        self.n_external
    }

    pub fn n_modes(&self) -> usize {
        2 * self.n_orbitals
    }

    pub fn n_active_modes(&self) -> usize {
        2 * (self.n_orbitals - self.n_external)
    }

    pub fn iso_tol(&self) -> f64 {
        self.iso_tol
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, p: usize) -> f64 {
        self.energies[p]
    }

    pub fn ordering(&self) -> &[usize] {
        &self.ordering
    }

    pub fn is_active(&self, p: usize) -> bool {
        p < self.n_active_modes()
    }

    pub fn active_mask(&self) -> u64 {
        (1u64 << self.n_active_modes()) - 1
    }

    pub fn external_mask(&self) -> u64 {
        let all = if self.n_modes() == 64 {
            u64::MAX
        } else {
            (1u64 << self.n_modes()) - 1
        };
        all & !self.active_mask()
    }

    /// Isoenergetic partner `e(p)`: the other spin-orbital of the same orbital.
    pub fn iso_partner(&self, p: usize) -> usize {
        p ^ 1
    }

    pub fn energy_sum(&self, mask: u64) -> f64 {
        mask_indices(mask).map(|p| self.energies[p]).sum()
    }

    /// Relabels an operator from original spin-orbital labels to positions.
    pub fn to_positions(&self, op: &FermionOperator) -> Result<FermionOperator> {
        let mut map = vec![0; self.n_modes()];
        for (pos, &label) in self.ordering.iter().enumerate() {
            map[label] = pos;
        }
        op.relabel(&map)
    }

    /// Inverse of [`to_positions`](Self::to_positions).
    pub fn to_labels(&self, op: &FermionOperator) -> Result<FermionOperator> {
        op.relabel(&self.ordering)
    }

    fn check_key(&self, key: &TermKey) -> Result<()> {
        match key.max_index() {
            Some(p) if p >= self.n_modes() => Err(Error::Bounds {
                index: p,
                limit: self.n_modes(),
            }),
            _ => Ok(()),
        }
    }

    pub fn classify(&self, key: &TermKey) -> Result<SectorLabel> {
        self.check_key(key)?;
        Ok(if key.support() & self.external_mask() == 0 {
            SectorLabel::Internal
        } else if key.is_diagonal() {
            SectorLabel::ExternalDiagonal
        } else if (self.energy_sum(key.creators) - self.energy_sum(key.annihilators)).abs()
            <= self.iso_tol
        {
            SectorLabel::ExternalIsoenergetic
        } else {
            SectorLabel::ExternalEnergeticallyDistinct
        })
    }

    /// An isoenergetic term whose upper and lower orbital multisets differ:
    /// the energy sums agree only by accident.
    pub fn is_accidental_degeneracy(&self, key: &TermKey) -> bool {
        let orbitals = |mask: u64| {
            let mut v: Vec<usize> = mask_indices(mask).map(|p| p / 2).collect();
            v.sort_unstable();
            v
        };
        matches!(self.classify(key), Ok(SectorLabel::ExternalIsoenergetic))
            && orbitals(key.creators) != orbitals(key.annihilators)
    }

    pub fn project(&self, op: &FermionOperator, target: impl Into<Projector>) -> Result<FermionOperator> {
        let target = target.into();
        let mut keep = Vec::new();
        for (k, c) in op.terms() {
            if target.accepts(self.classify(k)?) {
                keep.push((*k, *c));
            }
        }
        Ok(FermionOperator::from_terms(keep))
    }

    pub fn decompose(&self, op: &FermionOperator) -> Result<Decomposition> {
        let mut parts: [Vec<(TermKey, Complex64)>; 4] = Default::default();
        for (k, c) in op.terms() {
            let slot = match self.classify(k)? {
                SectorLabel::Internal => 0,
                SectorLabel::ExternalDiagonal => 1,
                SectorLabel::ExternalIsoenergetic => 2,
                SectorLabel::ExternalEnergeticallyDistinct => 3,
            };
            parts[slot].push((*k, *c));
        }
        let [internal, diagonal, isoenergetic, distinct] = parts.map(FermionOperator::from_terms);
        Ok(Decomposition {
            internal,
            diagonal,
            isoenergetic,
            distinct,
        })
    }

    /// Term counts and norms per sector, with accidental degeneracies listed.
    pub fn census(&self, op: &FermionOperator) -> Result<SectorCensus> {
        let d = self.decompose(op)?;
        let sectors = SectorLabel::ALL
            .iter()
            .map(|&s| {
                let part = d.part(s);
                SectorStats {
                    sector: s,
                    terms: part.len(),
                    norm: part.norm(),
                    norm_l1: part.norm_l1(),
                }
            })
            .collect();
        let accidental = d
            .isoenergetic
            .keys()
            .filter(|k| self.is_accidental_degeneracy(k))
            .map(ToString::to_string)
            .collect();
        Ok(SectorCensus {
            sectors,
            accidental_degeneracies: accidental,
        })
    }
}

/// The four sector projections of an operator; they sum to the operator.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Decomposition {
    pub internal: FermionOperator,
    pub diagonal: FermionOperator,
    pub isoenergetic: FermionOperator,
    pub distinct: FermionOperator,
}

impl Decomposition {
    pub fn part(&self, s: SectorLabel) -> &FermionOperator {
        match s {
            SectorLabel::Internal => &self.internal,
            SectorLabel::ExternalDiagonal => &self.diagonal,
            SectorLabel::ExternalIsoenergetic => &self.isoenergetic,
            SectorLabel::ExternalEnergeticallyDistinct => &self.distinct,
        }
    }

    pub fn sum(&self) -> FermionOperator {
        &(&(&self.internal + &self.diagonal) + &self.isoenergetic) + &self.distinct
    }

    pub fn off_diagonal(&self) -> FermionOperator {
        &self.isoenergetic + &self.distinct
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorStats {
    pub sector: SectorLabel,
    pub terms: usize,
    pub norm: f64,
    pub norm_l1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorCensus {
    pub sectors: Vec<SectorStats>,
    pub accidental_degeneracies: Vec<String>,
}

impl SectorCensus {
    pub fn terms(&self, s: SectorLabel) -> usize {
        self.sectors
            .iter()
            .find(|x| x.sector == s)
            .map_or(0, |x| x.terms)
    }
}

/// Diagonal operator written as a polynomial in number operators:
/// `Σ_S c_S Π_{p∈S} n_p`, keyed by the bit mask of `S`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NumberPolynomial {
    pub monomials: BTreeMap<u64, f64>,
}

impl NumberPolynomial {
    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.monomials
            .keys()
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Value on an occupation-number basis state.
    pub fn evaluate(&self, occupation: u64) -> f64 {
        self.monomials
            .iter()
            .filter(|(m, _)| *m & occupation == **m)
            .map(|(_, c)| c)
            .sum()
    }

    pub fn to_operator(&self) -> FermionOperator {
        FermionOperator::from_terms(
            self.monomials
                .iter()
                .map(|(&m, &c)| (TermKey::new(m, m), Complex64::new(c, 0.0))),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            monomials: self.monomials.iter().map(|(&m, &c)| (m, c * factor)).collect(),
        }
    }
}

/// Rewrites a diagonal operator `Σ c E^S_S` as `Σ c Π_{p∈S} n_p`.
///
/// With the canonical string convention `E^S_S` equals the number-operator
/// product exactly, so no sign correction is needed.
pub fn to_number_polynomial(d: &FermionOperator, part: &OrbitalPartition) -> Result<NumberPolynomial> {
    let mut monomials = BTreeMap::new();
    let scale = d.max_abs().max(1.0);
    for (k, c) in d.terms() {
        part.check_key(k)?;
        if !k.is_diagonal() {
            return Err(Error::Domain(format!("term {k} is not diagonal")));
        }
        if c.im.abs() > 1e-12 * scale {
            return Err(Error::Domain(format!(
                "diagonal term {k} has non-real coefficient {c}"
            )));
        }
        monomials.insert(k.creators, c.re);
    }
    Ok(NumberPolynomial { monomials })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// n = 3 orbitals, k = 2 external: active {0,1}, external {2,3,4,5}.
    fn part() -> OrbitalPartition {
        OrbitalPartition::new(3, 2, vec![-1.0, -1.0, 0.5, 0.5, 1.3, 1.3]).unwrap()
    }

    #[test]
    fn classification_examples() {
        let p = part();
        let key = |cr: &[usize], an: &[usize]| TermKey::from_indices(cr, an).unwrap().0;
        // E^α_β
        assert_eq!(p.classify(&key(&[0], &[1])).unwrap(), SectorLabel::Internal);
        // E^{αa}_{αa}
        assert_eq!(
            p.classify(&key(&[0, 2], &[0, 2])).unwrap(),
            SectorLabel::ExternalDiagonal
        );
        // E^{ab}_{e(a)e(b)}
        assert_eq!(
            p.classify(&key(&[2, 4], &[3, 5])).unwrap(),
            SectorLabel::ExternalIsoenergetic
        );
        // E^{αa}_{e(α)e(a)}
        assert_eq!(
            p.classify(&key(&[0, 2], &[1, 3])).unwrap(),
            SectorLabel::ExternalIsoenergetic
        );
        // E^a_b with distinct energies
        assert_eq!(
            p.classify(&key(&[2], &[4])).unwrap(),
            SectorLabel::ExternalEnergeticallyDistinct
        );
        assert_eq!(p.classify(&TermKey::IDENTITY).unwrap(), SectorLabel::Internal);
        assert!(matches!(
            p.classify(&key(&[6], &[0])),
            Err(Error::Bounds { index: 6, .. })
        ));
    }

    #[test]
    fn diagonal_operator_has_no_eod_part() {
        let p = part();
        let h = FermionOperator::number(2).scale_real(0.5) + FermionOperator::number(0);
        assert!(p
            .project(&h, SectorLabel::ExternalEnergeticallyDistinct)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn off_diagonal_projector_is_union() {
        let p = part();
        let a = FermionOperator::excitation(&[2], &[3], c(1.0))
            + FermionOperator::excitation(&[2], &[4], c(2.0))
            + FermionOperator::number(2);
        let od = p.project(&a, Projector::OffDiagonal).unwrap();
        assert_eq!(od.len(), 2);
    }

    #[test]
    fn accidental_degeneracy_is_flagged() {
        // orbital energies 0, 1, 2: E^{a(1) a(1)}_{a(0) a(2)} sums 2 = 2
        let p = OrbitalPartition::new(4, 3, vec![-3.0, -3.0, 0.0, 0.0, 1.0, 1.0, 2.0, 2.0]).unwrap();
        let key = TermKey::from_indices(&[4, 5], &[2, 6]).unwrap().0;
        assert_eq!(p.classify(&key).unwrap(), SectorLabel::ExternalIsoenergetic);
        assert!(p.is_accidental_degeneracy(&key));
        let pair = TermKey::from_indices(&[4], &[5]).unwrap().0;
        assert!(!p.is_accidental_degeneracy(&pair));
        let census = p
            .census(&FermionOperator::from_term(key, c(1.0)))
            .unwrap();
        assert_eq!(census.accidental_degeneracies, vec![key.to_string()]);
    }

    #[test]
    fn number_polynomial_examples() {
        let p = part();
        let d = FermionOperator::number(2).scale_real(0.7)
            + FermionOperator::excitation(&[0, 2], &[0, 2], c(-0.2));
        let poly = to_number_polynomial(&d, &p).unwrap();
        assert_eq!(poly.monomials[&0b100], 0.7);
        assert_eq!(poly.monomials[&0b101], -0.2);
        assert_eq!(poly.to_operator(), d);
        assert!(to_number_polynomial(&FermionOperator::zero(), &p)
            .unwrap()
            .is_empty());
        let err = to_number_polynomial(&FermionOperator::excitation(&[2], &[3], c(1.0)), &p);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    #[test]
    fn ordering_validation() {
        // positions 1,2 must be one orbital
        assert!(OrbitalPartition::with_ordering(2, 1, vec![0.0; 4], vec![0, 2, 1, 3]).is_err());
        assert!(OrbitalPartition::new(2, 1, vec![0.0, 0.1, 1.0, 1.0]).is_err());
        let p = OrbitalPartition::from_orbitals(1, &[2.0, -1.0], Some(&[1, 0])).unwrap();
        assert_eq!(p.ordering(), &[2, 3, 0, 1]);
        assert_eq!(p.energies(), &[-1.0, -1.0, 2.0, 2.0]);
        // label 2 (orbital 1 up) sits at position 0
        let op = p.to_positions(&FermionOperator::number(2)).unwrap();
        assert_eq!(op, FermionOperator::number(0));
        assert_eq!(p.to_labels(&op).unwrap(), FermionOperator::number(2));
    }
}
