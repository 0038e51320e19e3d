use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::jw::jw_map;
use super::pauli::{PauliOperator, PauliString};
use crate::algebra::{mask_indices, FermionOperator};
use crate::error::Result;
use crate::partition::{OrbitalPartition, SectorLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportWidth {
    /// `hi - lo + 1` over the non-identity qubits; 0 for the identity.
    pub width: usize,
    pub max_qubit: Option<usize>,
    pub touches_external: bool,
}

pub fn support_width(s: &PauliString, part: &OrbitalPartition) -> SupportWidth {
    let sup = s.support();
    if sup == 0 {
        return SupportWidth {
            width: 0,
            max_qubit: None,
            touches_external: false,
        };
    }
    let lo = sup.trailing_zeros() as usize;
    let hi = 63 - sup.leading_zeros() as usize;
    SupportWidth {
        width: hi - lo + 1,
        max_qubit: Some(hi),
        touches_external: sup & part.external_mask() != 0,
    }
}

/// External qubits carrying X or Y whose iso partner does not.
fn unpaired_flips(s: &PauliString, part: &OrbitalPartition) -> u64 {
    let flips = s.x & part.external_mask();
    mask_indices(flips)
        .filter(|&q| flips & (1 << part.iso_partner(q)) == 0)
        .fold(0, |m, q| m | (1 << q))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StringCensus {
    pub strings: usize,
    pub width_histogram: BTreeMap<usize, usize>,
    /// Number of external qubits touched -> string count.
    pub external_touch_histogram: BTreeMap<usize, usize>,
    /// Strings acting on both active and external qubits.
    pub spanning: usize,
    /// Strings with X/Y on an external qubit but not on its iso partner.
    pub unpaired_external_flips: usize,
}

pub fn pauli_census(p: &PauliOperator, part: &OrbitalPartition) -> StringCensus {
    let mut c = StringCensus {
        strings: p.len(),
        width_histogram: BTreeMap::new(),
        external_touch_histogram: BTreeMap::new(),
        spanning: 0,
        unpaired_external_flips: 0,
    };
    for (s, _) in p.terms() {
        let w = support_width(s, part);
        *c.width_histogram.entry(w.width).or_default() += 1;
        let ext = (s.support() & part.external_mask()).count_ones() as usize;
        *c.external_touch_histogram.entry(ext).or_default() += 1;
        if ext > 0 && s.support() & part.active_mask() != 0 {
            c.spanning += 1;
        }
        if unpaired_flips(s, part) != 0 {
            c.unpaired_external_flips += 1;
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectorLocality {
    pub sector: SectorLabel,
    pub census: StringCensus,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalityReport {
    pub n_qubits: usize,
    pub sectors: Vec<SectorLocality>,
    /// First few offending strings, `sector: letters`.
    pub examples: Vec<String>,
    /// No eod strings remain and no sector violates its locality rule.
    pub local_form: bool,
}

impl LocalityReport {
    pub fn violations(&self) -> usize {
        self.sectors.iter().map(|s| s.violations).sum()
    }

    pub fn sector(&self, s: SectorLabel) -> &SectorLocality {
        self.sectors.iter().find(|x| x.sector == s).expect("all sectors present")
    }
}

fn violates(sector: SectorLabel, s: &PauliString, part: &OrbitalPartition) -> bool {
    match sector {
        SectorLabel::Internal => s.support() & part.external_mask() != 0,
        SectorLabel::ExternalDiagonal => !s.is_diagonal(),
        SectorLabel::ExternalIsoenergetic => unpaired_flips(s, part) != 0,
        // eod strings are expected to vanish altogether; counted separately
        SectorLabel::ExternalEnergeticallyDistinct => false,
    }
}

const MAX_EXAMPLES: usize = 8;

/// Maps each sector of `g` separately and checks the locality rules:
/// internal strings stay on active qubits, diagonal strings are Z/I only,
/// isoenergetic strings flip external qubits only in whole iso pairs.
pub fn locality_report(g: &FermionOperator, part: &OrbitalPartition) -> Result<LocalityReport> {
    let d = part.decompose(g)?;
    let n = part.n_modes();
    let mut sectors = Vec::new();
    let mut examples = Vec::new();
    for sector in SectorLabel::ALL {
        let p = jw_map(d.part(sector), n)?;
        let census = pauli_census(&p, part);
        let mut violations = 0;
        for (s, _) in p.terms() {
            if violates(sector, s, part) {
                violations += 1;
                if examples.len() < MAX_EXAMPLES {
                    examples.push(format!("{sector}: {}", s.letters(n)));
                }
            }
        }
        sectors.push(SectorLocality {
            sector,
            census,
            violations,
        });
    }
    let eod_empty = sectors
        .iter()
        .any(|s| s.sector == SectorLabel::ExternalEnergeticallyDistinct && s.census.strings == 0);
    let local_form = eod_empty && sectors.iter().all(|s| s.violations == 0);
    Ok(LocalityReport {
        n_qubits: n,
        sectors,
        examples,
        local_form,
    })
}
