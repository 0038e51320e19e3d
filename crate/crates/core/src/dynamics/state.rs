use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::DEFAULT_ORACLE_CAP;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// State vector over the `2^N` occupation-number basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct FockStateVector {
    pub amps: Vec<Complex64>,
    n_modes: usize,
    sector: Option<usize>,
}

/// How to fill a particle-number sector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorSpec {
    /// Determinant occupying the `n_e` lowest of these energies.
    LowestH0(Vec<f64>),
    Determinant(u64),
    /// Unnormalized amplitudes on basis states of the sector.
    Superposition(Vec<(u64, Complex64)>),
}

impl FockStateVector {
    pub fn basis(n_modes: usize, state: u64) -> Result<Self> {
        check_modes(n_modes)?;
        if state >> n_modes != 0 {
            return Err(Error::Bounds {
                index: 63 - state.leading_zeros() as usize,
                limit: n_modes,
            });
        }
        let mut amps = vec![Complex64::default(); 1 << n_modes];
        amps[state as usize] = Complex64::new(1.0, 0.0);
        Ok(Self {
            amps,
            n_modes,
            sector: Some(state.count_ones() as usize),
        })
    }

    pub fn from_amplitudes(n_modes: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_modes(n_modes)?;
        if amps.len() != 1 << n_modes {
            return Err(Error::Argument(format!(
                "expected {} amplitudes, got {}",
                1usize << n_modes,
                amps.len()
            )));
        }
        Ok(Self {
            amps,
            n_modes,
            sector: None,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn sector(&self) -> Option<usize> {
        self.sector
    }

    pub fn with_sector(mut self, n_e: Option<usize>) -> Self {
        self.sector = n_e;
        self
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn overlap(&self, other: &FockStateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Weight outside the tagged sector (0 when untagged).
    pub fn leakage(&self) -> f64 {
        let Some(n_e) = self.sector else { return 0.0 };
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i.count_ones() as usize != n_e)
            .map(|(_, a)| a.norm_sqr())
            .fold(0.0, |a, b| a + b)
            .sqrt()
    }

    pub fn apply_matrix(&self, m: &CMatrix) -> FockStateVector {
        let v = m * nalgebra::DVector::from_column_slice(&self.amps);
        FockStateVector {
            amps: v.as_slice().to_vec(),
            n_modes: self.n_modes,
            sector: self.sector,
        }
    }
}

fn check_modes(n_modes: usize) -> Result<()> {
    if n_modes > DEFAULT_ORACLE_CAP {
        return Err(Error::Capacity {
            what: "modes for state vector",
            size: n_modes,
            limit: DEFAULT_ORACLE_CAP,
        });
    }
    Ok(())
}

/// `|Θ(n_e)>` on `n_modes` modes.
pub fn sector_prepare(n_modes: usize, n_e: usize, spec: &SectorSpec) -> Result<FockStateVector> {
    check_modes(n_modes)?;
    if n_e > n_modes {
        return Err(Error::Argument(format!(
            "sector n_e = {n_e} exceeds {n_modes} modes"
        )));
    }
    let in_sector = |s: u64| s >> n_modes == 0 && s.count_ones() as usize == n_e;
    match spec {
        SectorSpec::LowestH0(energies) => {
            if energies.len() != n_modes {
                return Err(Error::Argument(format!(
                    "{} energies for {n_modes} modes",
                    energies.len()
                )));
            }
            let mut order: Vec<usize> = (0..n_modes).collect();
            order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));
            let det = order[..n_e].iter().fold(0u64, |m, &p| m | 1 << p);
            FockStateVector::basis(n_modes, det)
        }
        SectorSpec::Determinant(s) => {
            if !in_sector(*s) {
                return Err(Error::Argument(format!(
                    "determinant {s:#b} is not in sector {n_e}"
                )));
            }
            FockStateVector::basis(n_modes, *s)
        }
        SectorSpec::Superposition(terms) => {
            if terms.is_empty() {
                return Err(Error::Argument("empty sector spec".into()));
            }
            let mut amps = vec![Complex64::default(); 1 << n_modes];
            for (s, a) in terms {
                if !in_sector(*s) {
                    return Err(Error::Argument(format!(
                        "basis state {s:#b} is not in sector {n_e}"
                    )));
                }
                amps[*s as usize] += a;
            }
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::Argument("sector spec has zero norm".into()));
            }
            amps.iter_mut().for_each(|a| *a /= norm);
            Ok(FockStateVector {
                amps,
                n_modes,
                sector: Some(n_e),
            })
        }
    }
}
