use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::integrals::IntegralFormat;
use crate::error::{Error, Result};
use crate::solver::{H0Choice, SolverOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub input: InputConfig,
    pub partition: PartitionConfig,
    #[serde(default)]
    pub h0: H0Choice,
    #[serde(default)]
    pub solver: SolverOptions,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auxiliary: Option<AuxiliaryConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolution: Option<EvolutionConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    /// Relative paths resolve against the config file's directory.
    pub path: PathBuf,
    pub format: IntegralFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    /// Spatial orbitals.
    pub n: usize,
    /// External orbitals, the last `k` in `ordering`.
    pub k: usize,
    /// Energy per spatial orbital, by original label. Defaults to the
    /// spin-averaged diagonal of `h`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<f64>>,
    /// One-based original orbital labels in partition order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordering: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuxiliaryConfig {
    /// Terms of the anti-Hermitian `C` in operator text form, position labels.
    pub terms: Vec<String>,
    /// Commutator rank for `e^C H e^{-C}`; summed to convergence when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

fn default_r() -> usize {
    64
}
fn default_m() -> usize {
    6
}
fn default_scan() -> Vec<usize> {
    vec![8, 16, 32]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    /// Evolution time; chosen from spectral bounds when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Trotter steps per unit `t`, even.
    #[serde(default = "default_r")]
    pub r: usize,
    /// Ancilla qubits.
    #[serde(default = "default_m")]
    pub m: usize,
    /// Particle numbers to prepare; defaults to the file's electron count.
    #[serde(default)]
    pub sectors: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_scan")]
    pub trotter_scan: Vec<usize>,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            t: None,
            r: default_r(),
            m: default_m(),
            sectors: Vec::new(),
            shots: None,
            seed: 0,
            trotter_scan: default_scan(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical TOML: fixed key order, defaults spelled out.
    pub fn to_canonical(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    /// SHA-256 of the canonical form, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.partition;
        if p.n == 0 || p.k > p.n {
            return Err(Error::Config(format!(
                "partition needs n >= 1 and k <= n, got n = {}, k = {}",
                p.n, p.k
            )));
        }
        if let Some(e) = &p.energies {
            if e.len() != p.n {
                return Err(Error::Config(format!(
                    "partition.energies has {} entries for n = {}",
                    e.len(),
                    p.n
                )));
            }
        }
        if let Some(o) = &p.ordering {
            let mut sorted = o.clone();
            sorted.sort_unstable();
            if sorted != (1..=p.n).collect::<Vec<_>>() {
                return Err(Error::Config(format!(
                    "partition.ordering must be a permutation of 1..={}",
                    p.n
                )));
            }
        }
        if let H0Choice::Energies(e) = &self.h0 {
            if e.len() != 2 * p.n {
                return Err(Error::Config(format!(
                    "h0 energies need {} spin-orbital entries, got {}",
                    2 * p.n,
                    e.len()
                )));
            }
        }
        self.solver.validate()?;
        if let Some(ev) = &self.evolution {
            let even = |r: usize| r >= 2 && r.is_multiple_of(2);
            if !even(ev.r) || !ev.trotter_scan.iter().all(|&r| even(r)) {
                return Err(Error::Config("Trotter step counts must be even and >= 2".into()));
            }
            if ev.m == 0 {
                return Err(Error::Config("evolution.m must be at least 1".into()));
            }
            if let Some(t) = ev.t {
                if !(t.is_finite() && t > 0.0) {
                    return Err(Error::Config("evolution.t must be positive".into()));
                }
            }
            if let Some(&s) = ev.sectors.iter().find(|&&s| s > 2 * p.n) {
                return Err(Error::Config(format!(
                    "sector {s} exceeds {} spin-orbitals",
                    2 * p.n
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[input]
path = "h2.fcidump"
format = "fcidump"

[partition]
n = 2
k = 1

[solver]
rank = 3
domain = "od"

[evolution]
m = 4
sectors = [1, 2]
"#;

    #[test]
    fn round_trip_is_canonical() {
        let cfg = RunConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.solver.rank, 3);
        assert_eq!(cfg.evolution.as_ref().unwrap().r, 64);
        let canon = cfg.to_canonical();
        let again = RunConfig::parse(&canon).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_canonical(), canon);
        assert_eq!(again.hash(), cfg.hash());
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        let bad = SAMPLE.replace("k = 1", "k = 1\nflavour = 3");
        assert!(matches!(RunConfig::parse(&bad), Err(Error::Config(_))));
        let bad = SAMPLE.replace("m = 4", "m = 4\nr = 7");
        assert!(matches!(RunConfig::parse(&bad), Err(Error::Config(_))));
        let bad = SAMPLE.replace("k = 1", "k = 3");
        assert!(RunConfig::parse(&bad).is_err());
    }

    #[test]
    fn h0_energies_table() {
        let text = SAMPLE.replace(
            "[solver]",
            "[h0]\nenergies = [-1.0, -1.0, 1.0, 1.0]\n\n[solver]",
        );
        let cfg = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg.h0, H0Choice::Energies(vec![-1.0, -1.0, 1.0, 1.0]));
        assert_eq!(RunConfig::parse(&cfg.to_canonical()).unwrap(), cfg);
    }
}
