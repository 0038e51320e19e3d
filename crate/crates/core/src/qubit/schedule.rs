use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{mask_from_indices, mask_indices};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::partition::NumberPolynomial;

/// Angles smaller than this are left out of a schedule.
pub const ANGLE_PRUNE: f64 = 1e-15;

/// `exp(-i angle/2 Z_S)`; for empty `S` the global phase `exp(-i angle/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationEntry {
    pub qubits: Vec<usize>,
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RotationSchedule {
    pub entries: Vec<RotationEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    /// Multiplies the state by `exp(-i θ/2)`.
    GlobalPhase(f64),
    /// `diag(exp(-iθ/2), exp(iθ/2))`.
    Rz { qubit: usize, theta: f64 },
    Cx { control: usize, target: usize },
}

/// Schedule for `exp(-i t f)` where `f` is a polynomial in number operators.
///
/// Each monomial `c Π_{p∈S} n_p` expands as `c/2^|S| Σ_{T⊆S} (-1)^|T| Z_T`;
/// the collected coefficient `κ_T` of `Z_T` becomes the entry `(T, 2tκ_T)`.
/// All entries commute, so the product is exact in any order.
pub fn schedule_number_exponential(f: &NumberPolynomial, t: f64) -> RotationSchedule {
    let mut kappa: BTreeMap<(u32, u64), f64> = BTreeMap::new();
    for (&s, &c) in &f.monomials {
        let scale = c / f64::powi(2.0, s.count_ones() as i32);
        // enumerate subsets of s
        let mut sub = s;
        loop {
            let sign = if sub.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            *kappa.entry((sub.count_ones(), sub)).or_default() += sign * scale;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & s;
        }
    }
    let entries = kappa
        .into_iter()
        .map(|((_, mask), k)| RotationEntry {
            qubits: mask_indices(mask).collect(),
            angle: 2.0 * t * k,
        })
        .filter(|e| e.angle.abs() > ANGLE_PRUNE)
        .collect();
    RotationSchedule { entries }
}

impl RotationSchedule {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Highest qubit index used, plus one.
    pub fn min_qubits(&self) -> usize {
        self.entries
            .iter()
            .flat_map(|e| e.qubits.iter())
            .map(|q| q + 1)
            .max()
            .unwrap_or(0)
    }

    /// Gate list: one `Rz` per single-qubit entry; a CX ladder onto the last
    /// qubit around one `Rz` for larger sets.
    pub fn gates(&self) -> Vec<Gate> {
        let mut g = Vec::new();
        for e in &self.entries {
            match e.qubits.as_slice() {
                [] => g.push(Gate::GlobalPhase(e.angle)),
                [q] => g.push(Gate::Rz {
                    qubit: *q,
                    theta: e.angle,
                }),
                qs => {
                    let ladder: Vec<Gate> = qs
                        .windows(2)
                        .map(|w| Gate::Cx {
                            control: w[0],
                            target: w[1],
                        })
                        .collect();
                    g.extend(ladder.iter().copied());
                    g.push(Gate::Rz {
                        qubit: *qs.last().unwrap(),
                        theta: e.angle,
                    });
                    g.extend(ladder.iter().rev().copied());
                }
            }
        }
        g
    }

    /// Runs the gate list on a state vector (little-endian qubits).
    pub fn apply(&self, amps: &mut [Complex64]) -> Result<()> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n || self.min_qubits() > n {
            return Err(Error::Argument(format!(
                "schedule needs {} qubits, state has length {}",
                self.min_qubits(),
                amps.len()
            )));
        }
        apply_gates(&self.gates(), amps);
        Ok(())
    }

    pub fn unitary(&self, n_qubits: usize) -> Result<CMatrix> {
        let dim = 1usize << n_qubits;
        let mut u = CMatrix::zeros(dim, dim);
        let mut col = vec![Complex64::default(); dim];
        for j in 0..dim {
            col.iter_mut().for_each(|a| *a = Complex64::default());
            col[j] = Complex64::new(1.0, 0.0);
            self.apply(&mut col)?;
            for (i, a) in col.iter().enumerate() {
                u[(i, j)] = *a;
            }
        }
        Ok(u)
    }

    /// Same rotations with every angle multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> RotationSchedule {
        RotationSchedule {
            entries: self
                .entries
                .iter()
                .map(|e| RotationEntry {
                    qubits: e.qubits.clone(),
                    angle: e.angle * factor,
                })
                .collect(),
        }
    }

    /// One record per line: `phase θ`, `rz θ q`, `zz θ q1 q2` or
    /// `zn θ q1 .. qk`, qubits one-based.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            let tag = match e.qubits.len() {
                0 => "phase",
                1 => "rz",
                2 => "zz",
                _ => "zn",
            };
            s.push_str(&format!("{tag} {:.16e}", e.angle));
            for q in &e.qubits {
                s.push_str(&format!(" {}", q + 1));
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 2 {
                return Err(err("expected 'tag angle qubits..'".into()));
            }
            let angle: f64 = fields[1]
                .parse()
                .map_err(|_| err(format!("bad angle '{}'", fields[1])))?;
            let qubits = fields[2..]
                .iter()
                .map(|q| match q.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(err(format!("bad qubit '{q}'"))),
                })
                .collect::<Result<Vec<usize>>>()?;
            let expected = match fields[0] {
                "phase" => qubits.is_empty(),
                "rz" => qubits.len() == 1,
                "zz" => qubits.len() == 2,
                "zn" => qubits.len() > 2,
                other => return Err(err(format!("unknown record '{other}'"))),
            };
            if !expected {
                return Err(err(format!("wrong qubit count for '{}'", fields[0])));
            }
            if mask_from_indices(&qubits).count_ones() as usize != qubits.len() {
                return Err(err("repeated qubit".into()));
            }
            entries.push(RotationEntry { qubits, angle });
        }
        Ok(RotationSchedule { entries })
    }
}

impl fmt::Display for RotationSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

pub fn apply_gates(gates: &[Gate], amps: &mut [Complex64]) {
    for g in gates {
        match *g {
            Gate::GlobalPhase(theta) => {
                let ph = Complex64::from_polar(1.0, -theta / 2.0);
                amps.iter_mut().for_each(|a| *a *= ph);
            }
            Gate::Rz { qubit, theta } => {
                let lo = Complex64::from_polar(1.0, -theta / 2.0);
                let hi = lo.conj();
                for (i, a) in amps.iter_mut().enumerate() {
                    *a *= if i >> qubit & 1 == 0 { lo } else { hi };
                }
            }
            Gate::Cx { control, target } => {
                for i in 0..amps.len() {
                    if i >> control & 1 == 1 && i >> target & 1 == 0 {
                        amps.swap(i, i | 1 << target);
                    }
                }
            }
        }
    }
}
