use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::algebra::{format_complex, parse_complex, MAX_MODES};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Weights below this magnitude are dropped after merging.
pub const PAULI_PRUNE: f64 = 1e-12;

/// A tensor product of single-qubit Paulis stored as X and Z bit masks.
///
/// Qubit `q` carries `I` (x=0,z=0), `X` (1,0), `Z` (0,1) or `Y` (1,1); the
/// string denotes `Π_q i^{x_q z_q} X_q^{x_q} Z_q^{z_q}`, so a set `(1,1)` pair
/// is exactly `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub fn symbol(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

/// `i^k` for `k mod 4`.
fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    pub fn new(x: u64, z: u64) -> Self {
        Self { x, z }
    }

    pub fn single(q: usize, letter: PauliLetter) -> Self {
        let bit = 1u64 << q;
        match letter {
            PauliLetter::I => Self::IDENTITY,
            PauliLetter::X => Self::new(bit, 0),
            PauliLetter::Y => Self::new(bit, bit),
            PauliLetter::Z => Self::new(0, bit),
        }
    }

    pub fn letter(&self, q: usize) -> PauliLetter {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => PauliLetter::I,
            (1, 0) => PauliLetter::X,
            (1, 1) => PauliLetter::Y,
            _ => PauliLetter::Z,
        }
    }

    /// Non-identity qubits.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn is_identity(&self) -> bool {
        self.support() == 0
    }

    /// Only `I` and `Z` letters.
    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    /// `self * other = phase * result`.
    pub fn multiply(&self, other: &PauliString) -> (Complex64, PauliString) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = (self.x & self.z).count_ones() + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones()
            + 4 * 64
            - (x & z).count_ones();
        (i_pow(k), PauliString { x, z })
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Action on a computational basis state: `P|s> = phase |s ^ x>`.
    pub fn apply_to_basis(&self, state: u64) -> (u64, Complex64) {
        let mut phase = i_pow((self.x & self.z).count_ones());
        if (self.z & state).count_ones() % 2 == 1 {
            phase = -phase;
        }
        (state ^ self.x, phase)
    }

    /// Letters for qubits `1..=n`, qubit 1 leftmost.
    pub fn letters(&self, n: usize) -> String {
        (0..n).map(|q| self.letter(q).symbol()).collect()
    }

    pub fn parse_letters(s: &str) -> std::result::Result<(PauliString, usize), String> {
        let mut out = PauliString::IDENTITY;
        for (q, ch) in s.chars().enumerate() {
            if q >= MAX_MODES {
                return Err(format!("too many qubits in '{s}'"));
            }
            let letter = match ch {
                'I' => PauliLetter::I,
                'X' => PauliLetter::X,
                'Y' => PauliLetter::Y,
                'Z' => PauliLetter::Z,
                _ => return Err(format!("bad Pauli letter '{ch}'")),
            };
            let single = PauliString::single(q, letter);
            out.x |= single.x;
            out.z |= single.z;
        }
        Ok((out, s.chars().count()))
    }
}

/// Weighted sum of Pauli strings over `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliOperator {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl PauliOperator {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn add_term(&mut self, s: PauliString, w: Complex64) {
        *self.terms.entry(s).or_default() += w;
    }

    pub fn prune(&mut self, threshold: f64) {
        self.terms.retain(|_, w| w.norm() >= threshold);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &Complex64)> {
        self.terms.iter()
    }

    pub fn weight_of(&self, s: &PauliString) -> Complex64 {
        self.terms.get(s).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// All weights real to `tol`, as for any Hermitian operator.
    pub fn has_real_weights(&self, tol: f64) -> bool {
        self.terms.values().all(|w| w.im.abs() <= tol)
    }

    pub fn multiply(&self, other: &PauliOperator) -> PauliOperator {
        let mut out = PauliOperator::zero(self.n_qubits.max(other.n_qubits));
        for (a, wa) in &self.terms {
            for (b, wb) in &other.terms {
                let (phase, s) = a.multiply(b);
                out.add_term(s, wa * wb * phase);
            }
        }
        out.prune(PAULI_PRUNE);
        out
    }

    pub fn add(&self, other: &PauliOperator) -> PauliOperator {
        let mut out = self.clone();
        out.n_qubits = out.n_qubits.max(other.n_qubits);
        for (s, w) in &other.terms {
            out.add_term(*s, *w);
        }
        out.prune(PAULI_PRUNE);
        out
    }

    pub fn to_dense(&self) -> Result<CMatrix> {
        if self.n_qubits > crate::algebra::DEFAULT_ORACLE_CAP {
            return Err(Error::Capacity {
                what: "qubits for dense oracle",
                size: self.n_qubits,
                limit: crate::algebra::DEFAULT_ORACLE_CAP,
            });
        }
        let dim = 1usize << self.n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        for (s, w) in &self.terms {
            for col in 0..dim as u64 {
                let (row, phase) = s.apply_to_basis(col);
                m[(row as usize, col as usize)] += w * phase;
            }
        }
        Ok(m)
    }

    /// Strings ordered by descending `|weight|`, ties broken by letters.
    pub fn ordered_terms(&self) -> Vec<(PauliString, Complex64)> {
        let mut v: Vec<(PauliString, Complex64)> = self.terms.iter().map(|(s, w)| (*s, *w)).collect();
        let n = self.n_qubits;
        v.sort_by(|a, b| {
            b.1.norm()
                .total_cmp(&a.1.norm())
                .then_with(|| a.0.letters(n).cmp(&b.0.letters(n)))
        });
        v
    }

    /// One line per string: `weight  letters`, qubit 1 leftmost.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (p, w) in &self.terms {
            let w = if w.im.abs() <= PAULI_PRUNE {
                Complex64::new(w.re, 0.0)
            } else {
                *w
            };
            s.push_str(&format!("{}  {}\n", format_complex(w), p.letters(self.n_qubits)));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut out: Option<PauliOperator> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: lineno + 1,
                message,
            };
            let mut fields = line.split_whitespace();
            let (Some(w), Some(letters), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(err("expected 'weight letters'".into()));
            };
            let w = parse_complex(w).map_err(err)?;
            let (s, n) = PauliString::parse_letters(letters).map_err(err)?;
            let op = out.get_or_insert_with(|| PauliOperator::zero(n));
            if op.n_qubits != n {
                return Err(err(format!("expected {} letters, got {n}", op.n_qubits)));
            }
            op.add_term(s, w);
        }
        let mut op = out.unwrap_or_default();
        op.prune(PAULI_PRUNE);
        Ok(op)
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_qubit_products() {
        let x = PauliString::single(0, PauliLetter::X);
        let y = PauliString::single(0, PauliLetter::Y);
        let z = PauliString::single(0, PauliLetter::Z);
        // XY = iZ, YX = -iZ, ZX = iY
        assert_eq!(x.multiply(&y), (Complex64::new(0.0, 1.0), z));
        assert_eq!(y.multiply(&x), (Complex64::new(0.0, -1.0), z));
        assert_eq!(z.multiply(&x), (Complex64::new(0.0, 1.0), y));
        assert_eq!(y.multiply(&y), (Complex64::new(1.0, 0.0), PauliString::IDENTITY));
        assert!(!x.commutes_with(&z));
    }

    #[test]
    fn basis_action_of_y() {
        let y = PauliString::single(0, PauliLetter::Y);
        assert_eq!(y.apply_to_basis(0), (1, Complex64::new(0.0, 1.0)));
        assert_eq!(y.apply_to_basis(1), (0, Complex64::new(0.0, -1.0)));
    }

    #[test]
    fn text_round_trip_and_letter_order() {
        let mut op = PauliOperator::zero(4);
        op.add_term(PauliString::new(0, 0b1100), Complex64::new(0.25, 0.0));
        op.add_term(PauliString::new(0b0011, 0b0001), Complex64::new(-0.5, 0.0));
        let text = op.to_text();
        assert!(text.contains("2.5000000000000000e-1  IIZZ"));
        assert!(text.contains("YXII"));
        assert_eq!(PauliOperator::from_text(&text).unwrap(), op);
        assert!(PauliOperator::from_text("0.5 XQ\n").is_err());
    }
}
