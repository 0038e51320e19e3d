use num_complex::Complex64;

use super::pauli::{PauliOperator, PauliString, PAULI_PRUNE};
use crate::algebra::{FermionOperator, Ladder, MAX_MODES};
use crate::error::{Error, Result};

/// Two-string expansion of one ladder operator:
/// `a†_p = ½(X_p - iY_p) Z_{<p}`, `a_p = ½(X_p + iY_p) Z_{<p}`.
fn ladder_strings(l: Ladder) -> [(PauliString, Complex64); 2] {
    let p = l.index();
    let below = (1u64 << p) - 1;
    let bit = 1u64 << p;
    let y = match l {
        Ladder::Create(_) => Complex64::new(0.0, -0.5),
        Ladder::Annihilate(_) => Complex64::new(0.0, 0.5),
    };
    [
        (PauliString::new(bit, below), Complex64::new(0.5, 0.0)),
        (PauliString::new(bit, below | bit), y),
    ]
}

/// Jordan-Wigner image of `a` on `n_qubits` qubits, qubit `p` = mode `p`.
pub fn jw_map(a: &FermionOperator, n_qubits: usize) -> Result<PauliOperator> {
    if n_qubits > MAX_MODES {
        return Err(Error::Bounds {
            index: n_qubits,
            limit: MAX_MODES,
        });
    }
    let mut out = PauliOperator::zero(n_qubits);
    for (key, coeff) in a.terms() {
        if let Some(m) = key.max_index() {
            if m >= n_qubits {
                return Err(Error::Bounds {
                    index: m,
                    limit: n_qubits,
                });
            }
        }
        let mut acc = vec![(PauliString::IDENTITY, *coeff)];
        for l in key.ladder_sequence() {
            let factors = ladder_strings(l);
            let mut next = Vec::with_capacity(acc.len() * 2);
            for (s, w) in &acc {
                for (f, fw) in &factors {
                    let (phase, p) = s.multiply(f);
                    next.push((p, w * fw * phase));
                }
            }
            acc = next;
        }
        for (s, w) in acc {
            out.add_term(s, w);
        }
    }
    out.prune(PAULI_PRUNE);
    Ok(out)
}
