use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{mask_indices, FermionOperator, TermKey};
use crate::error::{Error, Result};
use crate::partition::OrbitalPartition;

/// How the diagonal zeroth-order energies `ε_p` are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum H0Choice {
    /// `ε_p = Re h^p_p`, the diagonal one-body coefficients of `H`.
    #[default]
    Diagonal,
    /// Explicit per-position energies, e.g. to lift degeneracies.
    Energies(Vec<f64>),
}

/// `H = H0 + W` with `H0 = Σ ε_p n_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct H0Split {
    pub energies: Vec<f64>,
    pub h0: FermionOperator,
    pub w: FermionOperator,
}

impl H0Split {
    /// Møller-Plesset style denominator `Σ ε(upper) - Σ ε(lower)`, which is
    /// the eigenvalue of `[H0, ·]` on the string.
    pub fn denominator(&self, key: &TermKey) -> f64 {
        let sum = |m: u64| -> f64 { mask_indices(m).map(|p| self.energies[p]).sum() };
        sum(key.creators) - sum(key.annihilators)
    }
}

pub fn split_h0_w(h: &FermionOperator, part: &OrbitalPartition, choice: &H0Choice) -> Result<H0Split> {
    let n = part.n_modes();
    let energies = match choice {
        H0Choice::Diagonal => (0..n)
            .map(|p| h.coefficient(&TermKey::new(1 << p, 1 << p)).re)
            .collect(),
        H0Choice::Energies(e) => {
            if e.len() != n {
                return Err(Error::Validation(format!(
                    "H0 needs {n} spin-orbital energies, got {}",
                    e.len()
                )));
            }
            e.clone()
        }
    };
    let h0 = FermionOperator::from_terms(
        energies
            .iter()
            .enumerate()
            .map(|(p, &e)| (TermKey::new(1 << p, 1 << p), Complex64::new(e, 0.0))),
    );
    let w = h - &h0;
    Ok(H0Split { energies, h0, w })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part() -> OrbitalPartition {
        OrbitalPartition::new(2, 1, vec![-1.0, -1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn default_choice_clears_diagonal_one_body() {
        let h = FermionOperator::number(0).scale_real(-1.0)
            + FermionOperator::number(2).scale_real(1.0)
            + FermionOperator::excitation(&[0], &[2], Complex64::new(0.1, 0.0))
            + FermionOperator::excitation(&[2], &[0], Complex64::new(0.1, 0.0))
            + FermionOperator::excitation(&[0, 2], &[0, 2], Complex64::new(0.3, 0.0));
        let s = split_h0_w(&h, &part(), &H0Choice::Diagonal).unwrap();
        assert_eq!(&s.h0 + &s.w, h);
        assert!((0..4).all(|p| s.w.coefficient(&TermKey::new(1 << p, 1 << p)).norm() == 0.0));
        assert_eq!(s.w.len(), 3);
        assert_eq!(s.denominator(&TermKey::new(0b0100, 0b0001)), 2.0);
    }

    #[test]
    fn custom_energies_lift_degeneracy() {
        let h = FermionOperator::number(2) + FermionOperator::number(3);
        let s = split_h0_w(&h, &part(), &H0Choice::Energies(vec![-1.1, -0.9, 1.2, 0.8])).unwrap();
        assert_eq!(&s.h0 + &s.w, h);
        assert!((s.denominator(&TermKey::new(0b0100, 0b1000)) - 0.4).abs() < 1e-15);
        assert!(split_h0_w(&h, &part(), &H0Choice::Energies(vec![0.0])).is_err());
    }
}
