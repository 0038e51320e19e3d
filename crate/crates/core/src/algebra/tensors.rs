use num_complex::Complex64;

use super::operator::FermionOperator;
use super::term::{TermKey, MAX_MODES};
use crate::error::{Error, Result};

/// Relative tolerance for tensor symmetry checks.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Antisymmetrized one-, two- and optional three-body coefficients over
/// `n_modes` spin-orbitals, plus a scalar shift (e.g. nuclear repulsion).
#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyTensors {
    n_modes: usize,
    pub constant: f64,
    /// `h[p][q]`, row-major `p * N + q`.
    h: Vec<Complex64>,
    /// `v[p][q][r][s]`, row-major.
    v: Vec<Complex64>,
    /// `w[p][q][r][s][t][u]`, row-major.
    w3: Option<Vec<Complex64>>,
}

impl ManyBodyTensors {
    pub fn zeros(n_modes: usize) -> Result<Self> {
        if n_modes == 0 || n_modes > MAX_MODES {
            return Err(Error::Validation(format!(
                "spin-orbital count must be in 1..={MAX_MODES}, got {n_modes}"
            )));
        }
        Ok(Self {
            n_modes,
            constant: 0.0,
            h: vec![Complex64::default(); n_modes.pow(2)],
            v: vec![Complex64::default(); n_modes.pow(4)],
            w3: None,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    fn check(&self, ix: &[usize]) -> Result<()> {
        match ix.iter().find(|&&p| p >= self.n_modes) {
            Some(&p) => Err(Error::Bounds {
                index: p,
                limit: self.n_modes,
            }),
            None => Ok(()),
        }
    }

    fn flat(&self, ix: &[usize]) -> usize {
        ix.iter().fold(0, |acc, &p| acc * self.n_modes + p)
    }

    pub fn h(&self, p: usize, q: usize) -> Complex64 {
        self.h[self.flat(&[p, q])]
    }

    pub fn v(&self, p: usize, q: usize, r: usize, s: usize) -> Complex64 {
        self.v[self.flat(&[p, q, r, s])]
    }

    pub fn w3(&self, ix: [usize; 6]) -> Complex64 {
        self.w3
            .as_ref()
            .map_or(Complex64::default(), |w| w[self.flat(&ix)])
    }

    pub fn has_three_body(&self) -> bool {
        self.w3.is_some()
    }

    pub fn set_h(&mut self, p: usize, q: usize, value: Complex64) -> Result<()> {
        self.check(&[p, q])?;
        let i = self.flat(&[p, q]);
        self.h[i] = value;
        Ok(())
    }

    pub fn set_v(&mut self, p: usize, q: usize, r: usize, s: usize, value: Complex64) -> Result<()> {
        self.check(&[p, q, r, s])?;
        let i = self.flat(&[p, q, r, s]);
        self.v[i] = value;
        Ok(())
    }

    /// Sets `v^{pq}_{rs}` together with its antisymmetric partners.
    pub fn set_v_antisymmetric(
        &mut self,
        p: usize,
        q: usize,
        r: usize,
        s: usize,
        value: Complex64,
    ) -> Result<()> {
        self.set_v(p, q, r, s, value)?;
        self.set_v(q, p, r, s, -value)?;
        self.set_v(p, q, s, r, -value)?;
        self.set_v(q, p, s, r, value)
    }

    pub fn set_w3(&mut self, ix: [usize; 6], value: Complex64) -> Result<()> {
        self.check(&ix)?;
        let i = self.flat(&ix);
        let n6 = self.n_modes.pow(6);
        self.w3.get_or_insert_with(|| vec![Complex64::default(); n6])[i] = value;
        Ok(())
    }

    fn scale_of(&self) -> f64 {
        let m = |v: &[Complex64]| v.iter().map(|c| c.norm()).fold(0.0, f64::max);
        m(&self.h)
            .max(m(&self.v))
            .max(self.w3.as_deref().map_or(0.0, m))
            .max(1.0)
    }

    /// Checks hermiticity and antisymmetry, naming the first violated relation.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_modes;
        let tol = SYMMETRY_TOL * self.scale_of();
        for p in 0..n {
            for q in 0..n {
                if (self.h(p, q) - self.h(q, p).conj()).norm() > tol {
                    return Err(Error::Validation(format!(
                        "hermiticity h^{p1}_{q1} = conj(h^{q1}_{p1}) violated",
                        p1 = p + 1,
                        q1 = q + 1
                    )));
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let x = self.v(p, q, r, s);
                        let (p1, q1, r1, s1) = (p + 1, q + 1, r + 1, s + 1);
                        if (x + self.v(q, p, r, s)).norm() > tol {
                            return Err(Error::Validation(format!(
                                "antisymmetry v^{{{p1}{q1}}}_{{{r1}{s1}}} = -v^{{{q1}{p1}}}_{{{r1}{s1}}} violated"
                            )));
                        }
                        if (x + self.v(p, q, s, r)).norm() > tol {
                            return Err(Error::Validation(format!(
                                "antisymmetry v^{{{p1}{q1}}}_{{{r1}{s1}}} = -v^{{{p1}{q1}}}_{{{s1}{r1}}} violated"
                            )));
                        }
                        if (x - self.v(r, s, p, q).conj()).norm() > tol {
                            return Err(Error::Validation(format!(
                                "hermiticity v^{{{p1}{q1}}}_{{{r1}{s1}}} = conj(v^{{{r1}{s1}}}_{{{p1}{q1}}}) violated"
                            )));
                        }
                    }
                }
            }
        }
        if self.w3.is_some() {
            let mut ix = [0usize; 6];
            for flat in 0..n.pow(6) {
                let mut rest = flat;
                for slot in ix.iter_mut().rev() {
                    *slot = rest % n;
                    rest /= n;
                }
                let x = self.w3(ix);
                let adj = self.w3([ix[3], ix[4], ix[5], ix[0], ix[1], ix[2]]);
                if (x - adj.conj()).norm() > tol {
                    return Err(Error::Validation(
                        "hermiticity of three-body tensor violated".into(),
                    ));
                }
                let swapped = self.w3([ix[1], ix[0], ix[2], ix[3], ix[4], ix[5]]);
                if (x + swapped).norm() > tol {
                    return Err(Error::Validation(
                        "antisymmetry of three-body tensor violated".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Builds `H = c + Σ h^p_q a†_p a_q + ¼ Σ v^{pq}_{rs} a†_p a†_q a_s a_r
/// (+ 1/36 Σ w^{pqr}_{stu} a†_p a†_q a†_r a_u a_t a_s)` in canonical form.
pub fn hamiltonian_from_tensors(t: &ManyBodyTensors) -> Result<FermionOperator> {
    t.validate()?;
    let n = t.n_modes();
    let mut op = FermionOperator::zero();
    if t.constant != 0.0 {
        op.add_term(TermKey::IDENTITY, Complex64::new(t.constant, 0.0));
    }
    for p in 0..n {
        for q in 0..n {
            let h = t.h(p, q);
            if h != Complex64::default() {
                op.add_term(TermKey::new(1 << p, 1 << q), h);
            }
        }
    }
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let v = t.v(p, q, r, s);
                    if v == Complex64::default() {
                        continue;
                    }
                    if let Some((key, sign)) = TermKey::from_indices(&[p, q], &[r, s]) {
                        op.add_term(key, v * (0.25 * sign));
                    }
                }
            }
        }
    }
    if t.has_three_body() {
        let mut ix = [0usize; 6];
        for flat in 0..n.pow(6) {
            let mut rest = flat;
            for slot in ix.iter_mut().rev() {
                *slot = rest % n;
                rest /= n;
            }
            let w = t.w3(ix);
            if w == Complex64::default() {
                continue;
            }
            if let Some((key, sign)) = TermKey::from_indices(&ix[..3], &ix[3..]) {
                op.add_term(key, w * (sign / 36.0));
            }
        }
    }
    op.prune(super::operator::DEFAULT_PRUNE);
    Ok(op)
}
