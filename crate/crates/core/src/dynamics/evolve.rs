use num_complex::Complex64;

use super::state::FockStateVector;
use crate::algebra::{to_dense, FermionOperator};
use crate::error::{Error, Result};
use crate::linalg::{expm_anti_hermitian, expm_hermitian, CMatrix};
use crate::partition::{to_number_polynomial, NumberPolynomial, OrbitalPartition, SectorLabel};
use crate::qubit::{jw_map, schedule_number_exponential, PauliOperator, PauliString};

/// `exp(-i t A) psi` through the dense matrix of `A`.
pub fn exact_evolve(a: &FermionOperator, t: f64, psi: &FockStateVector) -> Result<FockStateVector> {
    let m = to_dense(a, psi.n_modes())?.matrix;
    Ok(psi.apply_matrix(&expm_hermitian(&m, t)))
}

pub fn exact_evolve_pauli(p: &PauliOperator, t: f64, psi: &FockStateVector) -> Result<FockStateVector> {
    if p.n_qubits() != psi.n_modes() {
        return Err(Error::Argument(format!(
            "operator on {} qubits, state on {}",
            p.n_qubits(),
            psi.n_modes()
        )));
    }
    Ok(psi.apply_matrix(&expm_hermitian(&p.to_dense()?, t)))
}

/// `G = P̌(G) + P̂_M(G) + P̂_E(G)`: internal part, diagonal terms mixing
/// active and external modes, and diagonal terms on external modes only.
#[derive(Debug, Clone, PartialEq)]
pub struct GParts {
    pub internal: FermionOperator,
    pub mixed: FermionOperator,
    pub external: FermionOperator,
}

pub fn split_g(g: &FermionOperator, part: &OrbitalPartition) -> Result<GParts> {
    let d = part.decompose(g)?;
    for s in [
        SectorLabel::ExternalIsoenergetic,
        SectorLabel::ExternalEnergeticallyDistinct,
    ] {
        if !d.part(s).is_empty() {
            return Err(Error::Structure(format!(
                "G has {} {s} terms; external part must be diagonal",
                d.part(s).len()
            )));
        }
    }
    let ext = part.external_mask();
    let diag = d.part(SectorLabel::ExternalDiagonal);
    let external = diag.filter(|k| k.support() & !ext == 0);
    let mixed = diag.filter(|k| k.support() & !ext != 0);
    let parts = GParts {
        internal: d.part(SectorLabel::Internal).clone(),
        mixed,
        external,
    };
    let tol = 1e-12 * g.max_abs().max(1.0);
    for (name, other) in [("internal", &parts.internal), ("mixed", &parts.mixed)] {
        let c = other.commutator(&parts.external)?;
        if c.max_abs() > tol {
            return Err(Error::Structure(format!(
                "{name} part does not commute with the external part"
            )));
        }
    }
    Ok(parts)
}

impl GParts {
    pub fn sum(&self) -> FermionOperator {
        &(&self.internal + &self.mixed) + &self.external
    }
}

/// Pauli-level data for the product formula.
#[derive(Debug, Clone, PartialEq)]
pub struct TrotterPlan {
    pub n_qubits: usize,
    /// Strings of `P̌(G)`, descending `|weight|`, ties by letters.
    pub x_strings: Vec<(PauliString, f64)>,
    pub mixed: NumberPolynomial,
    pub external: NumberPolynomial,
}

impl TrotterPlan {
    pub fn new(parts: &GParts, part: &OrbitalPartition) -> Result<Self> {
        let n = part.n_modes();
        let p = jw_map(&parts.internal, n)?;
        let scale = p.terms().map(|(_, w)| w.norm()).fold(1.0, f64::max);
        if !p.has_real_weights(1e-10 * scale) {
            return Err(Error::Structure("internal part of G is not Hermitian".into()));
        }
        let x_strings = p.ordered_terms().into_iter().map(|(s, w)| (s, w.re)).collect();
        Ok(Self {
            n_qubits: n,
            x_strings,
            mixed: to_number_polynomial(&parts.mixed, part)?,
            external: to_number_polynomial(&parts.external, part)?,
        })
    }

    fn check(&self, psi: &FockStateVector) -> Result<()> {
        if psi.n_modes() != self.n_qubits {
            return Err(Error::Argument(format!(
                "plan on {} qubits, state on {}",
                self.n_qubits,
                psi.n_modes()
            )));
        }
        Ok(())
    }

    /// `X(r)`: per-string exponentials `exp(-i (t/r) ǧ_i P_i)`, the first
    /// listed string acting first.
    fn apply_x(&self, dt: f64, amps: &mut Vec<Complex64>) {
        for (s, w) in &self.x_strings {
            apply_string_exponential(s, dt * w, amps);
        }
    }

    /// `exp(-i τ f)` for a diagonal polynomial, via its rotation schedule.
    fn apply_poly(f: &NumberPolynomial, tau: f64, amps: &mut [Complex64]) {
        schedule_number_exponential(f, tau)
            .apply(amps)
            .expect("schedule fits the register");
    }

    /// `(X(r) Y(r)² X(r))^{r/2}` followed by the exact external factor.
    pub fn evolve(&self, t: f64, r: usize, psi: &FockStateVector) -> Result<FockStateVector> {
        self.check(psi)?;
        check_even(r)?;
        let dt = t / r as f64;
        let mut amps = psi.amps.clone();
        for _ in 0..r / 2 {
            self.apply_x(dt, &mut amps);
            Self::apply_poly(&self.mixed, 2.0 * dt, &mut amps);
            self.apply_x(dt, &mut amps);
        }
        Self::apply_poly(&self.external, t, &mut amps);
        Ok(with_amps(psi, amps))
    }

    /// Unsymmetrized `(X(r) Y(r))^r` followed by the exact external factor.
    pub fn evolve_plain(&self, t: f64, r: usize, psi: &FockStateVector) -> Result<FockStateVector> {
        self.check(psi)?;
        if r == 0 {
            return Err(Error::Argument("Trotter steps must be positive".into()));
        }
        let dt = t / r as f64;
        let mut amps = psi.amps.clone();
        for _ in 0..r {
            self.apply_x(dt, &mut amps);
            Self::apply_poly(&self.mixed, dt, &mut amps);
        }
        Self::apply_poly(&self.external, t, &mut amps);
        Ok(with_amps(psi, amps))
    }

    /// Trotterized `(e^{-itG})^{2^j}`: `2^j` repetitions of the internal and
    /// mixed product, the external factor applied once at time `2^j t`.
    pub fn evolve_power(&self, t: f64, r: usize, j: u32, psi: &FockStateVector) -> Result<FockStateVector> {
        self.check(psi)?;
        check_even(r)?;
        let reps = 1usize << j;
        let dt = t / r as f64;
        let mut amps = psi.amps.clone();
        Self::apply_poly(&self.external, t * reps as f64, &mut amps);
        for _ in 0..reps {
            for _ in 0..r / 2 {
                self.apply_x(dt, &mut amps);
                Self::apply_poly(&self.mixed, 2.0 * dt, &mut amps);
                self.apply_x(dt, &mut amps);
            }
        }
        Ok(with_amps(psi, amps))
    }
}

fn check_even(r: usize) -> Result<()> {
    if r == 0 || r % 2 == 1 {
        return Err(Error::Argument(format!(
            "Trotter steps must be even and positive, got {r}"
        )));
    }
    Ok(())
}

fn with_amps(psi: &FockStateVector, amps: Vec<Complex64>) -> FockStateVector {
    FockStateVector::from_amplitudes(psi.n_modes(), amps)
        .expect("same register")
        .with_sector(psi.sector())
}

/// `exp(-iθP) = cos θ - i sin θ P` for a Hermitian string `P`.
fn apply_string_exponential(s: &PauliString, theta: f64, amps: &mut Vec<Complex64>) {
    let (c, sn) = (theta.cos(), theta.sin());
    if s.is_identity() {
        let ph = Complex64::new(c, -sn);
        amps.iter_mut().for_each(|a| *a *= ph);
        return;
    }
    let mut out = vec![Complex64::default(); amps.len()];
    let mi_sin = Complex64::new(0.0, -sn);
    for (col, a) in amps.iter().enumerate() {
        if *a == Complex64::default() {
            continue;
        }
        out[col] += a * c;
        let (row, phase) = s.apply_to_basis(col as u64);
        out[row as usize] += a * phase * mi_sin;
    }
    *amps = out;
}

/// Symmetrized product formula for `exp(-itG)` applied to `psi`.
pub fn trotter_evolve(
    parts: &GParts,
    part: &OrbitalPartition,
    t: f64,
    r: usize,
    psi: &FockStateVector,
) -> Result<FockStateVector> {
    TrotterPlan::new(parts, part)?.evolve(t, r, psi)
}

/// `Ω(t)^{2^j} psi = e^{-B} (e^{-itG})^{2^j} e^{B} psi` with the middle
/// factor Trotterized in `r` steps per unit of `t`.
pub fn power_evolution(
    b: &FermionOperator,
    plan: &TrotterPlan,
    t: f64,
    j: u32,
    r: usize,
    psi: &FockStateVector,
) -> Result<FockStateVector> {
    let (eb, emb) = similarity_pair(b, psi.n_modes())?;
    let rotated = psi.apply_matrix(&eb);
    let evolved = plan.evolve_power(t, r, j, &rotated)?;
    Ok(evolved.apply_matrix(&emb))
}

/// Dense `(e^{B}, e^{-B})`.
pub fn similarity_pair(b: &FermionOperator, n_modes: usize) -> Result<(CMatrix, CMatrix)> {
    let bm = to_dense(b, n_modes)?.matrix;
    let eb = expm_anti_hermitian(&bm);
    let emb = eb.adjoint();
    Ok((eb, emb))
}

/// Matrix of a state map, built column by column from basis states.
pub fn unitary_of<F>(n_modes: usize, mut f: F) -> Result<CMatrix>
where
    F: FnMut(&FockStateVector) -> Result<FockStateVector>,
{
    let dim = 1usize << n_modes;
    let mut u = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let out = f(&FockStateVector::basis(n_modes, col as u64)?.with_sector(None))?;
        for (row, a) in out.amps.iter().enumerate() {
            u[(row, col)] = *a;
        }
    }
    Ok(u)
}
