use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::state::FockStateVector;
use crate::error::{Error, Result};
use crate::linalg::{eigh, gershgorin_bounds, CMatrix};

/// Largest ancilla + system register the simulator accepts.
pub const QPE_QUBIT_CAP: usize = 20;

/// Padding of the spectral window used by [`auto_time`].
const TIME_PAD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sampling {
    pub shots: u64,
    pub seed: u64,
}

/// Read-out distribution over the `2^m` ancilla outcomes; outcome `y`
/// corresponds to the phase `y / 2^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseHistogram {
    pub m: usize,
    pub probabilities: Vec<f64>,
    /// Sampled counts, present only when shots were requested.
    pub counts: Option<Vec<u64>>,
}

impl PhaseHistogram {
    pub fn resolution(&self) -> f64 {
        1.0 / (1u64 << self.m) as f64
    }

    pub fn phase(&self, outcome: usize) -> f64 {
        outcome as f64 * self.resolution()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Most likely outcome; ties go to the smaller index.
    pub fn peak(&self) -> (usize, f64) {
        self.probabilities
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, p)| if p > best.1 { (i, p) } else { best })
    }

    /// Outcomes whose probability is a strict local maximum (cyclically) and
    /// at least `floor`, in descending probability.
    pub fn peaks(&self, floor: f64) -> Vec<(usize, f64)> {
        let n = self.probabilities.len();
        let p = &self.probabilities;
        let mut v: Vec<(usize, f64)> = (0..n)
            .filter(|&i| {
                p[i] >= floor && (n == 1 || (p[i] >= p[(i + n - 1) % n] && p[i] > p[(i + 1) % n]))
            })
            .map(|i| (i, p[i]))
            .collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }

    pub fn max_deviation(&self, other: &PhaseHistogram) -> f64 {
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Textbook phase estimation with `m` ancillas above the system register.
///
/// `power(j)` returns the system matrix for the ancilla-`j` controlled
/// operation, normally `U^{2^j}`. For `U|u> = e^{2πiθ}|u>` the read-out
/// peaks at `y ≈ θ 2^m`.
pub fn qpe_run<F>(
    mut power: F,
    psi0: &FockStateVector,
    m: usize,
    sampling: Option<Sampling>,
) -> Result<PhaseHistogram>
where
    F: FnMut(u32) -> Result<CMatrix>,
{
    if m == 0 {
        return Err(Error::Argument("phase estimation needs m >= 1".into()));
    }
    let total = m + psi0.n_modes();
    if total > QPE_QUBIT_CAP {
        return Err(Error::Capacity {
            what: "qubits for phase estimation",
            size: total,
            limit: QPE_QUBIT_CAP,
        });
    }
    let dim = psi0.amps.len();
    let outcomes = 1usize << m;
    let powers = (0..m as u32).map(&mut power).collect::<Result<Vec<_>>>()?;
    if powers.iter().any(|u| u.nrows() != dim || u.ncols() != dim) {
        return Err(Error::Argument("controlled unitary has the wrong size".into()));
    }
    // after the Hadamards and controlled powers, ancilla value k carries
    // Π_{j ∈ k} U_j psi0 / sqrt(2^m)
    let mut blocks: Vec<DVector<Complex64>> = Vec::with_capacity(outcomes);
    blocks.push(DVector::from_column_slice(&psi0.amps));
    for k in 1..outcomes {
        let top = usize::BITS - 1 - k.leading_zeros();
        let prev = &blocks[k ^ (1 << top)];
        blocks.push(&powers[top as usize] * prev);
    }
    // inverse Fourier transform on the ancillas
    let norm = 1.0 / outcomes as f64;
    let mut probabilities = Vec::with_capacity(outcomes);
    for y in 0..outcomes {
        let mut acc = DVector::<Complex64>::zeros(dim);
        for (k, b) in blocks.iter().enumerate() {
            let angle = -2.0 * PI * ((k * y) % outcomes) as f64 / outcomes as f64;
            acc.axpy(Complex64::from_polar(norm, angle), b, Complex64::new(1.0, 0.0));
        }
        probabilities.push(acc.norm_squared());
    }
    let counts = match sampling {
        None => None,
        Some(s) => {
            let dist = WeightedIndex::new(&probabilities)
                .map_err(|e| Error::Domain(format!("cannot sample read-out: {e}")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            let mut counts = vec![0u64; outcomes];
            for _ in 0..s.shots {
                counts[dist.sample(&mut rng)] += 1;
            }
            Some(counts)
        }
    };
    Ok(PhaseHistogram {
        m,
        probabilities,
        counts,
    })
}

/// `exp(-i 2^j t H)` from one eigendecomposition.
pub fn exact_power_unitaries(h: &CMatrix, t: f64, m: usize) -> Vec<CMatrix> {
    let (vals, vecs) = eigh(h);
    (0..m)
        .map(|j| {
            let tj = t * (1u64 << j) as f64;
            let d = DVector::from_iterator(
                vals.len(),
                vals.iter().map(|e| Complex64::from_polar(1.0, -tj * e)),
            );
            &vecs * CMatrix::from_diagonal(&d) * vecs.adjoint()
        })
        .collect()
}

/// Evolution time that keeps the whole spectrum inside one phase period,
/// with the lower spectral bound as the energy floor: `(t, floor)`.
pub fn auto_time(h: &CMatrix) -> (f64, f64) {
    let (lo, hi) = gershgorin_bounds(h);
    let span = (hi - lo).max(1e-12);
    let window = span * (1.0 + TIME_PAD);
    (2.0 * PI / window, lo - 0.5 * (window - span))
}

/// Energy for a read-out phase of `e^{-itH}`: `θ = -tE/2π mod 1`, taking
/// the branch in `[floor, floor + 2π/t)`.
pub fn phase_to_energy(phase: f64, t: f64, floor: f64) -> f64 {
    let period = 2.0 * PI / t;
    let e = -phase * period;
    floor + (e - floor).rem_euclid(period)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(vals: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(
            vals.len(),
            vals.iter().map(|&v| Complex64::new(v, 0.0)),
        ))
    }

    #[test]
    fn exact_phase_gives_single_outcome() {
        // single mode, E = -2π·(5/16)/t so that θ = 5/16
        let t = 1.0;
        let e = -2.0 * PI * 5.0 / 16.0;
        let h = diag(&[0.0, e]);
        let psi = FockStateVector::basis(1, 1).unwrap();
        let us = exact_power_unitaries(&h, t, 4);
        let hist = qpe_run(|j| Ok(us[j as usize].clone()), &psi, 4, None).unwrap();
        assert!((hist.probabilities[5] - 1.0).abs() < 1e-12);
        assert!((hist.total() - 1.0).abs() < 1e-12);
        assert!((phase_to_energy(hist.phase(5), t, -2.0 * PI) - e).abs() < 1e-12);
    }

    #[test]
    fn inexact_phase_peak_bound() {
        let t = 1.0;
        let theta = 0.3217;
        let h = diag(&[0.0, -2.0 * PI * theta]);
        let psi = FockStateVector::basis(1, 1).unwrap();
        let us = exact_power_unitaries(&h, t, 5);
        let hist = qpe_run(|j| Ok(us[j as usize].clone()), &psi, 5, None).unwrap();
        let (k, p) = hist.peak();
        assert_eq!(k, (theta * 32.0_f64).round() as usize);
        assert!(p >= 4.0 / (PI * PI));
    }

    #[test]
    fn sampling_is_seeded() {
        let h = diag(&[0.0, 1.0]);
        let mut psi = FockStateVector::basis(1, 0).unwrap();
        psi.amps = vec![Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)];
        let us = exact_power_unitaries(&h, 1.3, 3);
        let s = Some(Sampling { shots: 500, seed: 7 });
        let a = qpe_run(|j| Ok(us[j as usize].clone()), &psi, 3, s).unwrap();
        let b = qpe_run(|j| Ok(us[j as usize].clone()), &psi, 3, s).unwrap();
        assert_eq!(a.counts, b.counts);
        assert_eq!(a.counts.unwrap().iter().sum::<u64>(), 500);
    }
}
