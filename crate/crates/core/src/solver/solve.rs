use std::collections::{BTreeMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bch::bch_transform;
use super::generator::{is_upper, Domain, GeneratorB};
use super::h0::{split_h0_w, H0Choice, H0Split};
use crate::algebra::{FermionOperator, TermKey};
use crate::error::{Error, Result};
use crate::partition::OrbitalPartition;

fn default_rank() -> usize {
    2
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    100
}
fn default_body_rank() -> usize {
    2
}
fn default_intermediate_rank() -> usize {
    3
}
fn default_singular_floor() -> f64 {
    1e-8
}
fn default_true() -> bool {
    true
}
fn default_window() -> usize {
    6
}

/// Options of the truncated amplitude solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverOptions {
    /// Commutator rank `l` kept in the amplitude equations.
    #[serde(default = "default_rank")]
    pub rank: usize,
    #[serde(default)]
    pub domain: Domain,
    /// Residual norm at which the solve stops (energy units).
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Largest many-body rank of the generator.
    #[serde(default = "default_body_rank")]
    pub body_rank: usize,
    /// Truncation rank for nested commutators inside the expansion.
    #[serde(default = "default_intermediate_rank")]
    pub intermediate_rank: usize,
    /// Shift added to denominators below `singular_floor`; zero disables it.
    #[serde(default)]
    pub level_shift: f64,
    #[serde(default = "default_singular_floor")]
    pub singular_floor: f64,
    /// Residual-history extrapolation.
    #[serde(default = "default_true")]
    pub acceleration: bool,
    #[serde(default = "default_window")]
    pub diis_window: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            rank: default_rank(),
            domain: Domain::Eod,
            tol: default_tol(),
            max_iter: default_max_iter(),
            body_rank: default_body_rank(),
            intermediate_rank: default_intermediate_rank(),
            level_shift: 0.0,
            singular_floor: default_singular_floor(),
            acceleration: true,
            diis_window: default_window(),
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.rank == 0 {
            return Err(Error::Config("solver.rank must be at least 1".into()));
        }
        if self.body_rank == 0 || self.intermediate_rank < self.body_rank {
            return Err(Error::Config(
                "solver.body_rank must be >= 1 and <= solver.intermediate_rank".into(),
            ));
        }
        if !(self.tol > 0.0) || self.level_shift < 0.0 || !(self.singular_floor >= 0.0) {
            return Err(Error::Config(
                "solver.tol must be positive; level_shift and singular_floor non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual_norm_history: Vec<f64>,
    pub final_residual: f64,
    /// Norm of residual components above the generator's body rank, which
    /// the amplitudes cannot reach.
    pub out_of_space_residual: f64,
    pub amplitude_norm: f64,
    pub commutator_rank: usize,
    pub domain: Domain,
    pub converged: bool,
    /// Smallest `|D_μ|` met among updated amplitudes.
    pub min_abs_denominator: Option<f64>,
    pub shifted_denominators: usize,
}

/// `P_domain(e^B H e^{-B})` with the commutator series truncated at `rank`.
pub fn residual(
    h: &FermionOperator,
    b: &GeneratorB,
    rank: usize,
    part: &OrbitalPartition,
    intermediate_rank: Option<usize>,
) -> Result<FermionOperator> {
    let g = bch_transform(h, b.op(), rank, intermediate_rank)?;
    part.project(&g, b.domain().projector())
}

struct Diis {
    window: usize,
    history: VecDeque<(BTreeMap<TermKey, Complex64>, BTreeMap<TermKey, Complex64>)>,
}

impl Diis {
    fn new(window: usize) -> Self {
        Self {
            window,
            history: VecDeque::new(),
        }
    }

    /// Records `(amplitudes, step)` and returns the least-squares
    /// extrapolation `Σ c_i amplitudes_i` with `Σ c_i = 1`.
    fn extrapolate(
        &mut self,
        amps: BTreeMap<TermKey, Complex64>,
        step: BTreeMap<TermKey, Complex64>,
    ) -> BTreeMap<TermKey, Complex64> {
        self.history.push_back((amps.clone(), step));
        while self.history.len() > self.window {
            self.history.pop_front();
        }
        let n = self.history.len();
        if n < 2 {
            return amps;
        }
        let dot = |a: &BTreeMap<TermKey, Complex64>, b: &BTreeMap<TermKey, Complex64>| -> f64 {
            a.iter()
                .filter_map(|(k, x)| b.get(k).map(|y| (x.conj() * y).re))
                .sum()
        };
        let mut m = DMatrix::<f64>::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..=i {
                let v = dot(&self.history[i].1, &self.history[j].1);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
            m[(i, n)] = -1.0;
            m[(n, i)] = -1.0;
        }
        // normalise the Gram block to keep the system well scaled
        let scale = (0..n).map(|i| m[(i, i)]).fold(0.0, f64::max);
        if scale <= 0.0 {
            return amps;
        }
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] /= scale;
            }
        }
        let mut rhs = DVector::<f64>::zeros(n + 1);
        rhs[n] = -1.0;
        let Some(coef) = m.lu().solve(&rhs) else {
            self.history.clear();
            return amps;
        };
        if coef.iter().any(|c| !c.is_finite()) {
            self.history.clear();
            return amps;
        }
        let mut out: BTreeMap<TermKey, Complex64> = BTreeMap::new();
        for (i, (a, _)) in self.history.iter().enumerate() {
            for (k, x) in a {
                *out.entry(*k).or_default() += x * coef[i];
            }
        }
        out
    }
}

/// Solves `P_domain(H + Σ_{i<=l} (1/i!) ad_B^i H) = 0` for the amplitudes of
/// `B` by preconditioned fixed-point iteration `b_μ += r_μ / D_μ`.
pub fn solve_swrrst(
    h: &FermionOperator,
    part: &OrbitalPartition,
    h0: &H0Choice,
    opts: &SolverOptions,
) -> Result<(GeneratorB, SolveReport)> {
    opts.validate()?;
    let split = split_h0_w(h, part, h0)?;
    solve_with_split(h, part, &split, opts)
}

pub(crate) fn solve_with_split(
    h: &FermionOperator,
    part: &OrbitalPartition,
    split: &H0Split,
    opts: &SolverOptions,
) -> Result<(GeneratorB, SolveReport)> {
    let mut amps: BTreeMap<TermKey, Complex64> = BTreeMap::new();
    let mut diis = Diis::new(opts.diis_window.max(1));
    let mut report = SolveReport {
        iterations: 0,
        residual_norm_history: Vec::new(),
        final_residual: f64::NAN,
        out_of_space_residual: 0.0,
        amplitude_norm: 0.0,
        commutator_rank: opts.rank,
        domain: opts.domain,
        converged: false,
        min_abs_denominator: None,
        shifted_denominators: 0,
    };
    loop {
        let b = GeneratorB::from_amplitudes(amps.clone(), opts.domain, opts.body_rank);
        if !b.op().is_anti_hermitian(1e-12 * b.op().max_abs().max(1.0)) {
            return Err(Error::Structure("generator lost anti-Hermiticity".into()));
        }
        b.check_confinement(part)?;
        let r = residual(h, &b, opts.rank, part, Some(opts.intermediate_rank))?;
        let in_space = r.truncate_rank(opts.body_rank);
        let out_space = r.filter(|k| k.body_rank() > opts.body_rank);
        let norm = in_space.norm();
        report.residual_norm_history.push(norm);
        report.final_residual = norm;
        report.out_of_space_residual = out_space.norm();
        report.amplitude_norm = b.norm();
        if norm <= opts.tol {
            report.converged = true;
            return Ok((b, report));
        }
        if report.iterations >= opts.max_iter || !norm.is_finite() {
            return Err(Error::Divergence {
                iterations: report.iterations,
                residual: norm,
            });
        }

        let mut step = BTreeMap::new();
        for (k, rk) in in_space.terms() {
            if !is_upper(k) {
                continue;
            }
            let d = split.denominator(k);
            report.min_abs_denominator =
                Some(report.min_abs_denominator.map_or(d.abs(), |m: f64| m.min(d.abs())));
            let d = if d.abs() < opts.singular_floor {
                if opts.level_shift > 0.0 {
                    report.shifted_denominators += 1;
                    d + opts.level_shift * if d < 0.0 { -1.0 } else { 1.0 }
                } else {
                    return Err(Error::Singularity {
                        term: k.to_string(),
                        denominator: d.abs(),
                    });
                }
            } else {
                d
            };
            step.insert(*k, rk / d);
        }
        let mut next = amps.clone();
        for (k, s) in &step {
            *next.entry(*k).or_default() += s;
        }
        amps = if opts.acceleration {
            diis.extrapolate(next, step)
        } else {
            next
        };
        report.iterations += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn part() -> OrbitalPartition {
        OrbitalPartition::new(2, 1, vec![-1.0, -1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn diagonal_h_needs_no_iterations() {
        let h = FermionOperator::number(0).scale_real(-1.0) + FermionOperator::number(3);
        let (b, rep) = solve_swrrst(&h, &part(), &H0Choice::Diagonal, &SolverOptions::default()).unwrap();
        assert!(b.is_zero());
        assert_eq!(rep.iterations, 0);
        assert!(rep.converged);
    }

    #[test]
    fn residual_at_zero_generator_is_eod_part() {
        let p = part();
        let h = FermionOperator::number(0).scale_real(-1.0)
            + FermionOperator::excitation(&[0], &[2], c(0.1))
            + FermionOperator::excitation(&[2], &[0], c(0.1))
            + FermionOperator::excitation(&[2], &[3], c(0.05))
            + FermionOperator::excitation(&[3], &[2], c(0.05));
        let r = residual(&h, &GeneratorB::zero(Domain::Eod, 2), 2, &p, None).unwrap();
        assert_eq!(
            r,
            p.project(&h, crate::partition::SectorLabel::ExternalEnergeticallyDistinct)
                .unwrap()
        );
    }

    #[test]
    fn zero_isoenergetic_denominator_is_singular() {
        let p = part();
        let h = FermionOperator::number(2)
            + FermionOperator::number(3)
            + FermionOperator::excitation(&[2], &[3], c(0.05))
            + FermionOperator::excitation(&[3], &[2], c(0.05));
        let opts = SolverOptions {
            domain: Domain::Od,
            ..Default::default()
        };
        match solve_swrrst(&h, &p, &H0Choice::Diagonal, &opts) {
            Err(Error::Singularity { denominator, term }) => {
                assert_eq!(denominator, 0.0);
                assert_eq!(term, "E^{3}_{4}");
            }
            other => panic!("expected singularity, got {other:?}"),
        }
    }

    #[test]
    fn divergence_is_reported() {
        let p = part();
        let h = FermionOperator::number(0).scale_real(-1.0)
            + FermionOperator::number(2)
            + FermionOperator::excitation(&[0], &[2], c(0.1))
            + FermionOperator::excitation(&[2], &[0], c(0.1));
        let opts = SolverOptions {
            max_iter: 1,
            tol: 1e-300,
            ..Default::default()
        };
        assert!(matches!(
            solve_swrrst(&h, &p, &H0Choice::Diagonal, &opts),
            Err(Error::Divergence { iterations: 1, .. })
        ));
    }

    #[test]
    fn options_validation() {
        let bad = SolverOptions {
            rank: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverOptions {
            body_rank: 4,
            intermediate_rank: 3,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
