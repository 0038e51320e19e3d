use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{EvolutionConfig, RunConfig};
use super::integrals::{load_integrals, FcidumpHeader};
use crate::algebra::{hamiltonian_from_tensors, to_dense, FermionOperator};
use crate::dynamics::{
    auto_time, exact_power_unitaries, phase_to_energy, power_evolution, qpe_run, sector_prepare,
    split_g, unitary_of, GParts, PhaseHistogram, Sampling, SectorSpec, TrotterPlan,
};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, expm_hermitian, gershgorin_bounds, operator_norm, CMatrix};
use crate::partition::{to_number_polynomial, OrbitalPartition, SectorCensus};
use crate::qubit::{jw_map, locality_report, schedule_number_exponential, LocalityReport};
use crate::solver::{
    apply_auxiliary, build_g, check_noncommutation, residual, solve_swrrst, split_h0_w,
    BuildOptions, BuiltG, GDiagnostics, GeneratorB, NonCommutation, SolveReport,
};

/// Largest register for which spectra and evolution are checked densely.
pub const DENSE_STAGE_CAP: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Decompose,
    Solve,
    Map,
    Evolve,
    Qpe,
    Verify,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Decompose,
        Stage::Solve,
        Stage::Map,
        Stage::Evolve,
        Stage::Qpe,
        Stage::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Decompose => "decompose",
            Stage::Solve => "solve",
            Stage::Map => "map",
            Stage::Evolve => "evolve",
            Stage::Qpe => "qpe",
            Stage::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub version: String,
    pub seed: u64,
    pub stages: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryReport {
    pub terms: usize,
    pub norm: f64,
    pub h_change: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalityBundle {
    pub h: LocalityReport,
    pub g: LocalityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub n_e: usize,
    pub index: usize,
    pub h: f64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectraTable {
    pub rows: Vec<SpectrumRow>,
    pub max_abs_diff: f64,
    /// Eigenvalue shifts are bounded by the discarded norm.
    pub discarded_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterPoint {
    pub r: usize,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorPhases {
    pub n_e: usize,
    pub t: f64,
    pub energy_floor: f64,
    pub ground_energy: f64,
    pub exact: PhaseHistogram,
    pub exact_peak_energy: f64,
    pub swrrst: Option<PhaseHistogram>,
    pub swrrst_peak_energy: Option<f64>,
    pub max_probability_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub residual: f64,
    pub solve_residual: f64,
    pub residual_diff: f64,
    pub g_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageFailure {
    pub stage: String,
    pub message: String,
    pub exit_code: i32,
}

/// Everything a run produced; stages that did not run leave their field empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultBundle {
    pub provenance: Provenance,
    pub census: Option<SectorCensus>,
    pub auxiliary: Option<AuxiliaryReport>,
    pub solve: Option<SolveReport>,
    pub noncommutation: Option<NonCommutation>,
    pub g: Option<GDiagnostics>,
    pub locality: Option<LocalityBundle>,
    pub spectra: Option<SpectraTable>,
    pub trotter: Vec<TrotterPoint>,
    pub phases: Vec<SectorPhases>,
    pub verify: Option<VerifyReport>,
    pub notes: Vec<String>,
    pub failure: Option<StageFailure>,
}

impl ResultBundle {
    pub fn empty(provenance: Provenance) -> Self {
        Self {
            provenance,
            census: None,
            auxiliary: None,
            solve: None,
            noncommutation: None,
            g: None,
            locality: None,
            spectra: None,
            trotter: Vec::new(),
            phases: Vec::new(),
            verify: None,
            notes: Vec::new(),
            failure: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Reuse `B` and `G` persisted by an earlier run with the same config.
    pub stage_cache: bool,
}

const H_FILE: &str = "H.op";
const B_FILE: &str = "B.op";
const G_FILE: &str = "G.op";
const SOLVE_FILE: &str = "solve.json";
const G_DIAG_FILE: &str = "g.json";
const HASH_FILE: &str = "config.sha256";

/// Stage driver holding the intermediate results of one configuration.
pub struct Pipeline {
    config: RunConfig,
    base_dir: PathBuf,
    out_dir: PathBuf,
    cache: bool,
    seed: u64,
    part: Option<OrbitalPartition>,
    header: Option<FcidumpHeader>,
    h: Option<FermionOperator>,
    solved: Option<(GeneratorB, SolveReport)>,
    built: Option<BuiltG>,
    bundle: ResultBundle,
}

impl Pipeline {
    /// `base_dir` resolves relative paths in the config.
    pub fn new(config: RunConfig, base_dir: &Path, opts: &RunOptions) -> Result<Self> {
        config.validate()?;
        let out_dir = opts
            .out_dir
            .clone()
            .unwrap_or_else(|| base_dir.join(&config.output.dir));
        let seed = opts
            .seed
            .or_else(|| config.evolution.as_ref().map(|e| e.seed))
            .unwrap_or(0);
        let config_hash = config.hash();
        // cached stages are trusted only if they came from this exact config
        let cache = opts.stage_cache
            && std::fs::read_to_string(out_dir.join(HASH_FILE))
                .is_ok_and(|h| h.trim() == config_hash);
        let provenance = Provenance {
            config_hash,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            stages: Vec::new(),
        };
        Ok(Self {
            config,
            base_dir: base_dir.to_path_buf(),
            out_dir,
            cache,
            seed,
            part: None,
            header: None,
            h: None,
            solved: None,
            built: None,
            bundle: ResultBundle::empty(provenance),
        })
    }

    pub fn from_path(path: &Path, opts: &RunOptions) -> Result<Self> {
        let config = RunConfig::load(path)?;
        let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
        Self::new(config, &base, opts)
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    pub fn bundle(&self) -> &ResultBundle {
        &self.bundle
    }

    pub fn into_bundle(self) -> ResultBundle {
        self.bundle
    }

    pub fn partition(&mut self) -> Result<&OrbitalPartition> {
        self.ensure_h()?;
        Ok(self.part.as_ref().expect("loaded with H"))
    }

    pub fn hamiltonian(&mut self) -> Result<&FermionOperator> {
        self.ensure_h()?;
        Ok(self.h.as_ref().expect("loaded"))
    }

    fn persist(&self, name: &str, contents: &str) -> Result<()> {
        std::fs::create_dir_all(&self.out_dir)?;
        std::fs::write(self.out_dir.join(name), contents)?;
        Ok(())
    }

    fn read_cached(&self, name: &str) -> Option<String> {
        if !self.cache {
            return None;
        }
        std::fs::read_to_string(self.out_dir.join(name)).ok()
    }

    fn ensure_h(&mut self) -> Result<()> {
        if self.h.is_some() {
            return Ok(());
        }
        self.load().map_err(|e| e.in_stage("load"))
    }

    fn load(&mut self) -> Result<()> {
        let input = &self.config.input;
        let path = self.base_dir.join(&input.path);
        let ints = load_integrals(&path, input.format)?;
        let pc = &self.config.partition;
        let t = &ints.tensors;
        if t.n_modes() != 2 * pc.n {
            return Err(Error::Config(format!(
                "partition.n = {} but the integrals have {} spin-orbitals",
                pc.n,
                t.n_modes()
            )));
        }
        let energies = match &pc.energies {
            Some(e) => e.clone(),
            None => (0..pc.n)
                .map(|i| 0.5 * (t.h(2 * i, 2 * i).re + t.h(2 * i + 1, 2 * i + 1).re))
                .collect(),
        };
        let order: Option<Vec<usize>> = pc
            .ordering
            .as_ref()
            .map(|o| o.iter().map(|l| l - 1).collect());
        let part = OrbitalPartition::from_orbitals(pc.k, &energies, order.as_deref())?;
        let mut h = part.to_positions(&hamiltonian_from_tensors(t)?)?;
        if let Some(aux) = &self.config.auxiliary {
            let c = FermionOperator::from_text(&aux.terms.join("\n"))?;
            let hc = apply_auxiliary(&h, &c, aux.rank)?;
            self.bundle.auxiliary = Some(AuxiliaryReport {
                terms: c.len(),
                norm: c.norm(),
                h_change: hc.distance(&h),
            });
            h = hc;
        }
        self.persist(HASH_FILE, &format!("{}\n", self.bundle.provenance.config_hash))?;
        self.persist(H_FILE, &h.to_text())?;
        self.header = ints.header;
        self.part = Some(part);
        self.h = Some(h);
        Ok(())
    }

    fn ensure_solved(&mut self) -> Result<()> {
        if self.solved.is_some() {
            return Ok(());
        }
        self.solve().map_err(|e| e.in_stage("solve"))
    }

    fn solve(&mut self) -> Result<()> {
        self.ensure_h()?;
        let h = self.h.as_ref().expect("loaded");
        let part = self.part.as_ref().expect("loaded");
        let opts = &self.config.solver;
        let cached = match (self.read_cached(B_FILE), self.read_cached(SOLVE_FILE)) {
            (Some(b), Some(rep)) => {
                let op = FermionOperator::from_text(&b)?;
                let b = GeneratorB::from_amplitudes(
                    op.terms()
                        .filter(|(k, _)| k < &&k.adjoint())
                        .map(|(k, c)| (*k, *c)),
                    opts.domain,
                    opts.body_rank,
                );
                let rep: SolveReport = serde_json::from_str(&rep)
                    .map_err(|e| Error::Config(format!("bad cached solve report: {e}")))?;
                Some((b, rep))
            }
            _ => None,
        };
        let (b, report) = match cached {
            Some(x) => x,
            None => {
                let (b, report) = solve_swrrst(h, part, &self.config.h0, opts)?;
                self.persist(B_FILE, &b.op().to_text())?;
                self.persist(SOLVE_FILE, &to_json(&report))?;
                (b, report)
            }
        };
        self.bundle.noncommutation = Some(check_noncommutation(h, &b)?);
        self.bundle.solve = Some(report.clone());
        if !report.converged {
            self.solved = Some((b, report.clone()));
            return Err(Error::Divergence {
                iterations: report.iterations,
                residual: report.final_residual,
            });
        }
        self.solved = Some((b, report));
        Ok(())
    }

    fn ensure_g(&mut self) -> Result<()> {
        if self.built.is_some() {
            return Ok(());
        }
        self.ensure_solved()?;
        self.build().map_err(|e| e.in_stage("solve"))
    }

    fn build(&mut self) -> Result<()> {
        let h = self.h.as_ref().expect("loaded");
        let part = self.part.as_ref().expect("loaded");
        let (b, _) = self.solved.as_ref().expect("solved");
        let cached = match (self.read_cached(G_FILE), self.read_cached(G_DIAG_FILE)) {
            (Some(g), Some(d)) => {
                let g = FermionOperator::from_text(&g)?;
                let diagnostics: GDiagnostics = serde_json::from_str(&d)
                    .map_err(|e| Error::Config(format!("bad cached G diagnostics: {e}")))?;
                Some(BuiltG {
                    discarded: FermionOperator::zero(),
                    g,
                    diagnostics,
                })
            }
            _ => None,
        };
        let built = match cached {
            Some(x) => x,
            None => {
                let built = build_g(h, b, part, &BuildOptions::default())?;
                self.persist(G_FILE, &built.g.to_text())?;
                self.persist(G_DIAG_FILE, &to_json(&built.diagnostics))?;
                built
            }
        };
        self.bundle.g = Some(built.diagnostics.clone());
        self.built = Some(built);
        Ok(())
    }

    fn decompose(&mut self) -> Result<()> {
        self.ensure_h()?;
        let part = self.part.as_ref().expect("loaded");
        self.bundle.census = Some(part.census(self.h.as_ref().expect("loaded"))?);
        Ok(())
    }

    fn map(&mut self) -> Result<()> {
        self.ensure_g()?;
        let part = self.part.as_ref().expect("loaded");
        let h = self.h.as_ref().expect("loaded");
        let g = &self.built.as_ref().expect("built").g;
        let report = LocalityBundle {
            h: locality_report(h, part)?,
            g: locality_report(g, part)?,
        };
        self.persist("G.pauli", &jw_map(g, part.n_modes())?.to_text())?;
        if let Ok(parts) = split_g(g, part) {
            let f = to_number_polynomial(&parts.external, part)?;
            let t = self.evolution_time()?.0;
            let schedule = schedule_number_exponential(&f, t);
            self.persist("PE.schedule", &schedule.to_text())?;
        }
        self.bundle.locality = Some(report);
        Ok(())
    }

    fn check_dense(&self) -> Result<usize> {
        let n = self.part.as_ref().expect("loaded").n_modes();
        if n > DENSE_STAGE_CAP {
            return Err(Error::Capacity {
                what: "spin-orbitals for dense evolution",
                size: n,
                limit: DENSE_STAGE_CAP,
            });
        }
        Ok(n)
    }

    fn dense_h(&self) -> Result<CMatrix> {
        let n = self.check_dense()?;
        Ok(to_dense(self.h.as_ref().expect("loaded"), n)?.matrix)
    }

    /// `(t, energy floor)` for evolution and phase read-out.
    fn evolution_time(&self) -> Result<(f64, f64)> {
        let hm = self.dense_h()?;
        let ev = self.config.evolution.clone().unwrap_or_default();
        Ok(match ev.t {
            Some(t) => (t, gershgorin_bounds(&hm).0),
            None => auto_time(&hm),
        })
    }

    fn g_parts(&mut self) -> Option<(GParts, TrotterPlan)> {
        let part = self.part.as_ref().expect("loaded");
        let g = &self.built.as_ref().expect("built").g;
        match split_g(g, part).and_then(|p| TrotterPlan::new(&p, part).map(|plan| (p, plan))) {
            Ok(x) => Some(x),
            Err(e) => {
                let note = format!("product-formula evolution skipped: {e}");
                if !self.bundle.notes.contains(&note) {
                    self.bundle.notes.push(note);
                }
                None
            }
        }
    }

    fn evolve(&mut self) -> Result<()> {
        self.ensure_g()?;
        let n = self.check_dense()?;
        let hm = self.dense_h()?;
        let built = self.built.as_ref().expect("built");
        let gm = to_dense(&built.g, n)?.matrix;
        let mut rows = Vec::new();
        let mut max_diff: f64 = 0.0;
        for n_e in 0..=n {
            let states = crate::algebra::sector_states(n, n_e);
            let block = |m: &CMatrix| {
                CMatrix::from_fn(states.len(), states.len(), |i, j| m[(states[i], states[j])])
            };
            let eh = eigenvalues(&block(&hm));
            let eg = eigenvalues(&block(&gm));
            for (index, (h, g)) in eh.iter().zip(&eg).enumerate() {
                max_diff = max_diff.max((h - g).abs());
                rows.push(SpectrumRow {
                    n_e,
                    index,
                    h: *h,
                    g: *g,
                });
            }
        }
        self.bundle.spectra = Some(SpectraTable {
            rows,
            max_abs_diff: max_diff,
            discarded_norm: built.diagnostics.discarded_norm,
        });
        let (t, _) = self.evolution_time()?;
        let scan = self.config.evolution.clone().unwrap_or_default().trotter_scan;
        if let Some((_, plan)) = self.g_parts() {
            let exact = expm_hermitian(&gm, t);
            let mut points = Vec::new();
            for r in scan {
                let u = unitary_of(n, |psi| plan.evolve(t, r, psi))?;
                points.push(TrotterPoint {
                    r,
                    error: operator_norm(&(&u - &exact)),
                });
            }
            self.bundle.trotter = points;
        }
        Ok(())
    }

    fn sectors(&self, ev: &EvolutionConfig) -> Result<Vec<usize>> {
        if !ev.sectors.is_empty() {
            return Ok(ev.sectors.clone());
        }
        match self.header.and_then(|h| h.nelec) {
            Some(n) => Ok(vec![n]),
            None => Err(Error::Config(
                "evolution.sectors is empty and the input gives no electron count".into(),
            )),
        }
    }

    fn qpe(&mut self) -> Result<()> {
        self.ensure_g()?;
        let n = self.check_dense()?;
        let ev = self.config.evolution.clone().unwrap_or_default();
        let sectors = self.sectors(&ev)?;
        let hm = self.dense_h()?;
        let (t, floor) = self.evolution_time()?;
        let h = self.h.as_ref().expect("loaded");
        let part = self.part.as_ref().expect("loaded");
        let energies = split_h0_w(h, part, &self.config.h0)?.energies;
        let exact_us = exact_power_unitaries(&hm, t, ev.m);
        let swrrst_us = match self.g_parts() {
            Some((_, plan)) => {
                let b = self.solved.as_ref().expect("solved").0.op().clone();
                let mut us = Vec::with_capacity(ev.m);
                for j in 0..ev.m as u32 {
                    us.push(unitary_of(n, |psi| power_evolution(&b, &plan, t, j, ev.r, psi))?);
                }
                Some(us)
            }
            None => None,
        };
        let mut out = Vec::new();
        for n_e in sectors {
            let psi = sector_prepare(n, n_e, &SectorSpec::LowestH0(energies.clone()))?;
            let sampling = ev.shots.map(|shots| Sampling {
                shots,
                seed: self.seed.wrapping_add(n_e as u64),
            });
            let exact = qpe_run(|j| Ok(exact_us[j as usize].clone()), &psi, ev.m, sampling)?;
            let swrrst = match &swrrst_us {
                Some(us) => Some(qpe_run(|j| Ok(us[j as usize].clone()), &psi, ev.m, sampling)?),
                None => None,
            };
            let states = crate::algebra::sector_states(n, n_e);
            let block = CMatrix::from_fn(states.len(), states.len(), |i, j| {
                hm[(states[i], states[j])]
            });
            let ground = eigenvalues(&block)[0];
            let peak_energy = |hist: &PhaseHistogram| phase_to_energy(hist.phase(hist.peak().0), t, floor);
            out.push(SectorPhases {
                n_e,
                t,
                energy_floor: floor,
                ground_energy: ground,
                exact_peak_energy: peak_energy(&exact),
                swrrst_peak_energy: swrrst.as_ref().map(peak_energy),
                max_probability_deviation: swrrst.as_ref().map(|s| s.max_deviation(&exact)),
                exact,
                swrrst,
            });
        }
        self.bundle.phases = out;
        Ok(())
    }

    /// Recomputes the residual from the persisted `H` and `B` and rebuilds
    /// `G` for comparison with the persisted one.
    fn verify(&mut self) -> Result<()> {
        self.ensure_g()?;
        let read = |name: &str| -> Result<FermionOperator> {
            let text = std::fs::read_to_string(self.out_dir.join(name)).map_err(|e| {
                Error::Config(format!("missing persisted {name}: {e}"))
            })?;
            FermionOperator::from_text(&text)
        };
        let h = read(H_FILE)?;
        let b_op = read(B_FILE)?;
        let g_stored = read(G_FILE)?;
        let part = self.part.as_ref().expect("loaded");
        let opts = &self.config.solver;
        let b = GeneratorB::from_amplitudes(
            b_op.terms().filter(|(k, _)| k < &&k.adjoint()).map(|(k, c)| (*k, *c)),
            opts.domain,
            opts.body_rank,
        );
        let r = residual(&h, &b, opts.rank, part, Some(opts.intermediate_rank))?;
        let norm = r.truncate_rank(opts.body_rank).norm();
        let solve_residual = self.solved.as_ref().expect("solved").1.final_residual;
        let rebuilt = build_g(&h, &b, part, &BuildOptions::default())?;
        self.bundle.verify = Some(VerifyReport {
            residual: norm,
            solve_residual,
            residual_diff: (norm - solve_residual).abs(),
            g_diff: rebuilt.g.distance(&g_stored),
        });
        Ok(())
    }

    pub fn run_stage(&mut self, stage: Stage) -> Result<()> {
        let result = match stage {
            Stage::Decompose => self.decompose(),
            Stage::Solve => self.ensure_g(),
            Stage::Map => self.map(),
            Stage::Evolve => self.evolve(),
            Stage::Qpe => self.qpe(),
            Stage::Verify => self.verify(),
        };
        match result {
            Ok(()) => {
                self.bundle.provenance.stages.push(stage.name().to_string());
                Ok(())
            }
            Err(e) => {
                let e = e.in_stage(stage.name());
                let (name, msg) = match &e {
                    Error::Stage { stage, source } => (stage.to_string(), source.to_string()),
                    other => (stage.name().to_string(), other.to_string()),
                };
                self.bundle.failure = Some(StageFailure {
                    stage: name,
                    message: msg,
                    exit_code: e.exit_code(),
                });
                Err(e)
            }
        }
    }

    /// Every stage, skipping evolution and phase estimation when the config
    /// has no `evolution` section.
    pub fn planned_stages(&self) -> Vec<Stage> {
        Stage::ALL
            .into_iter()
            .filter(|s| self.config.evolution.is_some() || !matches!(s, Stage::Evolve | Stage::Qpe))
            .collect()
    }

    /// Runs `stages` in order, stopping at the first failure.
    pub fn run_stages(&mut self, stages: &[Stage]) -> Result<()> {
        for &s in stages {
            self.run_stage(s)?;
        }
        Ok(())
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("plain data serializes") + "\n"
}

/// Loads, solves, maps, evolves, estimates phases and verifies. The bundle
/// returned on failure is partial; its `failure` field names the stage.
pub fn run_pipeline(
    config: RunConfig,
    base_dir: &Path,
    opts: &RunOptions,
) -> std::result::Result<ResultBundle, (ResultBundle, Error)> {
    let mut p = match Pipeline::new(config, base_dir, opts) {
        Ok(p) => p,
        Err(e) => {
            let provenance = Provenance {
                config_hash: String::new(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                seed: opts.seed.unwrap_or(0),
                stages: Vec::new(),
            };
            return Err((ResultBundle::empty(provenance), e));
        }
    };
    let stages = p.planned_stages();
    match p.run_stages(&stages) {
        Ok(()) => Ok(p.into_bundle()),
        Err(e) => Err((p.into_bundle(), e)),
    }
}

pub(crate) fn bundle_json(bundle: &ResultBundle) -> String {
    to_json(bundle)
}
