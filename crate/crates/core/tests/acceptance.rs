// Acceptance checks, one line per criterion. Exits non-zero if any fails.

mod common;

use std::path::{Path, PathBuf};
use std::time::Instant;

use common::*;
use swrrst::algebra::{to_dense, FermionOperator, TermKey};
use swrrst::io::{emit_report, run_pipeline, Pipeline, ReportFormat, RunConfig, RunOptions, Stage};
use swrrst::linalg::expm_hermitian;
use swrrst::partition::{to_number_polynomial, OrbitalPartition, SectorLabel};
use swrrst::qubit::{locality_report, schedule_number_exponential};
use swrrst::solver::{
    build_g, check_noncommutation, perturbative_b, solve_swrrst, split_h0_w, BuildOptions, Domain, H0Choice,
    SolverOptions,
};

type Outcome = (bool, String);

fn dense(op: &FermionOperator, n: usize) -> M {
    to_dense(op, n).unwrap().matrix
}

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data")
}

fn spectrum_deviation(a: &FermionOperator, b: &FermionOperator, n: usize) -> f64 {
    let (ea, eb) = (sorted_eigenvalues(&oracle_dense(a, n)), sorted_eigenvalues(&oracle_dense(b, n)));
    ea.iter().zip(&eb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn converged_opts() -> SolverOptions {
    SolverOptions {
        rank: 8,
        body_rank: 4,
        intermediate_rank: 4,
        ..SolverOptions::default()
    }
}

fn algebra_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2024);
    let mut worst = 0.0f64;
    let cases = 240;
    for i in 0..cases {
        let n = 1 + i % 6;
        let a = random_operator(&mut r, n, 6, 2);
        let b = random_operator(&mut r, n, 6, 2);
        let (da, db) = (oracle_dense(&a, n), oracle_dense(&b, n));
        worst = worst
            .max(max_diff(&dense(&a, n), &da))
            .max(max_diff(&dense(&(&a + &b), n), &(&da + &db)))
            .max(max_diff(&dense(&a.multiply(&b).unwrap(), n), &(&da * &db)))
            .max(max_diff(&dense(&a.commutator(&b).unwrap(), n), &(&da * &db - &db * &da)))
            .max(max_diff(&dense(&a.adjoint(), n), &da.adjoint()));
    }
    let n = 6;
    let id = M::identity(1 << n, 1 << n);
    let zero = M::zeros(1 << n, 1 << n);
    let mut car = 0.0f64;
    for p in 0..n {
        for q in 0..n {
            let ops = [
                (FermionOperator::creation(p), FermionOperator::creation(q), false),
                (FermionOperator::annihilation(p), FermionOperator::annihilation(q), false),
                (FermionOperator::annihilation(p), FermionOperator::creation(q), p == q),
            ];
            for (x, y, delta) in ops {
                let anti = &x.multiply(&y).unwrap() + &y.multiply(&x).unwrap();
                let want = if delta { &id } else { &zero };
                car = car.max(max_diff(&dense(&anti, n), want));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst <= 1e-10 && car <= 1e-12 && secs < 60.0,
        format!("{cases} random operators, homomorphism error {worst:.1e}; anticommutators {car:.1e}; {secs:.1}s"),
    )
}

fn projector_completeness() -> Outcome {
    use rand::Rng;
    let mut r = rng(99);
    let (mut reassembled, mut round_trips) = (0, 0);
    let cases = 60;
    for _ in 0..cases {
        let n = r.random_range(1..=4usize);
        let k = r.random_range(0..=n);
        let energies: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let part = OrbitalPartition::from_orbitals(k, &energies, None).unwrap();
        let h = random_hermitian(&mut r, part.n_modes(), 14, 2);
        let d = part.decompose(&h).unwrap();
        let same = d.sum() == h
            && h.terms().all(|(key, c)| d.part(part.classify(key).unwrap()).coefficient(key) == *c);
        reassembled += same as usize;
        let diag = &d.diagonal + &d.internal.filter(TermKey::is_diagonal);
        round_trips += (to_number_polynomial(&diag, &part).unwrap().to_operator() == diag) as usize;
    }
    (
        reassembled == cases && round_trips == cases,
        format!("{reassembled}/{cases} reassembled term for term, {round_trips}/{cases} number-polynomial round trips"),
    )
}

fn solve_eod() -> Outcome {
    let start = Instant::now();
    let model = toy_two_orbital();
    let (h, part) = (&model.hamiltonian, &model.partition);
    let (b, report) = solve_swrrst(h, part, &H0Choice::Diagonal, &SolverOptions::default()).unwrap();
    let built = build_g(h, &b, part, &BuildOptions::default()).unwrap();
    let dev = spectrum_deviation(h, &built.g, 4);
    let bound = 10.0 * built.diagnostics.discarded_norm;
    let (bc, rc) = solve_swrrst(h, part, &H0Choice::Diagonal, &converged_opts()).unwrap();
    let gc = build_g(h, &bc, part, &BuildOptions::default()).unwrap();
    let dev_c = spectrum_deviation(h, &gc.g, 4);
    let secs = start.elapsed().as_secs_f64();
    let ok = report.converged
        && report.final_residual <= 1e-10
        && report.iterations <= 100
        && dev <= bound
        && rc.final_residual <= 1e-10
        && dev_c <= 1e-8
        && secs < 10.0;
    (
        ok,
        format!(
            "l=2: {} sweeps, residual {:.1e}, eigenvalue shift {dev:.1e} <= {bound:.1e}; converged: shift {dev_c:.1e}; {secs:.2}s",
            report.iterations, report.final_residual
        ),
    )
}

fn perturbative_orders() -> Outcome {
    let model = toy_three_two();
    let (h, part) = (&model.hamiltonian, &model.partition);
    let b0 = perturbative_b(h, part, 0, Domain::Eod, &H0Choice::Diagonal).unwrap();
    let b1 = perturbative_b(h, part, 1, Domain::Eod, &H0Choice::Diagonal).unwrap();
    let b2 = perturbative_b(h, part, 2, Domain::Eod, &H0Choice::Diagonal).unwrap();
    let rank3 = b2.op().keys().filter(|k| k.body_rank() == 3).count();

    let split = split_h0_w(h, part, &H0Choice::Diagonal).unwrap();
    let choice = H0Choice::Energies(split.energies.clone());
    let lambdas = [0.01, 0.02, 0.04, 0.07, 0.1];
    let pts: Vec<(f64, f64)> = lambdas
        .iter()
        .map(|&l| {
            let hl = &split.h0 + &split.w.scale_real(l);
            let (b, _) = solve_swrrst(&hl, part, &choice, &SolverOptions::default()).unwrap();
            (l.ln(), b.norm().ln())
        })
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let ok = b0.is_zero() && b1.max_body_rank() <= 2 && rank3 > 0 && (slope - 1.0).abs() <= 0.05;
    (
        ok,
        format!(
            "B0 terms {}, B1 max rank {}, B2 rank-3 terms {rank3}, |B| ~ lambda^{slope:.4}",
            b0.op().len(),
            b1.max_body_rank()
        ),
    )
}

fn locality() -> Outcome {
    let model = toy_three_one();
    let (h, part) = (&model.hamiltonian, &model.partition);
    let (b, report) = solve_swrrst(h, part, &H0Choice::Diagonal, &SolverOptions::default()).unwrap();
    let g = build_g(h, &b, part, &BuildOptions::default()).unwrap().g;
    let r = locality_report(&g, part).unwrap();
    let per: Vec<String> = r
        .sectors
        .iter()
        .map(|s| format!("{} {}/{}", s.sector.short_name(), s.violations, s.census.strings))
        .collect();
    (
        report.converged && r.violations() == 0 && r.local_form,
        format!("violations per sector (violations/strings): {}", per.join(", ")),
    )
}

fn external_schedule() -> Outcome {
    let model = toy_split();
    let (h, part) = (&model.hamiltonian, &model.partition);
    let opts = SolverOptions {
        domain: Domain::Od,
        ..SolverOptions::default()
    };
    let (b, _) = solve_swrrst(h, part, &H0Choice::Diagonal, &opts).unwrap();
    let g = build_g(h, &b, part, &BuildOptions::default()).unwrap().g;
    let external = part.project(&g, SectorLabel::ExternalDiagonal).unwrap();
    let Ok(poly) = to_number_polynomial(&external, part) else {
        return (false, "external part is not a number polynomial".into());
    };
    let dm = dense(&external, 4);
    let times = [-2.5, -0.3, 0.1, 0.8, 1.7, 4.0, 12.0];
    let worst = times
        .iter()
        .map(|&t| max_diff(&schedule_number_exponential(&poly, t).unitary(4).unwrap(), &expm_hermitian(&dm, t)))
        .fold(0.0, f64::max);
    (
        worst <= 1e-12,
        format!("{} rotations, worst error over {} times {worst:.1e}", schedule_number_exponential(&poly, 1.0).len(), times.len()),
    )
}

fn trotter_qpe() -> Outcome {
    let start = Instant::now();
    let cfg = RunConfig::load(&data().join("split_od.toml")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        out_dir: Some(dir.path().to_path_buf()),
        seed: None,
        stage_cache: false,
    };
    let mut p = Pipeline::new(cfg, &data(), &opts).unwrap();
    if let Err(e) = p.run_stages(&[Stage::Solve, Stage::Evolve, Stage::Qpe]) {
        return (false, format!("pipeline failed: {e}"));
    }
    let b = p.bundle();
    let mut ok = !b.phases.is_empty();
    let mut dev = 0.0f64;
    for ph in &b.phases {
        let Some(sw) = &ph.swrrst else {
            return (false, "no transformed read-out".into());
        };
        let (pe, ps) = (ph.exact.peaks(0.01), sw.peaks(0.01));
        let same = pe.len() == ps.len() && pe.iter().zip(&ps).all(|(a, b)| a.0.abs_diff(b.0) <= 1);
        ok &= same;
        dev = dev.max(ph.exact.max_deviation(sw));
    }
    let errs: Vec<(usize, f64)> = b.trotter.iter().map(|t| (t.r, t.error)).collect();
    let ratios: Vec<f64> = errs.windows(2).map(|w| w[0].1 / w[1].1).collect();
    ok &= ratios.len() >= 2 && ratios.iter().all(|r| (1.5..=2.5).contains(r));
    let secs = start.elapsed().as_secs_f64();
    ok &= dev <= 1e-3 && secs < 120.0;
    (
        ok,
        format!(
            "{} sectors, peaks agree, max probability deviation {dev:.1e}; error ratios {:?}; {secs:.1}s",
            b.phases.len(),
            ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()
        ),
    )
}

fn fock_universality() -> Outcome {
    let model = toy_two_orbital();
    let (h, part) = (&model.hamiltonian, &model.partition);
    let (b, _) = solve_swrrst(h, part, &H0Choice::Diagonal, &converged_opts()).unwrap();
    let g = build_g(h, &b, part, &BuildOptions::default()).unwrap().g;
    let (dh, dg) = (oracle_dense(h, 4), oracle_dense(&g, 4));
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for n_e in [1, 2, 3] {
        let eh = sorted_eigenvalues(&sector_block(&dh, 4, n_e))[0];
        let eg = sorted_eigenvalues(&sector_block(&dg, 4, n_e))[0];
        worst = worst.max((eh - eg).abs());
        rows.push(format!("n_e={n_e} {eh:.8}"));
    }
    (worst <= 1e-8, format!("{}; max deviation {worst:.1e}", rows.join(", ")))
}

fn noncommutation() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, model) in [("2/1", toy_two_orbital()), ("3/1", toy_three_one()), ("3/2", toy_three_two())] {
        let (h, part) = (&model.hamiltonian, &model.partition);
        let eod = part.project(h, SectorLabel::ExternalEnergeticallyDistinct).unwrap();
        let (b, _) = solve_swrrst(h, part, &H0Choice::Diagonal, &SolverOptions::default()).unwrap();
        let nc = check_noncommutation(h, &b).unwrap();
        ok &= eod.is_empty() || nc.nonzero;
        lines.push(format!("{name}: {:.2e} > {:.1e}", nc.norm, nc.threshold));
    }
    (ok, lines.join(", "))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (name, cfg) in [("two_orbital", "two_orbital.toml"), ("split_od", "split_od.toml")] {
        for run in 0..2 {
            let config = RunConfig::load(&data().join(cfg)).unwrap();
            let out = dir.path().join(format!("{name}{run}"));
            let opts = RunOptions {
                out_dir: Some(out.clone()),
                seed: Some(7),
                stage_cache: false,
            };
            let bundle = match run_pipeline(config, &data(), &opts) {
                Ok(b) => b,
                Err((_, e)) => return (false, format!("{name}: {e}")),
            };
            emit_report(&bundle, ReportFormat::Structured, &out).unwrap();
            outputs.push(std::fs::read(out.join("bundle.json")).unwrap());
        }
    }
    let ok = outputs[0] == outputs[1] && outputs[2] == outputs[3];
    (ok, format!("two configs rerun, bundle sizes {} and {} bytes", outputs[0].len(), outputs[2].len()))
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 10] = [
        ("operator algebra oracle", algebra_oracle),
        ("projector completeness", projector_completeness),
        ("eod solve and spectrum", solve_eod),
        ("perturbative orders", perturbative_orders),
        ("qubit locality", locality),
        ("number-polynomial schedule", external_schedule),
        ("trotter and phase estimation", trotter_qpe),
        ("fock-space universality", fock_universality),
        ("non-commutation", noncommutation),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let (ok, detail) = check();
        failed += !ok as usize;
        println!("criterion {:2} {}: {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
