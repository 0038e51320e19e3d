// Solves for the generator on a two-orbital model and compares the
// spectrum of the transformed Hamiltonian with the original.

use swrrst::algebra::to_dense;
use swrrst::linalg::eigenvalues;
use swrrst::models::{build_model, ModelSpec};
use swrrst::partition::SectorLabel;
use swrrst::solver::{build_g, check_noncommutation, solve_swrrst, BuildOptions, H0Choice, SolverOptions};

fn main() -> swrrst::Result<()> {
    let model = build_model(&ModelSpec::two_orbital(0.05, 11))?;
    let (h, part) = (&model.hamiltonian, &model.partition);

    for rank in [2, 8] {
        let opts = SolverOptions {
            rank,
            body_rank: if rank > 2 { 4 } else { 2 },
            intermediate_rank: 4,
            ..SolverOptions::default()
        };
        let (b, report) = solve_swrrst(h, part, &H0Choice::Diagonal, &opts)?;
        let built = build_g(h, &b, part, &BuildOptions::default())?;
        let eod = part.project(&built.g, SectorLabel::ExternalEnergeticallyDistinct)?;

        let eh = eigenvalues(&to_dense(h, 4)?.matrix);
        let eg = eigenvalues(&to_dense(&built.g, 4)?.matrix);
        let dev = eh.iter().zip(&eg).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        println!(
            "l = {rank}: {} iterations, residual {:.1e}, |B| {:.3e}, eod terms left {}, \
             max eigenvalue shift {dev:.1e} (discarded {:.1e})",
            report.iterations,
            report.final_residual,
            report.amplitude_norm,
            eod.len(),
            built.diagnostics.discarded_norm,
        );
        let nc = check_noncommutation(h, &b)?;
        println!("        |[B, H]| = {:.3e} (threshold {:.1e})", nc.norm, nc.threshold);
    }
    Ok(())
}
