// Jordan-Wigner census of H and G: after the solve, every sector of G
// acts only where it should on the qubit register.

use swrrst::models::{build_model, ModelSpec};
use swrrst::qubit::locality_report;
use swrrst::solver::{build_g, solve_swrrst, BuildOptions, H0Choice, SolverOptions};

fn main() -> swrrst::Result<()> {
    let mut spec = ModelSpec::two_orbital(0.05, 7);
    spec.orbital_energies = vec![-1.2, -0.6, 1.0];
    let model = build_model(&spec)?;
    let (h, part) = (&model.hamiltonian, &model.partition);

    let (b, _) = solve_swrrst(h, part, &H0Choice::Diagonal, &SolverOptions::default())?;
    let g = build_g(h, &b, part, &BuildOptions::default())?.g;

    for (name, op) in [("H", h), ("G", &g)] {
        let r = locality_report(op, part)?;
        println!("{name}: {} violations, local form: {}", r.violations(), r.local_form);
        for s in &r.sectors {
            println!(
                "  {:>8}  {:4} strings  {:4} spanning  widths {:?}",
                s.sector.short_name(),
                s.census.strings,
                s.census.spanning,
                s.census.width_histogram
            );
        }
    }
    Ok(())
}
