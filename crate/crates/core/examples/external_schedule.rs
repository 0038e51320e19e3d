// With the isoenergetic degeneracy lifted, the external part of G is a
// polynomial in number operators and its exponential is a short list of
// Z rotations.

use swrrst::algebra::to_dense;
use swrrst::linalg::{expm_hermitian, max_abs_diff};
use swrrst::models::{build_model, ModelSpec};
use swrrst::partition::{to_number_polynomial, SectorLabel};
use swrrst::qubit::schedule_number_exponential;
use swrrst::solver::{build_g, solve_swrrst, BuildOptions, Domain, H0Choice, SolverOptions};

fn main() -> swrrst::Result<()> {
    let mut spec = ModelSpec::two_orbital(0.05, 11);
    spec.spin_splitting = vec![0.15, 0.35];
    let model = build_model(&spec)?;
    let (h, part) = (&model.hamiltonian, &model.partition);

    let opts = SolverOptions {
        domain: Domain::Od,
        ..SolverOptions::default()
    };
    let (b, _) = solve_swrrst(h, part, &H0Choice::Diagonal, &opts)?;
    let g = build_g(h, &b, part, &BuildOptions::default())?.g;
    let external = part.project(&g, SectorLabel::ExternalDiagonal)?;
    let poly = to_number_polynomial(&external, part)?;

    let t = 0.8;
    let schedule = schedule_number_exponential(&poly, t);
    print!("{}", schedule.to_text());
    let want = expm_hermitian(&to_dense(&external, 4)?.matrix, t);
    println!("vs dense exponential: {:.1e}", max_abs_diff(&schedule.unitary(4)?, &want));
    Ok(())
}
