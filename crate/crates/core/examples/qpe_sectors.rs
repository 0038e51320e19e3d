// Phase estimation of one transformed Hamiltonian in several particle
// number sectors, against phase estimation of the exact H.

use swrrst::algebra::to_dense;
use swrrst::dynamics::{
    auto_time, exact_power_unitaries, phase_to_energy, power_evolution, qpe_run, sector_prepare,
    split_g, unitary_of, SectorSpec, TrotterPlan,
};
use swrrst::models::{build_model, ModelSpec};
use swrrst::solver::{build_g, solve_swrrst, split_h0_w, BuildOptions, Domain, H0Choice, SolverOptions};

fn main() -> swrrst::Result<()> {
    let mut spec = ModelSpec::two_orbital(0.05, 11);
    spec.spin_splitting = vec![0.15, 0.35];
    spec.active_spin_flip = 0.1;
    let model = build_model(&spec)?;
    let (h, part) = (&model.hamiltonian, &model.partition);
    let opts = SolverOptions {
        domain: Domain::Od,
        ..SolverOptions::default()
    };
    let (b, _) = solve_swrrst(h, part, &H0Choice::Diagonal, &opts)?;
    let g = build_g(h, &b, part, &BuildOptions::default())?.g;
    let plan = TrotterPlan::new(&split_g(&g, part)?, part)?;

    let (m, r) = (6, 64);
    let hm = to_dense(h, 4)?.matrix;
    let (t, floor) = auto_time(&hm);
    let exact = exact_power_unitaries(&hm, t, m);
    let mut approx = Vec::new();
    for j in 0..m as u32 {
        approx.push(unitary_of(4, |psi| power_evolution(b.op(), &plan, t, j, r, psi))?);
    }
    let energies = split_h0_w(h, part, &H0Choice::Diagonal)?.energies;
    for n_e in 1..=3 {
        let psi = sector_prepare(4, n_e, &SectorSpec::LowestH0(energies.clone()))?;
        let he = qpe_run(|j| Ok(exact[j as usize].clone()), &psi, m, None)?;
        let ha = qpe_run(|j| Ok(approx[j as usize].clone()), &psi, m, None)?;
        let (pe, pa) = (he.peak().0, ha.peak().0);
        println!(
            "n_e = {n_e}: peak {pe:2} -> E = {:+.4} | transformed peak {pa:2} | max dp = {:.1e}",
            phase_to_energy(he.phase(pe), t, floor),
            he.max_deviation(&ha)
        );
    }
    Ok(())
}
