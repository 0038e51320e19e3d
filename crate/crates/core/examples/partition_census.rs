// Sector decomposition of a model Hamiltonian into internal, external
// diagonal, isoenergetic and energetically distinct parts.

use std::path::Path;

use swrrst::algebra::hamiltonian_from_tensors;
use swrrst::io::{load_integrals, IntegralFormat};
use swrrst::partition::{to_number_polynomial, OrbitalPartition, SectorLabel};

fn main() -> swrrst::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/two_orbital.fcidump");
    let ints = load_integrals(&path, IntegralFormat::Fcidump)?;
    let h = hamiltonian_from_tensors(&ints.tensors)?;
    let part = OrbitalPartition::from_orbitals(1, &[-1.0, 1.0], None)?;

    let census = part.census(&h)?;
    for s in &census.sectors {
        println!("{:>8}  {:3} terms  |.|_2 = {:.4}", s.sector.short_name(), s.terms, s.norm);
    }
    let d = part.decompose(&h)?;
    assert_eq!(d.sum(), h);

    let poly = to_number_polynomial(d.part(SectorLabel::ExternalDiagonal), &part)?;
    println!("external diagonal part: degree-{} number polynomial", poly.degree());
    for (mask, c) in &poly.monomials {
        println!("  {c:+.6}  n-mask {mask:04b}");
    }
    Ok(())
}
