// Runs every stage of a configuration file and writes the reports.
//
// `cargo run --example pipeline -- path/to/config.toml [out-dir]`

use std::path::PathBuf;

use swrrst::io::{emit_report, Pipeline, ReportFormat, RunOptions};

fn main() -> swrrst::Result<()> {
    let mut args = std::env::args().skip(1);
    let config = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/data/split_od.toml")
    });
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("swrrst-pipeline"));
    run(config, out)
}

fn run(config: PathBuf, out: PathBuf) -> swrrst::Result<()> {
    let opts = RunOptions {
        out_dir: Some(out.clone()),
        seed: None,
        stage_cache: false,
    };
    let mut p = Pipeline::from_path(&config, &opts)?;
    let stages = p.planned_stages();
    p.run_stages(&stages)?;
    let bundle = p.bundle();
    if let Some(s) = &bundle.spectra {
        println!("spectra: max |dE| {:.2e}", s.max_abs_diff);
    }
    for point in &bundle.trotter {
        println!("trotter r = {:3}: error {:.3e}", point.r, point.error);
    }
    for ph in &bundle.phases {
        println!("n_e = {}: peak energy {:+.4}, ground {:+.4}", ph.n_e, ph.exact_peak_energy, ph.ground_energy);
    }
    for f in [ReportFormat::Structured, ReportFormat::Tabular] {
        emit_report(bundle, f, &out)?;
    }
    println!("reports in {}", out.display());
    Ok(())
}
