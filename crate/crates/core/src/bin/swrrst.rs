use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use swrrst::io::{emit_report, Pipeline, ReportFormat, RunOptions, Stage};

#[derive(Parser)]
#[command(name = "swrrst", version, about = "Rank-reducing similarity transforms of fermionic Hamiltonians")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Run configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Seed for shot sampling; overrides `evolution.seed`.
    #[arg(long, global = true, value_name = "INT")]
    seed: Option<u64>,

    /// Reuse B and G persisted by an earlier run of the same config.
    #[arg(long, global = true, value_enum, default_value = "on")]
    stage_cache: Toggle,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Sector census of H.
    Decompose,
    /// Solve for B and build G.
    Solve,
    /// Jordan-Wigner map and locality census.
    Map,
    /// Spectra comparison and Trotter error scan.
    Evolve,
    /// Phase estimation per particle-number sector.
    Qpe,
    /// Recompute the residual from persisted H and B.
    Verify,
    /// All stages.
    Run,
}

fn stages(c: Command, p: &Pipeline) -> Vec<Stage> {
    match c {
        Command::Decompose => vec![Stage::Decompose],
        Command::Solve => vec![Stage::Solve],
        Command::Map => vec![Stage::Map],
        Command::Evolve => vec![Stage::Evolve],
        Command::Qpe => vec![Stage::Qpe],
        Command::Verify => vec![Stage::Verify],
        Command::Run => p.planned_stages(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Some(config) = cli.config.as_deref() else {
        eprintln!("error: --config PATH is required");
        return ExitCode::from(2);
    };
    let opts = RunOptions {
        out_dir: cli.out.clone(),
        seed: cli.seed,
        stage_cache: matches!(cli.stage_cache, Toggle::On),
    };
    let mut pipeline = match Pipeline::from_path(config, &opts) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let plan = stages(cli.command, &pipeline);
    let outcome = pipeline.run_stages(&plan);
    let out = pipeline.out_dir().to_path_buf();
    for format in [ReportFormat::Structured, ReportFormat::Tabular] {
        if let Err(e) = emit_report(pipeline.bundle(), format, &out) {
            eprintln!("error: writing report: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    }
    match outcome {
        Ok(()) => {
            let b = pipeline.bundle();
            if let Some(s) = &b.solve {
                println!(
                    "solve: {} iterations, residual {:.3e}, |B| {:.3e}",
                    s.iterations, s.final_residual, s.amplitude_norm
                );
            }
            if let Some(t) = &b.spectra {
                println!(
                    "spectra: max |eig(G) - eig(H)| {:.3e} (discarded norm {:.3e})",
                    t.max_abs_diff, t.discarded_norm
                );
            }
            if let Some(v) = &b.verify {
                println!("verify: residual reproduced to {:.1e}", v.residual_diff);
            }
            for p in &b.phases {
                println!(
                    "qpe n_e={}: peak energy {:.6} (sector ground {:.6})",
                    p.n_e, p.exact_peak_energy, p.ground_energy
                );
            }
            println!("wrote {}", out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
