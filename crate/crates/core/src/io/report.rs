use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::pipeline::{bundle_json, ResultBundle};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    /// `bundle.json`.
    Structured,
    /// Tab-separated plot data.
    Tabular,
}

/// Writes the bundle into `dir`; returns the files written.
pub fn emit_report(bundle: &ResultBundle, format: ReportFormat, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let files = match format {
        ReportFormat::Structured => vec![("bundle.json", bundle_json(bundle))],
        ReportFormat::Tabular => tables(bundle),
    };
    let mut written = Vec::new();
    for (name, contents) in files {
        let path = dir.join(name);
        std::fs::write(&path, contents)?;
        written.push(path);
    }
    Ok(written)
}

fn tables(b: &ResultBundle) -> Vec<(&'static str, String)> {
    let mut residuals = String::from("iteration\tresidual\n");
    if let Some(s) = &b.solve {
        for (i, r) in s.residual_norm_history.iter().enumerate() {
            let _ = writeln!(residuals, "{i}\t{r:.16e}");
        }
    }
    let mut trotter = String::from("r\terror\n");
    for p in &b.trotter {
        let _ = writeln!(trotter, "{}\t{:.16e}", p.r, p.error);
    }
    let mut spectra = String::from("n_e\tindex\teig_h\teig_g\tdiff\n");
    if let Some(t) = &b.spectra {
        for r in &t.rows {
            let _ = writeln!(
                spectra,
                "{}\t{}\t{:.16e}\t{:.16e}\t{:.16e}",
                r.n_e,
                r.index,
                r.h,
                r.g,
                (r.h - r.g).abs()
            );
        }
    }
    let mut hist = String::from("n_e\toutcome\tphase\tp_exact\tp_swrrst\n");
    for s in &b.phases {
        for (k, p) in s.exact.probabilities.iter().enumerate() {
            let other = s
                .swrrst
                .as_ref()
                .map_or_else(|| "nan".to_string(), |h| format!("{:.16e}", h.probabilities[k]));
            let _ = writeln!(
                hist,
                "{}\t{k}\t{:.16e}\t{p:.16e}\t{other}",
                s.n_e,
                s.exact.phase(k)
            );
        }
    }
    vec![
        ("residuals.tsv", residuals),
        ("trotter.tsv", trotter),
        ("spectra.tsv", spectra),
        ("histogram.tsv", hist),
    ]
}
