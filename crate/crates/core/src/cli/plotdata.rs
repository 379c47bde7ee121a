use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{CliError, RunConfig};
use crate::output::{fmt_f64, to_json};
use crate::tauberian::AsymptoticReport;

fn sanitize(s: &str) -> String {
    let mut out = String::new();
    for ch in s.chars() {
        match ch {
            'a'..='z' | 'A'..='Z' | '0'..='9' | '.' | '-' | '_' => out.push(ch),
            ':' | ',' | '/' | ' ' => out.push('_'),
            _ => {}
        }
    }
    out.trim_matches('_').to_string()
}

/// `<command>_<fixture>_<hash>`: the fixture names the input, the hash is
/// the first 16 hex digits of SHA-256 over the resolved config (without `out`).
pub fn output_base(cfg: &RunConfig) -> String {
    let fixture = if let Some(s) = &cfg.signal {
        let p = Path::new(s.trim());
        if s.trim().to_ascii_lowercase().ends_with(".csv") || p.is_file() {
            p.file_stem().map(|x| sanitize(&x.to_string_lossy())).unwrap_or_else(|| "csv".into())
        } else {
            sanitize(s)
        }
    } else if let Some(tf) = &cfg.tf {
        format!("tf_{}", tf.file_stem().map(|x| sanitize(&x.to_string_lossy())).unwrap_or_default())
    } else if let Some(c) = &cfg.c {
        let c = c.trim();
        if c.starts_with("c:") {
            sanitize(c)
        } else {
            sanitize(&format!("c:{c}"))
        }
    } else {
        "none".into()
    };
    let json = to_json(cfg).expect("config serialises");
    let digest = Sha256::digest(json.as_bytes());
    let hash: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("{}_{fixture}_{hash}", cfg.command.as_str())
}

pub(super) fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub(super) fn write_file(path: &Path, body: &[u8]) -> Result<(), CliError> {
    let mut f = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(body).map_err(|e| io_err(path, e))
}

pub(super) fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// One `x,re,im` CSV per traced frequency (`<base>_xi<k>.csv`) and a
/// summary `<base>.csv` with one row per J-table entry.
pub fn emit_tauber_plotdata(report: &AsymptoticReport, dir: &Path, base: &str) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for (k, tr) in report.traces.iter().enumerate() {
        let path = dir.join(format!("{base}_xi{k}.csv"));
        write_csv(
            &path,
            &["x", "re", "im"],
            tr.x.iter().zip(&tr.g).map(|(x, g)| vec![fmt_f64(*x), fmt_f64(g.re), fmt_f64(g.im)]),
        )?;
        files.push(path);
    }
    let path = dir.join(format!("{base}.csv"));
    write_csv(
        &path,
        &["xi", "j_re", "j_im", "converged", "spread", "psi_beta_re", "psi_beta_im"],
        report.j_table.iter().map(|e| {
            vec![
                fmt_f64(e.xi),
                fmt_f64(e.estimate.value.re),
                fmt_f64(e.estimate.value.im),
                e.estimate.converged.to_string(),
                fmt_f64(e.estimate.spread),
                fmt_f64(e.psi_beta.re),
                fmt_f64(e.psi_beta.im),
            ]
        }),
    )?;
    files.push(path);
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{SignalSource, Window};
    use crate::slowvary::ComparisonFunction;
    use crate::tauberian::{run_pipeline, PipelineConfig};

    #[test]
    fn plotdata_file_counts() {
        let dir = std::env::temp_dir().join(format!("taubex-plot-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let mut report = run_pipeline(
            &SignalSource::exp_step(0.5),
            &Window::gaussian(),
            &ComparisonFunction::exponential(0.5),
            &PipelineConfig::default(),
        )
        .unwrap();
        assert_eq!(emit_tauber_plotdata(&report, &dir, "a").unwrap().len(), 8);
        report.traces.clear();
        report.j_table.clear();
        let only = emit_tauber_plotdata(&report, &dir, "b").unwrap();
        assert_eq!(only, vec![dir.join("b.csv")]);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn sanitised_names() {
        assert_eq!(sanitize("exp_step:beta=0.5"), "exp_step_beta0.5");
        assert_eq!(sanitize("c:beta=0.3,L=power:rho=0.2"), "c_beta0.3_Lpower_rho0.2");
    }
}
