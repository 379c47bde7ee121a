use num_complex::Complex64;
use std::io::Read;
use std::path::Path;

use super::{Grid, SignalError, SignalSource};

const SPACING_TOL: f64 = 1e-9;

/// Reads a uniformly sampled signal from a CSV file with header `t,re,im`
/// or `t,value`.
pub fn read_signal_csv(path: impl AsRef<Path>) -> Result<SignalSource, SignalError> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| SignalError::Io(format!("{}: {e}", path.as_ref().display())))?;
    read_signal_csv_from(file)
}

/// As [`read_signal_csv`], from any reader. Row numbers in errors count the
/// header as row 1.
pub fn read_signal_csv_from<R: Read>(reader: R) -> Result<SignalSource, SignalError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| SignalError::Csv { row: 1, message: e.to_string() })?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    let complex = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["t", "re", "im"] => true,
        ["t", "value"] => false,
        _ => {
            return Err(SignalError::Csv {
                row: 1,
                message: format!("expected header t,re,im or t,value, got {}", header.join(",")),
            })
        }
    };

    let mut ts = Vec::new();
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| SignalError::Csv { row, message: e.to_string() })?;
        let field = |j: usize| -> Result<f64, SignalError> {
            let s = record.get(j).ok_or_else(|| SignalError::Csv { row, message: format!("missing column {}", j + 1) })?;
            let v: f64 = s.parse().map_err(|_| SignalError::Csv { row, message: format!("not a number: {s:?}") })?;
            if !v.is_finite() {
                return Err(SignalError::Csv { row, message: format!("non-finite value {s}") });
            }
            Ok(v)
        };
        let t = field(0)?;
        let v = if complex { Complex64::new(field(1)?, field(2)?) } else { Complex64::new(field(1)?, 0.0) };
        if let Some(&prev) = ts.last() {
            if !(t > prev) {
                return Err(SignalError::Csv { row, message: format!("t = {t} is not increasing") });
            }
        }
        if ts.len() >= 2 {
            let step0 = ts[1] - ts[0];
            let step = t - ts[ts.len() - 1];
            if (step - step0).abs() > SPACING_TOL * step0.abs() {
                return Err(SignalError::Csv {
                    row,
                    message: format!("non-uniform spacing: step {step} differs from {step0}"),
                });
            }
        }
        ts.push(t);
        values.push(v);
    }
    if ts.len() < 2 {
        return Err(SignalError::Csv { row: ts.len() + 2, message: "need at least 2 samples".into() });
    }
    let n = ts.len();
    let step = (ts[n - 1] - ts[0]) / (n - 1) as f64;
    let grid = Grid::new(ts[0], step, n)?;
    SignalSource::sampled(grid, values)
}
