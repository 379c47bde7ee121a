use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

use super::{StftError, TimeFrequencyMatrix};
use crate::output::fmt_f64;
use crate::signal::{Grid, QuadratureSpec, SignalError};

/// JSON sidecar written next to a TF CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfMetadata {
    pub x_grid: Grid,
    pub xi_grid: Grid,
    pub eta: f64,
    pub window: String,
    pub signal: String,
    pub quadrature: QuadratureSpec,
}

fn io_err(e: impl std::fmt::Display) -> StftError {
    StftError::Signal(SignalError::Io(e.to_string()))
}

/// Writes `x,xi,re,im` rows, `x` outer.
pub fn write_tf_csv_to<W: Write>(matrix: &TimeFrequencyMatrix, out: W) -> Result<(), StftError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "xi", "re", "im"]).map_err(io_err)?;
    let (nx, nxi) = matrix.dims();
    for i in 0..nx {
        let x = fmt_f64(matrix.x_grid().node(i));
        for j in 0..nxi {
            let v = matrix.get(i, j);
            w.write_record([x.as_str(), &fmt_f64(matrix.xi_grid().node(j)), &fmt_f64(v.re), &fmt_f64(v.im)])
                .map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

pub fn write_tf_csv(matrix: &TimeFrequencyMatrix, path: impl AsRef<Path>) -> Result<(), StftError> {
    let file = std::fs::File::create(path.as_ref()).map_err(|e| io_err(format!("{}: {e}", path.as_ref().display())))?;
    write_tf_csv_to(matrix, std::io::BufWriter::new(file))
}

/// Reads a TF CSV. Grids are rebuilt from the first and last node of each
/// axis; `eta` comes from the caller (the sidecar records it).
pub fn read_tf_csv_from<R: Read>(input: R, eta: f64) -> Result<TimeFrequencyMatrix, StftError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header: Vec<String> = rdr.headers().map_err(io_err)?.iter().map(str::to_string).collect();
    if header != ["x", "xi", "re", "im"] {
        return Err(SignalError::Csv { row: 1, message: format!("expected header x,xi,re,im, got {}", header.join(",")) }
            .into());
    }
    let mut xs: Vec<f64> = Vec::new();
    let mut xis: Vec<f64> = Vec::new();
    let mut values = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 2;
        let rec = rec.map_err(|e| SignalError::Csv { row, message: e.to_string() })?;
        let num = |j: usize| -> Result<f64, StftError> {
            rec.get(j)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| SignalError::Csv { row, message: format!("bad number in column {}", j + 1) }.into())
        };
        let (x, xi) = (num(0)?, num(1)?);
        if xs.last() != Some(&x) {
            xs.push(x);
        }
        if xs.len() == 1 {
            xis.push(xi);
        }
        values.push(Complex64::new(num(2)?, num(3)?));
    }
    let grid = |nodes: &[f64]| -> Result<Grid, StftError> {
        if nodes.len() < 2 {
            return Err(SignalError::InvalidGrid("TF CSV axis has fewer than 2 nodes".into()).into());
        }
        let n = nodes.len();
        Ok(Grid::new(nodes[0], (nodes[n - 1] - nodes[0]) / (n - 1) as f64, n)?)
    };
    TimeFrequencyMatrix::new(grid(&xs)?, grid(&xis)?, eta, values)
}

pub fn read_tf_csv(path: impl AsRef<Path>, eta: f64) -> Result<TimeFrequencyMatrix, StftError> {
    let file = std::fs::File::open(path.as_ref()).map_err(|e| io_err(format!("{}: {e}", path.as_ref().display())))?;
    read_tf_csv_from(file, eta)
}
