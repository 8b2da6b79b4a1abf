use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsRow;
use crate::evolution::MuskatParams;
use crate::spectral::{SpectralField, TorusGrid};

use super::config::{GridConfig, RunConfig};
use super::IoError;

/// How snapshot coefficients are ordered.
pub const SNAPSHOT_ORDERING: &str =
    "ascending integer wavevector k from -N/2+1 to N/2 in each dimension, lexicographic with the first dimension slowest";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_file(path: &Path, text: &str) -> Result<(), IoError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(io_err(dir))?;
        }
    }
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(io_err(path))
}

/// The diagnostics table as CSV text, every number in 17 significant digits.
pub fn diagnostics_csv(rows: &[DiagnosticsRow]) -> String {
    let mut out = String::with_capacity(64 + rows.len() * 240);
    out.push_str(DiagnosticsRow::CSV_HEADER);
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.csv_values().iter().map(|v| format!("{v:.16e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_diagnostics(path: &Path, rows: &[DiagnosticsRow]) -> Result<(), IoError> {
    write_file(path, &diagnostics_csv(rows))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnapshotMeta {
    pub t: f64,
    pub grid: GridConfig,
    pub params: MuskatParams,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Snapshot {
    pub meta: SnapshotMeta,
    /// `[re, im]` pairs in [`SNAPSHOT_ORDERING`].
    pub coeffs: Vec<[f64; 2]>,
}

/// Internal storage indices in snapshot order.
fn snapshot_indices(grid: &TorusGrid) -> Vec<usize> {
    let n = grid.n() as i64;
    let ks: Vec<i64> = (-n / 2 + 1..=n / 2).collect();
    let mut out = Vec::with_capacity(grid.len());
    if grid.dim() == 1 {
        for &k in &ks {
            out.push(grid.index_of([k, 0]).expect("k within the grid"));
        }
    } else {
        for &k0 in &ks {
            for &k1 in &ks {
                out.push(grid.index_of([k0, k1]).expect("k within the grid"));
            }
        }
    }
    out
}

impl Snapshot {
    pub fn from_field(t: f64, f: &SpectralField, params: &MuskatParams) -> Self {
        let grid = f.grid();
        let coeffs = snapshot_indices(grid).into_iter().map(|i| [f.coeffs()[i].re, f.coeffs()[i].im]).collect();
        Self { meta: SnapshotMeta { t, grid: GridConfig { dim: grid.dim(), n: grid.n(), period: grid.period() }, params: params.clone() }, coeffs }
    }

    pub fn to_field(&self) -> Result<SpectralField, IoError> {
        let grid = self.meta.grid.build()?;
        if self.coeffs.len() != grid.len() {
            return Err(IoError::Parse(format!("snapshot has {} coefficients, grid needs {}", self.coeffs.len(), grid.len())));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
        for (c, i) in self.coeffs.iter().zip(snapshot_indices(&grid)) {
            coeffs[i] = Complex64::new(c[0], c[1]);
        }
        SpectralField::from_coeffs(&grid, coeffs).map_err(|e| IoError::Parse(e.to_string()))
    }
}

pub fn write_snapshot(path: &Path, snap: &Snapshot) -> Result<(), IoError> {
    let text = serde_json::to_string(snap).map_err(|e| IoError::Parse(e.to_string()))?;
    write_file(path, &text)
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot, IoError> {
    serde_json::from_str(&read_file(path)?).map_err(|e| IoError::Parse(format!("{}: {e}", path.display())))
}

/// Run record written next to the outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub config: RunConfig,
    pub snapshot_ordering: String,
    pub files: Vec<String>,
    /// Free-form outcome summary of the command.
    pub outcome: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &str, config: &RunConfig) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            snapshot_ordering: SNAPSHOT_ORDERING.to_string(),
            files: Vec::new(),
            outcome: serde_json::Value::Null,
        }
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, IoError> {
        let path = dir.join("manifest.json");
        let text = serde_json::to_string_pretty(self).map_err(|e| IoError::Parse(e.to_string()))?;
        write_file(&path, &text)?;
        Ok(path)
    }
}

/// Appends rows to an open CSV file as they arrive.
pub struct CsvSink {
    path: PathBuf,
    file: std::io::BufWriter<fs::File>,
}

impl CsvSink {
    pub fn create(path: &Path) -> Result<Self, IoError> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir).map_err(io_err(dir))?;
            }
        }
        let file = fs::File::create(path).map_err(io_err(path))?;
        let mut sink = Self { path: path.to_path_buf(), file: std::io::BufWriter::new(file) };
        writeln!(sink.file, "{}", DiagnosticsRow::CSV_HEADER).map_err(io_err(&sink.path))?;
        Ok(sink)
    }

    pub fn push(&mut self, row: &DiagnosticsRow) -> Result<(), IoError> {
        let cells: Vec<String> = row.csv_values().iter().map(|v| format!("{v:.16e}")).collect();
        writeln!(self.file, "{}", cells.join(",")).map_err(io_err(&self.path))
    }

    pub fn finish(mut self) -> Result<(), IoError> {
        self.file.flush().map_err(io_err(&self.path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_run_gives_a_header_only_csv() {
        assert_eq!(diagnostics_csv(&[]), format!("{}\n", DiagnosticsRow::CSV_HEADER));
    }

    #[test]
    fn csv_keeps_seventeen_significant_digits() {
        let row = DiagnosticsRow { t: 0.1, l2: 1.0 / 3.0, h_half: 0.0, h_three_half: 0.0, hs: 0.0, lip: 0.0, j: 0.0, a_min: 1.0, mean: 0.0, energy_residual: 0.0, max_gff: 0.0 };
        let text = diagnostics_csv(&[row.clone(), row]);
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        let cells: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells[1], 1.0 / 3.0);
        assert_eq!(cells[0], 0.1);
    }

    #[test]
    fn snapshot_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        for dim in [1, 2] {
            let grid = TorusGrid::new(dim, 16, 3.7).unwrap();
            let f = SpectralField::from_fn(&grid, |x| (x[0] * 1.7).sin() * 0.1 + (x[1] + 0.3).cos().powi(3) / 7.0);
            let path = dir.path().join(format!("snap{dim}.json"));
            write_snapshot(&path, &Snapshot::from_field(0.25, &f, &MuskatParams::default())).unwrap();
            let back = read_snapshot(&path).unwrap();
            assert_eq!(back.meta.t, 0.25);
            let g = back.to_field().unwrap();
            for (a, b) in f.coeffs().iter().zip(g.coeffs()) {
                assert_eq!(a.re.to_bits(), b.re.to_bits());
                assert_eq!(a.im.to_bits(), b.im.to_bits());
            }
        }
    }

    #[test]
    fn snapshot_order_starts_at_the_most_negative_mode() {
        let grid = TorusGrid::periodic(1, 8).unwrap();
        let f = SpectralField::from_fn(&grid, |x| (3.0 * x[0]).sin());
        let snap = Snapshot::from_field(0.0, &f, &MuskatParams::default());
        // k = -3 is the first entry; sin 3x has coefficient i/2 there.
        assert!((snap.coeffs[0][1] - 0.5).abs() < 1e-15);
        assert!((snap.coeffs[6][1] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn missing_directory_is_an_io_error_with_path() {
        let err = read_file(Path::new("/nonexistent/dir/x.json")).unwrap_err();
        assert!(matches!(err, IoError::Io { .. }));
        assert!(err.to_string().contains("/nonexistent/dir/x.json"));
    }
}
