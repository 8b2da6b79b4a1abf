//! Configuration, initial-data presets, persistence and the experiment commands.

mod commands;
mod config;
mod output;
mod presets;

pub use commands::{
    build_backend, contraction, dn_check, lyapunov_scan, norms_table, oracle_compare, run_evolution, Backend, CommandOutcome,
};
pub use config::{
    parse_config, BackendKind, DnConfig, Experiment, GridConfig, InitConfig, OutputConfig, RunConfig, ScanConfig, TimeConfig, Violation,
};
pub use output::{
    diagnostics_csv, read_file, read_snapshot, write_diagnostics, write_file, write_snapshot, CsvSink, Manifest, Snapshot, SnapshotMeta,
    SNAPSHOT_ORDERING,
};
pub use presets::{cosine, epsilon0_preset, make_initial, Preset};

use std::path::PathBuf;

use thiserror::Error;

use crate::diagnostics::DiagnosticsError;
use crate::dn::DnError;
use crate::elliptic::EllipticError;
use crate::evolution::EvolutionError;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
    #[error("unknown preset {0:?} (expected single_mode, two_mode, random_band or gaussian_bump)")]
    UnknownPreset(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Dn(#[from] DnError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Diagnostics(#[from] DiagnosticsError),
}

impl IoError {
    /// Process exit code: 2 invalid input, 3 solver regime failure, 4 I/O, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            IoError::Parse(_) | IoError::Invalid(_) | IoError::UnknownPreset(_) => 2,
            IoError::Io { .. } => 4,
            IoError::Dn(e) if e.is_regime_failure() => 3,
            IoError::Evolution(e) if e.is_regime_failure() => 3,
            IoError::Evolution(EvolutionError::InvalidParams(_)) | IoError::Evolution(EvolutionError::UnstableTimeStep { .. }) => 2,
            IoError::Diagnostics(DiagnosticsError::Evolution(e) | DiagnosticsError::Divergent(e)) if e.is_regime_failure() => 3,
            _ => 1,
        }
    }
}
