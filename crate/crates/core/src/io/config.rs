use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::dn::DnOptions;
use crate::elliptic::StripOptions;
use crate::evolution::{MuskatParams, RunSpec, StepperSpec};
use crate::spectral::TorusGrid;

use super::presets::Preset;
use super::IoError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub dim: usize,
    pub n: usize,
    pub period: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { dim: 1, n: 64, period: 2.0 * std::f64::consts::PI }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<TorusGrid, IoError> {
        TorusGrid::new(self.dim, self.n, self.period).map_err(|e| IoError::Invalid(vec![Violation::new("grid", e.to_string())]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    #[default]
    FixedPoint,
    Elliptic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct DnConfig {
    pub backend: BackendKind,
    pub fixed_point: DnOptions,
    pub elliptic: StripOptions,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitConfig {
    pub preset: Preset,
    pub amplitude: f64,
    pub seed: u64,
    /// Wavenumber of `single_mode`.
    pub mode: u32,
    /// Largest wavenumber of `random_band`.
    pub band: u32,
    /// Standard deviation of `gaussian_bump`.
    pub width: f64,
}

impl Default for InitConfig {
    fn default() -> Self {
        Self { preset: Preset::SingleMode, amplitude: 0.01, seed: 0, mode: 1, band: 8, width: 0.5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Steps between recorded rows.
    pub cadence: usize,
    /// Write a spectral snapshot with every recorded row.
    pub snapshots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: PathBuf::from("out"), cadence: 10, snapshots: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    #[default]
    Evolve,
    DnCheck,
    OracleCompare,
    LyapunovScan,
    Contraction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub t_final: f64,
    /// Sobolev index of the `Hs` column.
    pub s_norm: f64,
    pub energy_residual: bool,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self { t_final: 1.0, s_norm: 4.0, energy_residual: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    /// Amplitudes for `lyapunov-scan`.
    pub amplitudes: Vec<f64>,
    /// Random fields per amplitude.
    pub samples: usize,
    /// Size of the `contraction` perturbation (coefficient of `cos 2x`).
    pub perturbation: f64,
    /// Wavenumber of the second argument in `oracle-compare`.
    pub oracle_mode: u32,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { amplitudes: vec![0.01, 0.02, 0.05, 0.1, 0.2], samples: 10, perturbation: 1e-4, oracle_mode: 2 }
    }
}

/// Everything a command needs. All sections have defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub params: MuskatParams,
    pub stepper: StepperSpec,
    pub dn: DnConfig,
    pub init: InitConfig,
    pub output: OutputConfig,
    pub time: TimeConfig,
    pub scan: ScanConfig,
    pub experiment: Experiment,
}

/// One failed constraint, with the dotted path of the offending field.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn positive(out: &mut Vec<Violation>, path: &str, v: f64) {
    if !(v > 0.0 && v.is_finite()) {
        out.push(Violation::new(path, format!("must be positive and finite, got {v}")));
    }
}

impl RunConfig {
    /// All violated constraints; empty when the config is usable.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let g = &self.grid;
        if !(1..=2).contains(&g.dim) {
            out.push(Violation::new("grid.dim", format!("must be 1 or 2, got {}", g.dim)));
        }
        if g.n < 8 || !g.n.is_power_of_two() {
            out.push(Violation::new("grid.n", format!("must be a power of two ≥ 8, got {}", g.n)));
        }
        positive(&mut out, "grid.period", g.period);
        for (field, msg) in self.params.violations() {
            out.push(Violation::new(format!("params.{field}"), msg));
        }
        if let (Some(r), true) = (self.params.galerkin_r, g.period > 0.0) {
            let dealias = g.n as f64 / 3.0 * 2.0 * std::f64::consts::PI / g.period;
            if r > dealias * (1.0 + 1e-12) {
                out.push(Violation::new("params.galerkin_r", format!("must not exceed the dealiasing radius {dealias}, got {r}")));
            }
        }
        positive(&mut out, "stepper.dt", self.stepper.dt);
        if let Some(guard) = self.stepper.lyapunov_guard {
            if !(guard >= 0.0) {
                out.push(Violation::new("stepper.lyapunov_guard", format!("must be ≥ 0, got {guard}")));
            }
        }
        let fp = &self.dn.fixed_point;
        if fp.levels < 10 {
            out.push(Violation::new("dn.fixed_point.levels", format!("must be ≥ 10, got {}", fp.levels)));
        }
        if !(fp.ratio >= 1.0 && fp.ratio.is_finite()) {
            out.push(Violation::new("dn.fixed_point.ratio", format!("must be ≥ 1, got {}", fp.ratio)));
        }
        positive(&mut out, "dn.fixed_point.z_max", fp.z_max);
        positive(&mut out, "dn.fixed_point.tol", fp.tol);
        if fp.max_iter == 0 {
            out.push(Violation::new("dn.fixed_point.max_iter", "must be ≥ 1"));
        }
        if !(fp.contraction_guard > 0.0 && fp.contraction_guard <= 1.0) {
            out.push(Violation::new("dn.fixed_point.contraction_guard", format!("must lie in (0, 1], got {}", fp.contraction_guard)));
        }
        if !(fp.jacobian_floor > 0.0 && fp.jacobian_floor < 1.0) {
            out.push(Violation::new("dn.fixed_point.jacobian_floor", format!("must lie in (0, 1), got {}", fp.jacobian_floor)));
        }
        if g.period > 0.0 && fp.z_max > 0.0 {
            let k_min = 2.0 * std::f64::consts::PI / g.period;
            if fp.z_max < 20.0 / k_min {
                out.push(Violation::new("dn.fixed_point.z_max", format!("must be ≥ 20/k_min = {}, got {}", 20.0 / k_min, fp.z_max)));
            }
        }
        let el = &self.dn.elliptic;
        if el.nz < 100 {
            out.push(Violation::new("dn.elliptic.nz", format!("must be ≥ 100, got {}", el.nz)));
        }
        positive(&mut out, "dn.elliptic.depth", el.depth);
        positive(&mut out, "dn.elliptic.tol", el.tol);
        if el.max_iter == 0 {
            out.push(Violation::new("dn.elliptic.max_iter", "must be ≥ 1"));
        }
        positive(&mut out, "init.amplitude", self.init.amplitude);
        if self.init.mode == 0 {
            out.push(Violation::new("init.mode", "must be ≥ 1"));
        }
        if self.init.band == 0 {
            out.push(Violation::new("init.band", "must be ≥ 1"));
        }
        positive(&mut out, "init.width", self.init.width);
        if self.output.cadence == 0 {
            out.push(Violation::new("output.cadence", "must be ≥ 1"));
        }
        if !(self.time.t_final >= 0.0 && self.time.t_final.is_finite()) {
            out.push(Violation::new("time.t_final", format!("must be ≥ 0 and finite, got {}", self.time.t_final)));
        }
        if !self.time.s_norm.is_finite() {
            out.push(Violation::new("time.s_norm", "must be finite"));
        }
        for (i, &a) in self.scan.amplitudes.iter().enumerate() {
            positive(&mut out, &format!("scan.amplitudes[{i}]"), a);
        }
        if self.scan.samples == 0 {
            out.push(Violation::new("scan.samples", "must be ≥ 1"));
        }
        positive(&mut out, "scan.perturbation", self.scan.perturbation);
        if self.scan.oracle_mode == 0 {
            out.push(Violation::new("scan.oracle_mode", "must be ≥ 1"));
        }
        out
    }

    pub fn validate(&self) -> Result<(), IoError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(IoError::Invalid(v))
        }
    }

    pub fn run_spec(&self, store_states: bool) -> RunSpec {
        RunSpec {
            t_final: self.time.t_final,
            save_every: self.output.cadence,
            store_states,
            s_norm: self.time.s_norm,
            energy_residual: self.time.energy_residual,
        }
    }
}

/// Parses and validates a JSON config. Unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<RunConfig, IoError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}
