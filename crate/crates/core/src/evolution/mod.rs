//! Galerkin-truncated time integration.

mod params;
mod rhs;
mod stepper;

pub use params::MuskatParams;
pub use rhs::{Model, Nonlinearity, RhsEval};
pub use stepper::{phi1, step, EvolutionState, Scheme, StepperSpec, RK4_STABILITY};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagnostics::{record, DiagnosticsRow};
use crate::dn::DnError;
use crate::norms::Trajectory;
use crate::spectral::{SpectralError, SpectralField};

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error(transparent)]
    Dn(#[from] DnError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("step to t={t} rejected: L2 norm grew by {growth:e} (relative)")]
    StepRejected { t: f64, growth: f64 },
    #[error("dt={dt} exceeds the explicit stability limit {limit}")]
    UnstableTimeStep { dt: f64, limit: f64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl EvolutionError {
    /// True for failures of the nonlinear solver regime (as opposed to bad input).
    pub fn is_regime_failure(&self) -> bool {
        match self {
            EvolutionError::Dn(e) => e.is_regime_failure(),
            EvolutionError::StepRejected { .. } => true,
            _ => false,
        }
    }
}

/// Length and output cadence of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSpec {
    pub t_final: f64,
    /// Record a row every this many steps (the final time is always recorded).
    pub save_every: usize,
    /// Keep the recorded fields in the trajectory.
    pub store_states: bool,
    /// Sobolev index for the `Hs` column.
    pub s_norm: f64,
    /// Fill the `energy_residual` column.
    pub energy_residual: bool,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self { t_final: 1.0, save_every: 10, store_states: false, s_norm: 4.0, energy_residual: true }
    }
}

/// Everything a run produced, including the error that stopped it early.
#[derive(Debug)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub rows: Vec<DiagnosticsRow>,
    pub final_state: EvolutionState,
    pub steps: usize,
    pub error: Option<EvolutionError>,
}

impl RunOutcome {
    pub fn completed(&self) -> bool {
        self.error.is_none()
    }
}

struct Saved {
    t: f64,
    energy: f64,
    f: SpectralField,
}

fn energy(f: &SpectralField) -> f64 {
    0.5 * f.inner(f)
}

/// Integrates from `f0` to `run.t_final`, recording a row every `run.save_every`
/// steps. `callback` sees each recorded state and row. The last step is shortened
/// so the run ends exactly at `t_final`.
///
/// With `run.energy_residual` set, row `n > 0` carries `ΔE/Δt − ⟨rhs(f_m), f_m⟩`,
/// `E = ½‖f‖²` and `f_m` the average of the two rows' states: the discrete energy
/// balance at the midpoint. It costs one extra right-hand side per row. Row 0 carries 0.
pub fn run<F>(f0: &SpectralField, model: &Model<'_>, spec: &StepperSpec, run: &RunSpec, mut callback: F) -> RunOutcome
where
    F: FnMut(&EvolutionState, &DiagnosticsRow),
{
    let mut f = f0.clone();
    model.truncate(&mut f);
    let mut state = EvolutionState::new(0.0, f, model);
    let mut outcome = RunOutcome { trajectory: Trajectory::empty(), rows: Vec::new(), final_state: state.clone(), steps: 0, error: None };
    if !(spec.dt > 0.0) || !(run.t_final >= 0.0) || run.save_every == 0 {
        outcome.error = Some(EvolutionError::InvalidParams(format!(
            "need dt > 0, t_final ≥ 0 and save_every ≥ 1 (dt={}, t_final={}, save_every={})",
            spec.dt, run.t_final, run.save_every
        )));
        return outcome;
    }
    let mut eval = match model.rhs(&state.f) {
        Ok(e) => e,
        Err(e) => {
            outcome.error = Some(e);
            return outcome;
        }
    };
    let mut last: Option<Saved> = None;
    let mut emit = |state: &EvolutionState, eval: &RhsEval, outcome: &mut RunOutcome, last: &mut Option<Saved>| -> Result<(), EvolutionError> {
        let mut row = record(state, model, eval, run.s_norm)?;
        if run.energy_residual {
            let e = energy(&state.f);
            if let Some(prev) = last.as_ref() {
                let mut mid = &prev.f + &state.f;
                mid.scale(0.5);
                let p = model.rhs(&mid)?.total.inner(&mid);
                row.energy_residual = (e - prev.energy) / (state.t - prev.t) - p;
            }
            *last = Some(Saved { t: state.t, energy: e, f: state.f.clone() });
        }
        if run.store_states {
            outcome.trajectory.push(state.t, state.f.clone()).map_err(|_| SpectralError::GridMismatch)?;
        }
        callback(state, &row);
        outcome.rows.push(row);
        Ok(())
    };
    if let Err(e) = emit(&state, &eval, &mut outcome, &mut last) {
        outcome.error = Some(e);
        return outcome;
    }
    let total_steps = ((run.t_final / spec.dt) - 1e-9).ceil().max(0.0) as usize;
    for n in 1..=total_steps {
        let dt = if n == total_steps { run.t_final - state.t } else { spec.dt };
        let next = match step(model, &state, spec, dt, Some(&eval)) {
            Ok(s) => s,
            Err(e) => {
                outcome.error = Some(e);
                break;
            }
        };
        if n == total_steps {
            // Remove the accumulated rounding of t.
            state = EvolutionState { t: run.t_final, ..next };
        } else {
            state = next;
        }
        outcome.steps = n;
        eval = match model.rhs(&state.f) {
            Ok(e) => e,
            Err(e) => {
                outcome.error = Some(e);
                break;
            }
        };
        if n % run.save_every == 0 || n == total_steps {
            if let Err(e) = emit(&state, &eval, &mut outcome, &mut last) {
                outcome.error = Some(e);
                break;
            }
        }
    }
    outcome.final_state = state;
    outcome
}
