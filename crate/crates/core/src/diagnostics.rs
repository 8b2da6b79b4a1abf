//! Per-step observables and the verification experiments built on runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::taylor_coefficient;
use crate::elliptic::lyapunov_j;
use crate::evolution::{run, EvolutionError, EvolutionState, Model, RhsEval, RunSpec, StepperSpec};
use crate::norms::{hom_sobolev, lipschitz, sobolev, Trajectory};
use crate::spectral::SpectralField;

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("value {value} at t={t} is not positive; cannot take its logarithm")]
    NonPositive { t: f64, value: f64 },
    #[error("need at least 2 samples in the fit window, got {0}")]
    TooFewPoints(usize),
    #[error("times and values differ in length ({times} vs {values})")]
    LengthMismatch { times: usize, values: usize },
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error("run failed before the final time: {0}")]
    Divergent(EvolutionError),
}

/// Scalar observables at one time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub l2: f64,
    /// `Ḣ^{1/2}`
    pub h_half: f64,
    /// `Ḣ^{3/2}`
    pub h_three_half: f64,
    /// `H^s` at the run's configured index.
    pub hs: f64,
    /// `W^{1,∞}`
    pub lip: f64,
    /// `∫ H(f) G(f)f`
    pub j: f64,
    /// Minimum of the Taylor coefficient; may be negative.
    pub a_min: f64,
    pub mean: f64,
    /// Discrete energy-balance defect against the previous row (0 on the first row).
    pub energy_residual: f64,
    /// `max_x G(f)f`
    pub max_gff: f64,
}

impl DiagnosticsRow {
    pub const CSV_HEADER: &'static str = "t,L2,Hhalf,H3half,Hs,Lip,J,a_min,mean,energy_residual";

    /// The CSV columns, in header order.
    pub fn csv_values(&self) -> [f64; 10] {
        [self.t, self.l2, self.h_half, self.h_three_half, self.hs, self.lip, self.j, self.a_min, self.mean, self.energy_residual]
    }
}

/// One row from a state and the right-hand side already computed for it.
/// `G(f)f` is taken from `eval` when present, so the step's DN solve is reused.
pub fn record(state: &EvolutionState, model: &Model<'_>, eval: &RhsEval, s: f64) -> Result<DiagnosticsRow, EvolutionError> {
    let f = &state.f;
    let gff = match &eval.gff {
        Some(g) => g.clone(),
        None => model.backend().apply(f, f)?,
    };
    let a = taylor_coefficient(f, &gff);
    let max_gff = gff.to_samples().into_iter().fold(f64::NEG_INFINITY, f64::max);
    Ok(DiagnosticsRow {
        t: state.t,
        l2: f.l2_norm(),
        h_half: hom_sobolev(f, 0.5),
        h_three_half: hom_sobolev(f, 1.5),
        hs: sobolev(f, s),
        lip: lipschitz(f),
        j: lyapunov_j(f, &gff),
        a_min: a.a_min,
        mean: f.mean(),
        energy_residual: 0.0,
        max_gff,
    })
}

/// Exponential fit `value ≈ C e^{−rate·t}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub r_squared: f64,
    pub samples: usize,
}

/// Least-squares slope of `log value` over `t ∈ [window.0, window.1]`, negated.
pub fn fit_decay_rate(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<DecayFit, DiagnosticsError> {
    if times.len() != values.len() {
        return Err(DiagnosticsError::LengthMismatch { times: times.len(), values: values.len() });
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t < window.0 || t > window.1 {
            continue;
        }
        if !(v > 0.0) {
            return Err(DiagnosticsError::NonPositive { t, value: v });
        }
        xs.push(t);
        ys.push(v.ln());
    }
    let n = xs.len();
    if n < 2 {
        return Err(DiagnosticsError::TooFewPoints(n));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(DiagnosticsError::TooFewPoints(1));
    }
    // A constant series has an exactly flat logarithm; avoid reporting rounding noise.
    let slope = if ys.iter().all(|y| *y == ys[0]) { 0.0 } else { sxy / sxx };
    let r_squared = if syy <= 1e-300 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(DecayFit { rate: -slope, r_squared, samples: n })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapReport {
    /// `sup_t ‖f(t)‖_{H^s} / ‖f₀‖_{H^s}`; 0 when `f₀ = 0`.
    pub sup_ratio: f64,
    pub pass: bool,
}

/// Largest `H^s` growth along a trajectory relative to `f0_norm`.
pub fn bootstrap_monitor(traj: &Trajectory, s: f64, f0_norm: f64) -> BootstrapReport {
    let sup = traj.fields().iter().map(|f| sobolev(f, s)).fold(0.0f64, f64::max);
    let sup_ratio = if f0_norm > 0.0 { sup / f0_norm } else { 0.0 };
    BootstrapReport { sup_ratio, pass: sup_ratio <= 2.0 }
}

/// Same, from recorded rows (the `hs` column).
pub fn bootstrap_from_rows(rows: &[DiagnosticsRow]) -> BootstrapReport {
    let f0 = rows.first().map_or(0.0, |r| r.hs);
    let sup = rows.iter().map(|r| r.hs).fold(0.0f64, f64::max);
    let sup_ratio = if f0 > 0.0 { sup / f0 } else { 0.0 };
    BootstrapReport { sup_ratio, pass: sup_ratio <= 2.0 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub times: Vec<f64>,
    /// `‖f₁ − f₂‖_{H^s}` at each recorded time.
    pub distances: Vec<f64>,
    pub ratio_at_t: f64,
    pub max_ratio: f64,
    /// Initial data coincide; ratios are reported as 0.
    pub degenerate: bool,
}

/// Runs both initial data to `run.t_final` concurrently and tracks their `H^s` distance,
/// `s = run.s_norm`, relative to the initial distance.
pub fn contraction_experiment(
    f01: &SpectralField,
    f02: &SpectralField,
    model: &Model<'_>,
    spec: &StepperSpec,
    run_spec: &RunSpec,
) -> Result<ContractionReport, DiagnosticsError> {
    let rs = RunSpec { store_states: true, ..run_spec.clone() };
    let (mut a, mut b) = rayon::join(|| run(f01, model, spec, &rs, |_, _| {}), || run(f02, model, spec, &rs, |_, _| {}));
    for out in [&mut a, &mut b] {
        if let Some(e) = out.error.take() {
            return Err(DiagnosticsError::Divergent(e));
        }
    }
    let s = rs.s_norm;
    let times = a.trajectory.times().to_vec();
    let distances: Vec<f64> = a.trajectory.fields().iter().zip(b.trajectory.fields()).map(|(x, y)| sobolev(&(x - y), s)).collect();
    let d0 = distances.first().copied().unwrap_or(0.0);
    let degenerate = !(d0 > 0.0);
    let ratios: Vec<f64> = distances.iter().map(|d| if degenerate { 0.0 } else { d / d0 }).collect();
    Ok(ContractionReport {
        ratio_at_t: ratios.last().copied().unwrap_or(0.0),
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        times,
        distances,
        degenerate,
    })
}

/// Energy drop against the dissipation integral of a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissipationSplit {
    /// `½(‖f₀‖² − ‖f(T)‖²)`
    pub energy_drop: f64,
    /// `∫ (‖f‖²_{Ḣ^{1/2}} + ‖f‖²_{Ḣ^{3/2}}) dt`, trapezoidal over the rows.
    pub dissipation: f64,
    /// Measured `c` with `energy_drop = c · dissipation`.
    pub constant: f64,
}

pub fn dissipation_split(rows: &[DiagnosticsRow]) -> DissipationSplit {
    let dens = |r: &DiagnosticsRow| r.h_half * r.h_half + r.h_three_half * r.h_three_half;
    let dissipation: f64 = rows.windows(2).map(|w| 0.5 * (w[1].t - w[0].t) * (dens(&w[0]) + dens(&w[1]))).sum();
    let energy_drop = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) => 0.5 * (a.l2 * a.l2 - b.l2 * b.l2),
        _ => 0.0,
    };
    let constant = if dissipation > 0.0 { energy_drop / dissipation } else { 0.0 };
    DissipationSplit { energy_drop, dissipation, constant }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzDecay {
    pub initial: f64,
    pub last: f64,
    /// First row index after which `Lip` never increases; `None` for an empty run.
    pub monotone_from: Option<usize>,
}

impl LipschitzDecay {
    pub fn decayed(&self) -> bool {
        self.last < self.initial
    }
}

pub fn lipschitz_decay(rows: &[DiagnosticsRow]) -> LipschitzDecay {
    let lip: Vec<f64> = rows.iter().map(|r| r.lip).collect();
    let monotone_from = if lip.is_empty() {
        None
    } else {
        let mut from = lip.len() - 1;
        while from > 0 && lip[from - 1] >= lip[from] {
            from -= 1;
        }
        Some(from)
    };
    LipschitzDecay { initial: lip.first().copied().unwrap_or(0.0), last: lip.last().copied().unwrap_or(0.0), monotone_from }
}
