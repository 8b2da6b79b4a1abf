use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{EvolutionError, Model, Nonlinearity, RhsEval};
use crate::spectral::SpectralField;

/// Time integration scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Classical explicit Runge–Kutta on the full right-hand side.
    Rk4,
    /// Exponential Euler: exact propagator for `A`, `φ₁`-weighted nonlinear term.
    #[default]
    Etd,
    /// Linearly implicit Euler in `A`, explicit in the nonlinear term.
    Imex,
}

/// RK4 is stable for `dt·max A ≤` this bound (real-axis extent of its stability region).
pub const RK4_STABILITY: f64 = 2.78;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepperSpec {
    pub scheme: Scheme,
    pub dt: f64,
    pub nonlinearity: Nonlinearity,
    /// Relative `L²` growth that rejects a step; `None` disables the guard.
    pub lyapunov_guard: Option<f64>,
}

impl Default for StepperSpec {
    fn default() -> Self {
        Self { scheme: Scheme::Etd, dt: 1e-3, nonlinearity: Nonlinearity::Full, lyapunov_guard: Some(1e-10) }
    }
}

/// Interface and time.
#[derive(Clone, Debug)]
pub struct EvolutionState {
    pub t: f64,
    pub f: SpectralField,
    /// Support inside the Galerkin band.
    pub in_vr: bool,
}

impl EvolutionState {
    pub fn new(t: f64, f: SpectralField, model: &Model<'_>) -> Self {
        let in_vr = f.in_band(model.cutoff());
        Self { t, f, in_vr }
    }
}

/// `φ₁(z) = (e^z − 1)/z`, by series near 0.
pub fn phi1(z: f64) -> f64 {
    if z.abs() < 0.1 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 2..20 {
            term *= z / n as f64;
            sum += term;
        }
        sum
    } else {
        z.exp_m1() / z
    }
}

fn check_rk4(model: &Model<'_>, dt: f64) -> Result<(), EvolutionError> {
    let limit = RK4_STABILITY / model.max_linear_symbol();
    if dt > limit {
        return Err(EvolutionError::UnstableTimeStep { dt, limit });
    }
    Ok(())
}

fn combine(model: &Model<'_>, f: &SpectralField, dt: f64, k: &SpectralField) -> SpectralField {
    let mut out = f.clone();
    out.axpy(dt, k);
    model.truncate(&mut out);
    out
}

/// Advances one step of size `dt`. `eval` must be the right-hand side at `state.f`
/// when supplied (it is reused instead of recomputed).
pub fn step(model: &Model<'_>, state: &EvolutionState, spec: &StepperSpec, dt: f64, eval: Option<&RhsEval>) -> Result<EvolutionState, EvolutionError> {
    if !(dt > 0.0) {
        return Err(EvolutionError::InvalidParams(format!("dt must be positive, got {dt}")));
    }
    let owned;
    let e0 = match eval {
        Some(e) => e,
        None => {
            owned = model.rhs(&state.f)?;
            &owned
        }
    };
    let f = &state.f;
    let mut next = match spec.scheme {
        Scheme::Etd | Scheme::Imex => {
            let symbols = model.linear_symbols();
            let mut out = f.clone();
            for ((c, n), a) in out.coeffs_mut().iter_mut().zip(e0.nonlinear.coeffs()).zip(symbols) {
                *c = match spec.scheme {
                    Scheme::Etd => {
                        let z = -a * dt;
                        *c * z.exp() + n * (dt * phi1(z))
                    }
                    _ => (*c + n * dt) / (1.0 + dt * a),
                };
            }
            out
        }
        Scheme::Rk4 => {
            check_rk4(model, dt)?;
            let k1 = &e0.total;
            let k2 = model.rhs(&combine(model, f, dt / 2.0, k1))?.total;
            let k3 = model.rhs(&combine(model, f, dt / 2.0, &k2))?.total;
            let k4 = model.rhs(&combine(model, f, dt, &k3))?.total;
            let mut out = f.clone();
            out.axpy(dt / 6.0, k1);
            out.axpy(dt / 3.0, &k2);
            out.axpy(dt / 3.0, &k3);
            out.axpy(dt / 6.0, &k4);
            out
        }
    };
    model.truncate(&mut next);
    // The mean is invariant: every term of the right-hand side is flux-free.
    next.coeffs_mut()[0] = Complex64::new(f.coeffs()[0].re, 0.0);
    if let Some(tol) = spec.lyapunov_guard {
        let before = f.l2_norm();
        let after = next.l2_norm();
        if after > before * (1.0 + tol) {
            return Err(EvolutionError::StepRejected { t: state.t + dt, growth: after / before - 1.0 });
        }
    }
    Ok(EvolutionState { t: state.t + dt, in_vr: next.in_band(model.cutoff()), f: next })
}
