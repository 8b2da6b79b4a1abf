use serde::{Deserialize, Serialize};

use crate::spectral::TorusGrid;

/// Physical constants and the Galerkin cutoff.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MuskatParams {
    /// Permeability `κ`.
    pub kappa: f64,
    /// Viscosity `μ`.
    pub mu: f64,
    /// Density `ρ`.
    pub rho: f64,
    pub gravity: f64,
    /// Surface tension coefficient; 0 selects the gravity-only model.
    pub surface_tension: f64,
    /// Galerkin cutoff `R`; `None` uses the dealiasing radius `(2/3)(N/2)(2π/L)`.
    pub galerkin_r: Option<f64>,
}

impl Default for MuskatParams {
    fn default() -> Self {
        Self { kappa: 1.0, mu: 1.0, rho: 1.0, gravity: 1.0, surface_tension: 1.0, galerkin_r: None }
    }
}

impl MuskatParams {
    /// Violations as `(field, message)` pairs.
    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        for (name, v) in [("kappa", self.kappa), ("mu", self.mu), ("rho", self.rho), ("gravity", self.gravity)] {
            if !(v > 0.0 && v.is_finite()) {
                out.push((name, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.surface_tension >= 0.0 && self.surface_tension.is_finite()) {
            out.push(("surface_tension", format!("must be ≥ 0 and finite, got {}", self.surface_tension)));
        }
        if let Some(r) = self.galerkin_r {
            if !(r > 0.0 && r.is_finite()) {
                out.push(("galerkin_r", format!("must be positive, got {r}")));
            }
        }
        out
    }

    /// `κ/μ`
    pub fn mobility(&self) -> f64 {
        self.kappa / self.mu
    }

    /// `ρ𝔤`
    pub fn weight(&self) -> f64 {
        self.rho * self.gravity
    }

    /// Symbol of the linear operator `A = (κ/μ)|∇|(ρ𝔤 + 𝔰|∇|²)`.
    pub fn linear_symbol(&self, r: f64) -> f64 {
        self.mobility() * r * (self.weight() + self.surface_tension * r * r)
    }

    pub fn cutoff(&self, grid: &TorusGrid) -> f64 {
        self.galerkin_r.unwrap_or_else(|| grid.dealias_radius())
    }
}
