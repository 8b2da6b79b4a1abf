use crate::curvature::taylor_coefficient;
use crate::spectral::{SpectralField, TorusGrid};

use super::EllipticSolution;

/// Hydraulic pressure `Q = v − (f + z)` on the strip, for a solve with `g = f`.
#[derive(Clone, Debug)]
pub struct PressureField {
    /// Samples per level (`z_j = −D + j h`).
    pub q: Vec<Vec<f64>>,
    /// `−∂_z Q = 1 − ∂_z v` samples per level.
    pub neg_dz_q: Vec<Vec<f64>>,
    pub min_q: f64,
    pub min_neg_dz_q: f64,
    /// Largest `|Q|` on the surface level.
    pub surface_defect: f64,
    /// Largest gap between `−∂_z Q` at the surface and the Taylor coefficient from `G(f)f`.
    pub taylor_gap: f64,
    /// Set when `min Q < −10·tol`.
    pub negative_pressure: bool,
}

pub fn hydraulic_pressure(sol: &EllipticSolution, f: &SpectralField, tol: f64) -> PressureField {
    let grid: &TorusGrid = f.grid();
    let fs = f.to_samples();
    let dz = sol.dz();
    let nz = sol.options.nz;
    let mut q = Vec::with_capacity(nz + 1);
    let mut neg = Vec::with_capacity(nz + 1);
    for j in 0..=nz {
        let z = sol.z(j);
        let v = sol.v[j].to_samples();
        q.push(v.iter().zip(&fs).map(|(vi, fi)| vi - fi - z).collect::<Vec<_>>());
        let vz = grid.inverse_real(&dz[j]);
        neg.push(vz.iter().map(|d| 1.0 - d).collect::<Vec<_>>());
    }
    let min_q = q.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let min_neg_dz_q = neg.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let surface_defect = q[nz].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let a = taylor_coefficient(f, &sol.dn_trace);
    let taylor_gap = a.samples.iter().zip(&neg[nz]).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    PressureField { q, neg_dz_q: neg, min_q, min_neg_dz_q, surface_defect, taylor_gap, negative_pressure: min_q < -10.0 * tol }
}
