use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{EvolutionError, MuskatParams};
use crate::curvature::mean_curvature;
use crate::dn::DnBackend;
use crate::spectral::{abs_nabla, apply_radial, SpectralField, TorusGrid};

/// Which parts of the nonlinearity are kept.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    #[default]
    Full,
    /// `∂_t f = −Af`
    LinearOnly,
    /// Dirichlet–Neumann operator replaced by `|∇|`; curvature stays nonlinear.
    NoRemainder,
}

/// Right-hand side at one state, split as `total = linear + nonlinear`.
#[derive(Clone, Debug)]
pub struct RhsEval {
    /// `−Af`
    pub linear: SpectralField,
    pub nonlinear: SpectralField,
    pub total: SpectralField,
    /// `G(f)f`, when the full model computed it.
    pub gff: Option<SpectralField>,
    /// `H(f)`, when computed.
    pub curvature: Option<SpectralField>,
}

/// The truncated evolution operator for one grid, parameter set and backend.
pub struct Model<'a> {
    grid: TorusGrid,
    params: MuskatParams,
    backend: &'a dyn DnBackend,
    nonlinearity: Nonlinearity,
    cutoff: f64,
}

impl<'a> Model<'a> {
    pub fn new(grid: &TorusGrid, params: MuskatParams, backend: &'a dyn DnBackend, nonlinearity: Nonlinearity) -> Result<Self, EvolutionError> {
        if let Some((field, msg)) = params.violations().into_iter().next() {
            return Err(EvolutionError::InvalidParams(format!("{field}: {msg}")));
        }
        let cutoff = params.cutoff(grid);
        Ok(Self { grid: grid.clone(), params, backend, nonlinearity, cutoff })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn params(&self) -> &MuskatParams {
        &self.params
    }

    pub fn backend(&self) -> &dyn DnBackend {
        self.backend
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        self.nonlinearity
    }

    /// Galerkin cutoff `R`.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Symbol of `A` at every mode.
    pub fn linear_symbols(&self) -> Vec<f64> {
        self.grid.radial().iter().map(|&r| self.params.linear_symbol(r)).collect()
    }

    /// Largest `A` symbol inside the Galerkin band.
    pub fn max_linear_symbol(&self) -> f64 {
        self.params.linear_symbol(self.cutoff)
    }

    /// `S_R` in place: zero every coefficient with `|ξ| > R`.
    pub fn truncate(&self, f: &mut SpectralField) {
        let cut = self.cutoff * (1.0 + 1e-12);
        let radial = self.grid.radial().to_vec();
        for (c, r) in f.coeffs_mut().iter_mut().zip(radial) {
            if r > cut {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    fn truncated(&self, mut f: SpectralField) -> SpectralField {
        self.truncate(&mut f);
        f.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
        f
    }

    /// `−(κ/μ) S_R[G(S_R f)(ρ𝔤 S_R f + 𝔰 H(S_R f))]` with its linear/nonlinear split.
    pub fn rhs(&self, f: &SpectralField) -> Result<RhsEval, EvolutionError> {
        if f.grid() != &self.grid {
            return Err(crate::spectral::SpectralError::GridMismatch.into());
        }
        let mut fr = f.clone();
        self.truncate(&mut fr);
        let p = &self.params;
        let mob = p.mobility();
        let linear = apply_radial(&fr, |r| -p.linear_symbol(r));
        match self.nonlinearity {
            Nonlinearity::LinearOnly => {
                let nonlinear = SpectralField::zeros(&self.grid);
                let total = linear.clone();
                Ok(RhsEval { linear, nonlinear, total, gff: None, curvature: None })
            }
            Nonlinearity::NoRemainder => {
                let curv = mean_curvature(&fr);
                let nonlinear = self.truncated(abs_nabla(&curv.nonlinear_part).scaled(-mob * p.surface_tension));
                let total = &linear + &nonlinear;
                Ok(RhsEval { linear, nonlinear, total, gff: None, curvature: Some(curv.total) })
            }
            Nonlinearity::Full => {
                let curv = mean_curvature(&fr);
                let outs = if p.surface_tension != 0.0 {
                    self.backend.apply_many(&fr, &[&fr, &curv.total])?
                } else {
                    self.backend.apply_many(&fr, &[&fr])?
                };
                let gff = outs[0].clone();
                let mut inner = gff.scaled(p.weight());
                let mut nl = &gff - &abs_nabla(&fr);
                nl.scale(p.weight());
                if p.surface_tension != 0.0 {
                    let gh = &outs[1];
                    inner.axpy(p.surface_tension, gh);
                    let rem_h = gh - &abs_nabla(&curv.total);
                    nl.axpy(p.surface_tension, &rem_h);
                    nl.axpy(p.surface_tension, &abs_nabla(&curv.nonlinear_part));
                }
                let total = self.truncated(inner.scaled(-mob));
                let nonlinear = self.truncated(nl.scaled(-mob));
                Ok(RhsEval { linear, nonlinear, total, gff: Some(gff), curvature: Some(curv.total) })
            }
        }
    }
}
