//! Independent Dirichlet–Neumann evaluation through the boundary-straightened
//! elliptic problem, plus hydraulic pressure and the Lyapunov integral.
//!
//! Writing `v(x, z) = φ(x, z + f(x))` on the strip `−D ≤ z ≤ 0`, harmonicity of `φ` becomes
//!
//! ```text
//! Δ_x v − (Δf) ∂_z v − 2∇f·∇_x ∂_z v + (1 + |∇f|²) ∂_z² v = 0,   v(·, 0) = g,
//! ```
//!
//! discretized spectrally in `x` and by centred differences in `z`. The strip
//! is closed at `z = −D` with the flat far-field condition `∂_z v = |∇|v`.

mod pressure;
mod solver;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use pressure::{hydraulic_pressure, PressureField};

use crate::curvature::mean_curvature;
use crate::dn::{DnBackend, DnError};
use crate::spectral::{gradient, SpectralError, SpectralField, TorusGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("linear solve did not converge in {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("invalid strip: {0}")]
    InvalidStrip(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Uniform vertical discretization of `[−D, 0]` with `nz` intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StripOptions {
    pub nz: usize,
    pub depth: f64,
    /// Relative residual target of the Krylov solve.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for StripOptions {
    fn default() -> Self {
        Self { nz: 400, depth: 8.0, tol: 1e-12, max_iter: 200 }
    }
}

impl StripOptions {
    pub fn validate(&self) -> Result<(), EllipticError> {
        if self.nz < 100 {
            return Err(EllipticError::InvalidStrip(format!("nz must be ≥ 100, got {}", self.nz)));
        }
        if !(self.depth > 0.0) {
            return Err(EllipticError::InvalidStrip(format!("depth must be positive, got {}", self.depth)));
        }
        if !(self.tol > 0.0) {
            return Err(EllipticError::InvalidStrip(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.depth / self.nz as f64
    }

    pub fn refined(&self) -> Self {
        Self { nz: 2 * self.nz, ..self.clone() }
    }
}

/// Pointwise straightening matrix `A = [[I, −∇f], [−∇fᵀ, 1 + |∇f|²]]`.
#[derive(Clone, Debug)]
pub struct StraightenedCoefficients {
    dim: usize,
    grad: Vec<[f64; 2]>,
}

impl StraightenedCoefficients {
    pub fn len(&self) -> usize {
        self.grad.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grad.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(d+1) × (d+1)` matrix at grid point `i`, embedded in a 3×3 array.
    pub fn matrix(&self, i: usize) -> [[f64; 3]; 3] {
        let p = self.grad[i];
        let d = self.dim;
        let mut a = [[0.0; 3]; 3];
        for r in 0..d {
            a[r][r] = 1.0;
            a[r][d] = -p[r];
            a[d][r] = -p[r];
        }
        a[d][d] = 1.0 + p[0] * p[0] + p[1] * p[1];
        a
    }

    /// Extreme eigenvalues at point `i` in closed form. With `t = |∇f|²` they are
    /// `(2 + t ± √(t² + 4t))/2`, reciprocal to each other; the rest equal 1.
    pub fn eigen_bounds(&self, i: usize) -> (f64, f64) {
        let p = self.grad[i];
        let t = p[0] * p[0] + p[1] * p[1];
        let root = (t * t + 4.0 * t).sqrt();
        let hi = (2.0 + t + root) / 2.0;
        (1.0 / hi, hi)
    }

    pub fn determinant(&self, i: usize) -> f64 {
        let a = self.matrix(i);
        if self.dim == 1 {
            a[0][0] * a[1][1] - a[0][1] * a[1][0]
        } else {
            a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
        }
    }
}

pub fn straighten_coefficients(f: &SpectralField) -> StraightenedCoefficients {
    let grads: Vec<Vec<f64>> = gradient(f).iter().map(SpectralField::to_samples).collect();
    let grad = (0..f.grid().len())
        .map(|i| {
            let mut p = [0.0; 2];
            for (a, g) in grads.iter().enumerate() {
                p[a] = g[i];
            }
            p
        })
        .collect();
    StraightenedCoefficients { dim: f.grid().dim(), grad }
}

/// Discrete harmonic extension on the strip and its Neumann trace.
#[derive(Clone, Debug)]
pub struct EllipticSolution {
    pub options: StripOptions,
    /// Coefficients per level `z_j = −D + j h`, `j = 0..=nz`.
    pub v: Vec<SpectralField>,
    /// `G(f)g`
    pub dn_trace: SpectralField,
    pub iterations: usize,
    /// Final relative residual of the linear solve.
    pub residual: f64,
}

impl EllipticSolution {
    pub fn z(&self, j: usize) -> f64 {
        -self.options.depth + j as f64 * self.options.spacing()
    }

    pub fn top(&self) -> &SpectralField {
        self.v.last().expect("nonempty strip")
    }

    /// `∂_z v` coefficients per level: ghost condition at the bottom,
    /// centred differences inside, one-sided fourth order at the top.
    pub fn dz(&self) -> Vec<Vec<Complex64>> {
        let h = self.options.spacing();
        let nz = self.options.nz;
        let grid = self.v[0].grid();
        let c = |j: usize| self.v[j].coeffs();
        (0..=nz)
            .map(|j| {
                if j == 0 {
                    c(0).iter().zip(grid.radial()).map(|(v, r)| v * *r).collect()
                } else if j == nz {
                    top_derivative(&[c(nz), c(nz - 1), c(nz - 2), c(nz - 3), c(nz - 4)], h)
                } else {
                    c(j + 1).iter().zip(c(j - 1)).map(|(a, b)| (a - b) / (2.0 * h)).collect()
                }
            })
            .collect()
    }
}

/// `(25v₀ − 48v₋₁ + 36v₋₂ − 16v₋₃ + 3v₋₄)/(12h)`.
fn top_derivative(levels: &[&[Complex64]; 5], h: f64) -> Vec<Complex64> {
    const W: [f64; 5] = [25.0, -48.0, 36.0, -16.0, 3.0];
    (0..levels[0].len()).map(|k| levels.iter().zip(W).map(|(l, w)| l[k] * w).sum::<Complex64>() / (12.0 * h)).collect()
}

/// Elliptic Dirichlet–Neumann backend.
#[derive(Clone, Debug)]
pub struct EllipticSolver {
    grid: TorusGrid,
    opts: StripOptions,
}

/// Interface data entering the straightened operator, on the padded grid.
pub(crate) struct Interface {
    pub(crate) f: SpectralField,
    pub(crate) flat: bool,
    /// `∇f` samples per axis.
    pub(crate) grad: Vec<Vec<f64>>,
    /// `Δf` samples.
    pub(crate) lap: Vec<f64>,
    /// `|∇f|²` samples.
    pub(crate) slope2: Vec<f64>,
}

impl Interface {
    fn new(f: &SpectralField) -> Self {
        let grid = f.grid();
        let pad = |c: &SpectralField| {
            let mut s = Vec::new();
            grid.to_padded_samples(c.coeffs(), &mut s);
            s
        };
        let grad: Vec<Vec<f64>> = gradient(f).iter().map(pad).collect();
        let lap = pad(&crate::spectral::apply_radial(f, |r| -r * r));
        let slope2 = (0..lap.len()).map(|i| grad.iter().map(|g| g[i] * g[i]).sum()).collect();
        let flat = f.coeffs()[1..].iter().all(|c| *c == Complex64::new(0.0, 0.0));
        Self { f: f.clone(), flat, grad, lap, slope2 }
    }
}

impl EllipticSolver {
    pub fn new(grid: &TorusGrid, opts: StripOptions) -> Result<Self, EllipticError> {
        opts.validate()?;
        Ok(Self { grid: grid.clone(), opts })
    }

    pub fn options(&self) -> &StripOptions {
        &self.opts
    }

    pub fn solve(&self, f: &SpectralField, g: &SpectralField) -> Result<EllipticSolution, EllipticError> {
        f.check_grid(g)?;
        if f.grid() != &self.grid {
            return Err(SpectralError::GridMismatch.into());
        }
        let iface = Interface::new(f);
        self.solve_with(&iface, g)
    }

    fn solve_with(&self, iface: &Interface, g: &SpectralField) -> Result<EllipticSolution, EllipticError> {
        let op = solver::StripOperator::new(&self.grid, &self.opts, iface);
        let (levels, iterations, residual) = op.solve(g)?;
        let v: Vec<SpectralField> = levels.into_iter().map(|c| SpectralField::from_coeffs(&self.grid, c)).collect::<Result<_, _>>()?;
        let mut sol = EllipticSolution {
            options: self.opts.clone(),
            v,
            dn_trace: SpectralField::zeros(&self.grid),
            iterations,
            residual,
        };
        sol.dn_trace = dn_trace(&sol, &iface.f);
        Ok(sol)
    }
}

/// `G(f)g = (1 + |∇f|²) ∂_z v − ∇f·∇g` at `z = 0`.
pub fn dn_trace(sol: &EllipticSolution, f: &SpectralField) -> SpectralField {
    let grid = f.grid();
    let nz = sol.options.nz;
    let c = |j: usize| sol.v[j].coeffs();
    let vz = top_derivative(&[c(nz), c(nz - 1), c(nz - 2), c(nz - 3), c(nz - 4)], sol.options.spacing());
    let iface = Interface::new(f);
    if iface.flat {
        return SpectralField::from_coeffs(grid, vz).expect("grid-sized");
    }
    let mut vz_s = Vec::new();
    grid.to_padded_samples(&vz, &mut vz_s);
    let grad_g: Vec<Vec<f64>> = gradient(sol.top())
        .iter()
        .map(|c| {
            let mut s = Vec::new();
            grid.to_padded_samples(c.coeffs(), &mut s);
            s
        })
        .collect();
    let prod: Vec<f64> = (0..vz_s.len())
        .map(|i| {
            let cross: f64 = iface.grad.iter().zip(&grad_g).map(|(a, b)| a[i] * b[i]).sum();
            (1.0 + iface.slope2[i]) * vz_s[i] - cross
        })
        .collect();
    SpectralField::from_coeffs(grid, grid.coeffs_from_padded(&prod)).expect("grid-sized")
}

/// Solves the straightened problem with Dirichlet data `g`.
pub fn solve_straightened(f: &SpectralField, g: &SpectralField, opts: &StripOptions) -> Result<EllipticSolution, EllipticError> {
    EllipticSolver::new(f.grid(), opts.clone())?.solve(f, g)
}

impl DnBackend for EllipticSolver {
    fn apply_many(&self, f: &SpectralField, data: &[&SpectralField]) -> Result<Vec<SpectralField>, DnError> {
        if f.grid() != &self.grid {
            return Err(SpectralError::GridMismatch.into());
        }
        let iface = Interface::new(f);
        data.par_iter().map(|g| Ok(self.solve_with(&iface, g)?.dn_trace)).collect()
    }

    fn name(&self) -> &'static str {
        "elliptic"
    }
}

/// `J(f) = ∫ H(f) G(f)f dx` by spectral quadrature.
pub fn lyapunov_j(f: &SpectralField, gff: &SpectralField) -> f64 {
    mean_curvature(f).total.inner(gff)
}

/// Leading-order part of `J`: `L^d Σ |ξ|³ |f̂|²`.
pub fn lyapunov_j_quadratic(f: &SpectralField) -> f64 {
    let s: f64 = f.coeffs().iter().zip(f.grid().radial()).map(|(c, r)| r.powi(3) * c.norm_sqr()).sum();
    s * f.grid().volume()
}
