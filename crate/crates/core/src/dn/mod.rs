//! Dirichlet–Neumann operator by Picard iteration on the flattened harmonic extension.
//!
//! With `𝒫 = e^{z|∇|}f`, `G(f)g = |∇|g + w(·, 0)` where `(w, v)` is the fixed point of
//!
//! ```text
//! w = ∫_{-∞}^z e^{-(z-τ)|∇|} (div Q_b − |∇|Q_a) dτ
//! v = e^{z|∇|}g − ∫_z^0 e^{(z-τ)|∇|} (w + Q_a) dτ
//! ```
//!
//! with `Q_a = ∇𝒫·∇v/(1+ℬ) − ℬ(w + |∇|v)/(1+ℬ)`, `Q_b = (|∇|v + w + Q_a)∇𝒫 − ∂_z𝒫 ∇v`
//! and `ℬ = (|∇𝒫|² − ∂_z𝒫)/(1 + ∂_z𝒫)`.

mod probe;
pub mod quadrature;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use probe::{dn_contraction_probe, ProbeResult};
pub use quadrature::{ExpQuadrature, QuadratureOrder};

use crate::elliptic::EllipticError;
use crate::spectral::{LayeredField, SpectralError, SpectralField, TorusGrid, VerticalGrid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DnError {
    #[error("flattening map degenerates: min(1 + ∂z𝒫) = {min_jacobian:.4} ≤ {floor}")]
    DegenerateJacobian { min_jacobian: f64, floor: f64 },
    #[error("Picard iteration stopped contracting at iteration {iteration} (ratio {ratio:.3})")]
    NoContraction { iteration: usize, ratio: f64 },
    #[error("Picard iteration did not reach tolerance in {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

impl DnError {
    /// Whether the failure signals data outside the small-amplitude regime.
    pub fn is_regime_failure(&self) -> bool {
        matches!(self, DnError::DegenerateJacobian { .. } | DnError::NoContraction { .. })
    }
}

/// Configuration of the fixed-point solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DnOptions {
    /// Number of vertical panels.
    pub levels: usize,
    /// Geometric growth of panel width away from `z = 0`.
    pub ratio: f64,
    pub z_max: f64,
    /// Relative residual at which the iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Residual ratio above which an iteration counts as non-contracting.
    pub contraction_guard: f64,
    /// Consecutive non-contracting iterations tolerated.
    pub guard_patience: usize,
    pub jacobian_floor: f64,
    pub quadrature: QuadratureOrder,
}

impl Default for DnOptions {
    fn default() -> Self {
        Self {
            levels: 200,
            ratio: 1.05,
            z_max: 40.0,
            tol: 1e-12,
            max_iter: 60,
            contraction_guard: 0.9,
            guard_patience: 5,
            jacobian_floor: 0.05,
            quadrature: QuadratureOrder::default(),
        }
    }
}

impl DnOptions {
    pub fn vertical(&self) -> Result<VerticalGrid, SpectralError> {
        VerticalGrid::geometric(self.levels, self.ratio, self.z_max)
    }

    /// Twice the panels with the ratio square-rooted.
    pub fn refined(&self) -> Self {
        Self { levels: 2 * self.levels, ratio: self.ratio.sqrt(), ..self.clone() }
    }
}

/// Output of a Dirichlet–Neumann solve.
#[derive(Clone, Debug)]
pub struct DnSolution {
    /// `G(f)g`
    pub g_f_g: SpectralField,
    /// `R(f; g) = G(f)g − |∇|g`
    pub remainder: SpectralField,
    pub w: LayeredField,
    pub v: LayeredField,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
}

/// Anything that can evaluate `G(f)g` for several data sharing one `f`.
pub trait DnBackend: Send + Sync {
    fn apply_many(&self, f: &SpectralField, data: &[&SpectralField]) -> Result<Vec<SpectralField>, DnError>;

    fn apply(&self, f: &SpectralField, g: &SpectralField) -> Result<SpectralField, DnError> {
        Ok(self.apply_many(f, &[g])?.remove(0))
    }

    fn name(&self) -> &'static str;
}

/// Per-level physical-space data derived from `f`, on the padded grid.
struct LevelGeometry {
    /// `∇𝒫`, one vector per axis.
    grad_p: Vec<Vec<f64>>,
    /// `∂_z𝒫`
    dz_p: Vec<f64>,
    /// `1/(1+ℬ) = (1+∂_z𝒫)/(1+|∇𝒫|²)`
    inv: Vec<f64>,
    /// `ℬ/(1+ℬ) = (|∇𝒫|²−∂_z𝒫)/(1+|∇𝒫|²)`
    frac: Vec<f64>,
}

/// Geometry of one interface, reusable across Dirichlet data.
pub struct Geometry {
    f: SpectralField,
    levels: Vec<LevelGeometry>,
    min_jacobian: f64,
    flat: bool,
}

impl Geometry {
    /// `min(1 + ∂_z𝒫)` over all levels and padded points.
    pub fn min_jacobian(&self) -> f64 {
        self.min_jacobian
    }

    pub fn interface(&self) -> &SpectralField {
        &self.f
    }
}

/// Fixed-point Dirichlet–Neumann solver for one grid and vertical discretization.
pub struct FixedPointSolver {
    grid: TorusGrid,
    vertical: VerticalGrid,
    opts: DnOptions,
    quad: ExpQuadrature,
    class_of: Vec<usize>,
    /// Modes updated by the iteration (the dealiased disc).
    active: Vec<usize>,
    /// `|∇|²` symbol with the Nyquist convention of the discrete gradient.
    grad_weight: Vec<f64>,
}

impl FixedPointSolver {
    pub fn new(grid: &TorusGrid, opts: DnOptions) -> Result<Self, DnError> {
        let vertical = opts.vertical()?;
        vertical.check_depth(grid)?;
        Self::with_vertical(grid, vertical, opts)
    }

    pub fn with_vertical(grid: &TorusGrid, vertical: VerticalGrid, opts: DnOptions) -> Result<Self, DnError> {
        let key = |i: usize| {
            let k = grid.kvec(i);
            k[0] * k[0] + k[1] * k[1]
        };
        let mut keys: Vec<i64> = (0..grid.len()).map(key).collect();
        keys.sort_unstable();
        keys.dedup();
        let class_of: Vec<usize> = (0..grid.len()).map(|i| keys.binary_search(&key(i)).expect("key present")).collect();
        let kappas: Vec<f64> = keys.iter().map(|&k2| grid.dk() * (k2 as f64).sqrt()).collect();
        let grad_weight: Vec<f64> = (0..grid.len())
            .map(|i| {
                let xi = grid.xi(i);
                (0..grid.dim()).map(|a| if grid.is_nyquist(i, a) { 0.0 } else { xi[a] * xi[a] }).sum()
            })
            .collect();
        let quad = ExpQuadrature::new(vertical.levels(), &kappas, opts.quadrature);
        let active = (0..grid.len()).filter(|&i| grid.dealias_mask()[i]).collect();
        Ok(Self { grid: grid.clone(), vertical, opts, quad, class_of, active, grad_weight })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn vertical(&self) -> &VerticalGrid {
        &self.vertical
    }

    pub fn options(&self) -> &DnOptions {
        &self.opts
    }

    fn padded(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut out = Vec::new();
        self.grid.to_padded_samples(coeffs, &mut out);
        out
    }

    fn times_grad(&self, coeffs: &[Complex64], axis: usize) -> Vec<Complex64> {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| if self.grid.is_nyquist(i, axis) { Complex64::new(0.0, 0.0) } else { c * Complex64::new(0.0, self.grid.xi(i)[axis]) })
            .collect()
    }

    fn times_abs(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        coeffs.iter().zip(self.grid.radial()).map(|(c, r)| c * *r).collect()
    }

    /// Builds `𝒫`-dependent data and checks the flattening Jacobian.
    pub fn prepare(&self, f: &SpectralField) -> Result<Geometry, DnError> {
        if f.grid() != &self.grid {
            return Err(SpectralError::GridMismatch.into());
        }
        let dim = self.grid.dim();
        let flat = f.coeffs()[1..].iter().all(|c| *c == Complex64::new(0.0, 0.0));
        let z = self.vertical.levels();
        let levels: Vec<LevelGeometry> = z
            .par_iter()
            .map(|&zl| {
                let p: Vec<Complex64> = f.coeffs().iter().zip(self.grid.radial()).map(|(c, r)| c * (zl * r).exp()).collect();
                let grad_p: Vec<Vec<f64>> = (0..dim).map(|a| self.padded(&self.times_grad(&p, a))).collect();
                let dz_p = self.padded(&self.times_abs(&p));
                let mut inv = Vec::with_capacity(dz_p.len());
                let mut frac = Vec::with_capacity(dz_p.len());
                for (i, &dz) in dz_p.iter().enumerate() {
                    let g2: f64 = grad_p.iter().map(|g| g[i] * g[i]).sum();
                    inv.push((1.0 + dz) / (1.0 + g2));
                    frac.push((g2 - dz) / (1.0 + g2));
                }
                LevelGeometry { grad_p, dz_p, inv, frac }
            })
            .collect();
        let min_jacobian = levels.iter().flat_map(|l| l.dz_p.iter()).fold(f64::INFINITY, |m, &d| m.min(1.0 + d));
        if min_jacobian <= self.opts.jacobian_floor {
            return Err(DnError::DegenerateJacobian { min_jacobian, floor: self.opts.jacobian_floor });
        }
        Ok(Geometry { f: f.clone(), levels, min_jacobian, flat })
    }

    /// Integrands `(div Q_b − |∇|Q_a, w + Q_a)` at one level.
    fn level_integrands(&self, geo: &LevelGeometry, v: &[Complex64], w: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let dim = self.grid.dim();
        let grad_v: Vec<Vec<f64>> = (0..dim).map(|a| self.padded(&self.times_grad(v, a))).collect();
        let abs_v = self.padded(&self.times_abs(v));
        let w_s = self.padded(w);
        let len = abs_v.len();
        let mut qa = vec![0.0; len];
        let mut qb = vec![vec![0.0; len]; dim];
        for i in 0..len {
            let dot: f64 = (0..dim).map(|a| geo.grad_p[a][i] * grad_v[a][i]).sum();
            let q = geo.inv[i] * dot - geo.frac[i] * (w_s[i] + abs_v[i]);
            qa[i] = q;
            let coef = abs_v[i] + w_s[i] + q;
            for a in 0..dim {
                qb[a][i] = coef * geo.grad_p[a][i] - geo.dz_p[i] * grad_v[a][i];
            }
        }
        let mut qa_hat = self.grid.coeffs_from_padded(&qa);
        self.grid.dealias(&mut qa_hat);
        let mut h1 = self.times_abs(&qa_hat);
        h1.iter_mut().for_each(|c| *c = -*c);
        for (a, comp) in qb.iter().enumerate() {
            let mut hat = self.grid.coeffs_from_padded(comp);
            self.grid.dealias(&mut hat);
            for (acc, d) in h1.iter_mut().zip(self.times_grad(&hat, a)) {
                *acc += d;
            }
        }
        // div and |∇| annihilate the mean exactly.
        debug_assert_eq!(h1[0], Complex64::new(0.0, 0.0));
        let h2: Vec<Complex64> = w.iter().zip(&qa_hat).map(|(a, b)| a + b).collect();
        (h1, h2)
    }

    fn grad_norm(&self, coeffs: &[Complex64]) -> f64 {
        let s: f64 = coeffs.iter().zip(&self.grad_weight).map(|(c, w)| w * c.norm_sqr()).sum();
        (s * self.grid.volume()).sqrt()
    }

    /// Solves for `G(f)g` given precomputed geometry.
    pub fn solve_with(&self, geo: &Geometry, g: &SpectralField) -> Result<DnSolution, DnError> {
        g.check_grid(&geo.f)?;
        let nlev = self.vertical.len();
        let z = self.vertical.levels();
        let modes = self.grid.len();
        let v0: Vec<Vec<Complex64>> = z
            .iter()
            .map(|&zl| g.coeffs().iter().zip(self.grid.radial()).map(|(c, r)| c * (zl * r).exp()).collect())
            .collect();
        let mut v = v0.clone();
        let mut w = vec![vec![Complex64::new(0.0, 0.0); modes]; nlev];
        let scale = {
            let s = self.grad_norm(g.coeffs());
            if s > 0.0 {
                s
            } else {
                1.0
            }
        };
        let mut history = Vec::new();
        let mut strikes = 0;
        let mut converged = false;
        let mut iterations = 0;
        let mut col_h = vec![Complex64::new(0.0, 0.0); nlev];
        let mut col_out = vec![Complex64::new(0.0, 0.0); nlev];
        for it in 1..=self.opts.max_iter {
            iterations = it;
            let (h1, h2): (Vec<Vec<Complex64>>, Vec<Vec<Complex64>>) = if geo.flat {
                let zero = vec![Complex64::new(0.0, 0.0); modes];
                (vec![zero.clone(); nlev], w.clone())
            } else {
                geo.levels.par_iter().zip(v.par_iter().zip(w.par_iter())).map(|(lg, (vl, wl))| self.level_integrands(lg, vl, wl)).unzip()
            };
            let mut w_new = vec![vec![Complex64::new(0.0, 0.0); modes]; nlev];
            let mut v_new = v0.clone();
            for &k in &self.active {
                let class = self.class_of[k];
                for i in 0..nlev {
                    col_h[i] = h1[i][k];
                }
                self.quad.integrate_up_generic(class, &col_h, &mut col_out);
                for i in 0..nlev {
                    w_new[i][k] = col_out[i];
                }
                for i in 0..nlev {
                    col_h[i] = h2[i][k];
                }
                self.quad.integrate_down_generic(class, &col_h, &mut col_out);
                for i in 0..nlev {
                    v_new[i][k] += col_out[i];
                }
            }
            let residual = (0..nlev)
                .map(|i| {
                    let dw: f64 = w_new[i].iter().zip(&w[i]).map(|(a, b)| (a - b).norm_sqr()).sum();
                    let dv: f64 = v_new[i].iter().zip(&v[i]).zip(&self.grad_weight).map(|((a, b), gw)| gw * (a - b).norm_sqr()).sum();
                    ((dw + dv) * self.grid.volume()).sqrt()
                })
                .fold(0.0, f64::max)
                / scale;
            w = w_new;
            v = v_new;
            if let Some(&prev) = history.last() {
                let ratio = if prev > 0.0 { residual / prev } else { 0.0 };
                if ratio > self.opts.contraction_guard {
                    strikes += 1;
                    if strikes >= self.opts.guard_patience {
                        return Err(DnError::NoContraction { iteration: it, ratio });
                    }
                } else {
                    strikes = 0;
                }
            }
            history.push(residual);
            if residual < self.opts.tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(DnError::NotConverged { iterations, residual: history.last().copied().unwrap_or(f64::NAN) });
        }
        let mut remainder = w[nlev - 1].clone();
        remainder[0] = Complex64::new(0.0, 0.0);
        let remainder = SpectralField::from_coeffs(&self.grid, remainder)?;
        let mut g_f_g = crate::spectral::abs_nabla(g);
        g_f_g += &remainder;
        let to_layers = |data: Vec<Vec<Complex64>>| -> Result<LayeredField, DnError> {
            let levels = data.into_iter().map(|c| SpectralField::from_coeffs(&self.grid, c)).collect::<Result<Vec<_>, _>>()?;
            Ok(LayeredField::from_levels(&self.vertical, levels)?)
        };
        Ok(DnSolution { g_f_g, remainder, w: to_layers(w)?, v: to_layers(v)?, iterations, residual_history: history })
    }

    /// `G(f)g` with full telemetry.
    pub fn solve(&self, f: &SpectralField, g: &SpectralField) -> Result<DnSolution, DnError> {
        let geo = self.prepare(f)?;
        self.solve_with(&geo, g)
    }
}

impl DnBackend for FixedPointSolver {
    fn apply_many(&self, f: &SpectralField, data: &[&SpectralField]) -> Result<Vec<SpectralField>, DnError> {
        let geo = self.prepare(f)?;
        data.iter().map(|g| self.solve_with(&geo, g).map(|s| s.g_f_g)).collect()
    }

    fn name(&self) -> &'static str {
        "fixed_point"
    }
}

/// Convenience wrapper: one solve with a freshly built solver.
pub fn solve_dn(f: &SpectralField, g: &SpectralField, opts: &DnOptions) -> Result<DnSolution, DnError> {
    FixedPointSolver::new(f.grid(), opts.clone())?.solve(f, g)
}

// ---------------------------------------------------------------------------
// Layer-level building blocks, exposed for inspection and testing.

fn padded_samples(f: &SpectralField) -> Vec<f64> {
    let mut out = Vec::new();
    f.grid().to_padded_samples(f.coeffs(), &mut out);
    out
}

fn from_padded(grid: &TorusGrid, samples: &[f64], dealias: bool) -> SpectralField {
    let mut c = grid.coeffs_from_padded(samples);
    if dealias {
        grid.dealias(&mut c);
    }
    SpectralField::from_coeffs(grid, c).expect("grid-sized coefficients")
}

fn map_levels<F>(z: &VerticalGrid, n: usize, func: F) -> LayeredField
where
    F: Fn(usize) -> SpectralField + Sync + Send,
{
    let levels: Vec<SpectralField> = (0..n).into_par_iter().map(func).collect();
    LayeredField::from_levels(z, levels).expect("one field per level")
}

/// `(𝒫, ℬ)` on the vertical grid; fails when `1 + ∂_z𝒫 ≤ floor` somewhere.
pub fn compute_layers_b(f: &SpectralField, z: &VerticalGrid, floor: f64) -> Result<(LayeredField, LayeredField), DnError> {
    let p = crate::spectral::poisson_extend(f, z);
    let mut min_jac = f64::INFINITY;
    let mut b_levels = Vec::with_capacity(z.len());
    for level in p.levels() {
        let grads: Vec<Vec<f64>> = crate::spectral::gradient(level).iter().map(padded_samples).collect();
        let dz = padded_samples(&crate::spectral::abs_nabla(level));
        let b: Vec<f64> = dz
            .iter()
            .enumerate()
            .map(|(i, &d)| {
                min_jac = min_jac.min(1.0 + d);
                let g2: f64 = grads.iter().map(|g| g[i] * g[i]).sum();
                (g2 - d) / (1.0 + d)
            })
            .collect();
        b_levels.push(from_padded(f.grid(), &b, false));
    }
    if min_jac <= floor {
        return Err(DnError::DegenerateJacobian { min_jacobian: min_jac, floor });
    }
    Ok((p, LayeredField::from_levels(z, b_levels)?))
}

/// `Q_a` level by level (dealiased).
pub fn assemble_qa(w: &LayeredField, v: &LayeredField, p: &LayeredField, b: &LayeredField) -> LayeredField {
    let grid = p.grid().clone();
    map_levels(p.vertical(), p.levels().len(), |i| {
        let gp: Vec<Vec<f64>> = crate::spectral::gradient(p.level(i)).iter().map(padded_samples).collect();
        let gv: Vec<Vec<f64>> = crate::spectral::gradient(v.level(i)).iter().map(padded_samples).collect();
        let av = padded_samples(&crate::spectral::abs_nabla(v.level(i)));
        let ws = padded_samples(w.level(i));
        let bs = padded_samples(b.level(i));
        let q: Vec<f64> = (0..av.len())
            .map(|j| {
                let dot: f64 = gp.iter().zip(&gv).map(|(a, c)| a[j] * c[j]).sum();
                (dot - bs[j] * (ws[j] + av[j])) / (1.0 + bs[j])
            })
            .collect();
        from_padded(&grid, &q, true)
    })
}

/// `Q_b` components level by level (dealiased).
pub fn assemble_qb(w: &LayeredField, v: &LayeredField, p: &LayeredField, qa: &LayeredField) -> Vec<LayeredField> {
    let grid = p.grid().clone();
    (0..grid.dim())
        .map(|axis| {
            map_levels(p.vertical(), p.levels().len(), |i| {
                let gp = padded_samples(&crate::spectral::gradient(p.level(i))[axis]);
                let dzp = padded_samples(&crate::spectral::abs_nabla(p.level(i)));
                let gv = padded_samples(&crate::spectral::gradient(v.level(i))[axis]);
                let av = padded_samples(&crate::spectral::abs_nabla(v.level(i)));
                let ws = padded_samples(w.level(i));
                let qs = padded_samples(qa.level(i));
                let q: Vec<f64> = (0..av.len()).map(|j| (av[j] + ws[j] + qs[j]) * gp[j] - dzp[j] * gv[j]).collect();
                from_padded(&grid, &q, true)
            })
        })
        .collect()
}

fn integrate_layers(h: &LayeredField, order: QuadratureOrder, upward: bool) -> LayeredField {
    let grid = h.grid().clone();
    let z = h.vertical().clone();
    let radial = grid.radial().to_vec();
    let quad = ExpQuadrature::new(z.levels(), &radial, order);
    let nlev = z.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; nlev];
    let mut col = vec![Complex64::new(0.0, 0.0); nlev];
    let mut res = vec![Complex64::new(0.0, 0.0); nlev];
    for k in 0..grid.len() {
        for i in 0..nlev {
            col[i] = h.level(i).coeffs()[k];
        }
        if upward {
            quad.integrate_up_generic(k, &col, &mut res);
        } else {
            quad.integrate_down_generic(k, &col, &mut res);
        }
        for i in 0..nlev {
            out[i][k] = res[i];
        }
    }
    let levels = out.into_iter().map(|c| SpectralField::from_coeffs(&grid, c).expect("grid-sized")).collect();
    LayeredField::from_levels(&z, levels).expect("one field per level")
}

/// `Π¹ = ∫_{-Z_max}^z e^{-(z-τ)|∇|}(div Q_b − |∇|Q_a) dτ`.
pub fn apply_pi1(qa: &LayeredField, qb: &[LayeredField], order: QuadratureOrder) -> LayeredField {
    let z = qa.vertical().clone();
    let levels: Vec<SpectralField> = (0..z.len())
        .map(|i| {
            let comps: Vec<SpectralField> = qb.iter().map(|c| c.level(i).clone()).collect();
            let mut h = crate::spectral::divergence(&comps);
            h -= &crate::spectral::abs_nabla(qa.level(i));
            h
        })
        .collect();
    let h = LayeredField::from_levels(&z, levels).expect("one field per level");
    apply_pi1_integrand(&h, order)
}

/// `Π¹` applied to a precomputed integrand.
pub fn apply_pi1_integrand(h: &LayeredField, order: QuadratureOrder) -> LayeredField {
    integrate_layers(h, order, true)
}

/// `Π² = −∫_z^0 e^{(z-τ)|∇|}(w + Q_a) dτ`.
pub fn apply_pi2(w: &LayeredField, qa: &LayeredField, order: QuadratureOrder) -> LayeredField {
    let z = w.vertical().clone();
    let levels: Vec<SpectralField> = (0..z.len()).map(|i| w.level(i) + qa.level(i)).collect();
    let h = LayeredField::from_levels(&z, levels).expect("one field per level");
    integrate_layers(&h, order, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{abs_nabla, poisson_extend};

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::periodic(1, n).unwrap()
    }

    fn cosine(g: &TorusGrid, k: f64, a: f64) -> SpectralField {
        SpectralField::from_fn(g, |x| a * (k * x[0]).cos())
    }

    fn opts(levels: usize) -> DnOptions {
        DnOptions { levels, ..DnOptions::default() }
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    }

    #[test]
    fn flat_interface_gives_abs_gradient() {
        let g = grid(64);
        let solver = FixedPointSolver::new(&g, opts(120)).unwrap();
        let data = SpectralField::from_fn(&g, |x| (3.0 * x[0]).sin() + 0.5 * (7.0 * x[0]).cos());
        let out = solver.apply(&SpectralField::zeros(&g), &data).unwrap();
        assert!((&out - &abs_nabla(&data)).l2_norm() <= 1e-12 * data.l2_norm());
    }

    #[test]
    fn bottom_term_matches_pointwise_formula() {
        let g = grid(64);
        let f = cosine(&g, 1.0, 0.1);
        let z = VerticalGrid::geometric(40, 1.1, 40.0).unwrap();
        let (_, b) = compute_layers_b(&f, &z, 0.05).unwrap();
        let top = b.level(z.len() - 1).to_samples();
        let expect: Vec<f64> = (0..g.len())
            .map(|i| {
                let x = g.point(i)[0];
                let (fx, dz) = (-0.1 * x.sin(), 0.1 * x.cos());
                (fx * fx - dz) / (1.0 + dz)
            })
            .collect();
        assert!(max_diff(&top, &expect) <= 1e-12);
        let peak = top.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(peak > 0.0 && peak < 0.2, "max |B| = {peak}");
        // Deep levels see an almost flat interface.
        assert!(b.level(0).max_abs() < 1e-12);
    }

    #[test]
    fn qa_matches_pointwise_formula() {
        let g = grid(64);
        let f = cosine(&g, 1.0, 0.1);
        let z = VerticalGrid::geometric(40, 1.1, 40.0).unwrap();
        let (p, b) = compute_layers_b(&f, &z, 0.05).unwrap();
        let v = poisson_extend(&cosine(&g, 1.0, 1.0), &z);
        let w = LayeredField::from_levels(&z, vec![SpectralField::zeros(&g); z.len()]).unwrap();
        let qa = assemble_qa(&w, &v, &p, &b);
        let top = qa.level(z.len() - 1).to_samples();
        let expect: Vec<f64> = (0..g.len())
            .map(|i| {
                let x = g.point(i)[0];
                let (px, pz) = (-0.1 * x.sin(), 0.1 * x.cos());
                let (vx, absv) = (-x.sin(), x.cos());
                let bb = (px * px - pz) / (1.0 + pz);
                (px * vx - bb * absv) / (1.0 + bb)
            })
            .collect();
        assert!(max_diff(&top, &expect) <= 1e-12);
    }

    #[test]
    fn pi_operators_integrate_exponential_modes() {
        let g = grid(16);
        let opts = DnOptions::default();
        let mut errs = Vec::new();
        for scale in [1usize, 2] {
            let o = if scale == 1 { opts.clone() } else { opts.refined() };
            let z = o.vertical().unwrap();
            // h(τ, x) = e^{τ} cos x, so Π¹h(z) = cos x (e^{z} − e^{−2Z−z})/2.
            let levels = z.levels().iter().map(|&t| cosine(&g, 1.0, t.exp())).collect();
            let h = LayeredField::from_levels(&z, levels).unwrap();
            let out = apply_pi1_integrand(&h, QuadratureOrder::Linear);
            let zmax = -z.levels()[0];
            let mut err = 0.0f64;
            for (i, &zl) in z.levels().iter().enumerate() {
                let exact = (zl.exp() - (-2.0 * zmax - zl).exp()) / 2.0;
                err = err.max((out.level(i).coeff([1, 0]).re * 2.0 - exact).abs());
            }
            errs.push(err);
        }
        assert!(errs[0] < 1e-3, "{errs:?}");
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 1.8, "order {order}");
    }

    #[test]
    fn mean_modes_integrate_by_trapezoid() {
        let g = grid(16);
        let z = VerticalGrid::geometric(30, 1.1, 20.0).unwrap();
        let levels = z.levels().iter().map(|&t| SpectralField::from_fn(&g, |_| 2.0 + t)).collect();
        let h = LayeredField::from_levels(&z, levels).unwrap();
        let zero = LayeredField::from_levels(&z, vec![SpectralField::zeros(&g); z.len()]).unwrap();
        let up = apply_pi1_integrand(&h, QuadratureOrder::Linear);
        let down = apply_pi2(&h, &zero, QuadratureOrder::Linear);
        let z0 = z.levels()[0];
        for (i, &zl) in z.levels().iter().enumerate() {
            let below = 2.0 * (zl - z0) + (zl * zl - z0 * z0) / 2.0;
            let above = 2.0 * zl + zl * zl / 2.0;
            assert!((up.level(i).mean() - below).abs() < 1e-12);
            assert!((down.level(i).mean() - above).abs() < 1e-12);
        }
        assert!(apply_pi1_integrand(&zero, QuadratureOrder::Linear).levels().iter().all(|l| l.max_abs() == 0.0));
    }

    #[test]
    fn first_order_expansion() {
        // f = ε cos 2x, g = cos x: G(f)g = (1 − ε) cos x + O(ε²).
        let g = grid(64);
        let solver = FixedPointSolver::new(&g, opts(160)).unwrap();
        for eps in [0.01, 0.02] {
            let out = solver.apply(&cosine(&g, 2.0, eps), &cosine(&g, 1.0, 1.0)).unwrap();
            let c1 = 2.0 * out.coeff([1, 0]).re;
            assert!((c1 - (1.0 - eps)).abs() <= 2.0 * eps * eps, "ε={eps}: {c1}");
            assert!(out.mean().abs() <= 1e-12);
        }
    }

    #[test]
    fn converges_geometrically_and_stays_flux_free() {
        let g = grid(64);
        let solver = FixedPointSolver::new(&g, opts(160)).unwrap();
        let f = SpectralField::from_fn(&g, |x| 0.03 * x[0].cos() + 0.01 * (3.0 * x[0]).sin());
        let sol = solver.solve(&f, &cosine(&g, 2.0, 1.0)).unwrap();
        let h = &sol.residual_history;
        assert!(*h.last().unwrap() < 1e-12);
        for w in h.windows(2).skip(1) {
            assert!(w[1] / w[0] <= 0.5, "{h:?}");
        }
        assert!(sol.g_f_g.mean().abs() <= 1e-12);
        assert!(sol.w.level(sol.w.levels().len() - 1).mean().abs() <= 1e-12);
        assert!((&sol.g_f_g - &(&abs_nabla(&cosine(&g, 2.0, 1.0)) + &sol.remainder)).l2_norm() < 1e-14);
    }

    #[test]
    fn self_adjoint_on_small_data() {
        let g = grid(64);
        let solver = FixedPointSolver::new(&g, opts(160)).unwrap();
        let f = cosine(&g, 1.0, 0.05);
        let g1 = SpectralField::from_fn(&g, |x| x[0].sin() + 0.3 * (4.0 * x[0]).cos());
        let g2 = SpectralField::from_fn(&g, |x| (2.0 * x[0]).cos() - 0.2 * (5.0 * x[0]).sin());
        let out = solver.apply_many(&f, &[&g1, &g2]).unwrap();
        let defect = (out[0].inner(&g2) - g1.inner(&out[1])).abs();
        assert!(defect <= 1e-8 * g1.l2_norm() * g2.l2_norm(), "{defect:e}");
    }

    #[test]
    fn large_data_is_a_regime_failure() {
        let g = grid(32);
        let solver = FixedPointSolver::new(&g, opts(120)).unwrap();
        let f = cosine(&g, 3.0, 3.0);
        let err = solver.apply(&f, &f).unwrap_err();
        assert!(err.is_regime_failure(), "{err}");
        let other = grid(16);
        assert!(matches!(solver.apply(&SpectralField::zeros(&other), &SpectralField::zeros(&other)), Err(DnError::Spectral(_))));
    }

    #[test]
    fn contraction_probe_is_stable_under_halving() {
        let g = grid(64);
        let solver = FixedPointSolver::new(&g, opts(160)).unwrap();
        let f1 = cosine(&g, 1.0, 0.05);
        let data = cosine(&g, 1.0, 1.0);
        let probe = |d: f64| dn_contraction_probe(&solver, &f1, &(&f1 + &cosine(&g, 2.0, d)), &data, 2.0, 2.0).unwrap();
        let a = probe(0.01);
        let b = probe(0.005);
        assert!(!a.degenerate && a.ratio.is_finite() && a.ratio > 0.0);
        assert!((b.ratio / a.ratio - 1.0).abs() <= 0.2, "{} vs {}", a.ratio, b.ratio);
        assert!(dn_contraction_probe(&solver, &f1, &f1, &data, 2.0, 2.0).unwrap().degenerate);
    }
}
