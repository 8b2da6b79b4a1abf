//! Discrete strip operator and its preconditioned BiCGSTAB solve.

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use super::{EllipticError, Interface, StripOptions};
use crate::spectral::{SpectralField, TorusGrid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub(super) struct StripOperator<'a> {
    grid: &'a TorusGrid,
    iface: &'a Interface,
    nz: usize,
    h: f64,
    tol: f64,
    max_iter: usize,
}

// Sequential reductions keep results reproducible run to run; a parallel sum's
// association order depends on work stealing.
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

impl<'a> StripOperator<'a> {
    pub(super) fn new(grid: &'a TorusGrid, opts: &StripOptions, iface: &'a Interface) -> Self {
        Self { grid, iface, nz: opts.nz, h: opts.spacing(), tol: opts.tol, max_iter: opts.max_iter }
    }

    fn modes(&self) -> usize {
        self.grid.len()
    }

    /// Applies the operator to interior unknowns `u` (levels `0..nz`) with top level `top`.
    fn apply(&self, u: &[Complex64], top: &[Complex64], out: &mut [Complex64]) {
        let m = self.modes();
        let h = self.h;
        let radial = self.grid.radial();
        let level = |j: usize| -> &[Complex64] {
            if j == self.nz {
                top
            } else {
                &u[j * m..(j + 1) * m]
            }
        };
        out.par_chunks_mut(m).enumerate().for_each(|(j, row)| {
            let vj = level(j);
            let vp = level(j + 1);
            let mut vz = vec![ZERO; m];
            let mut vzz = vec![ZERO; m];
            if j == 0 {
                for k in 0..m {
                    let kap = radial[k];
                    vz[k] = vj[k] * kap;
                    vzz[k] = (vp[k] * 2.0 - vj[k] * (2.0 + 2.0 * h * kap)) / (h * h);
                }
            } else {
                let vm = level(j - 1);
                for k in 0..m {
                    vz[k] = (vp[k] - vm[k]) / (2.0 * h);
                    vzz[k] = (vp[k] - vj[k] * 2.0 + vm[k]) / (h * h);
                }
            }
            for k in 0..m {
                row[k] = vzz[k] - vj[k] * (radial[k] * radial[k]);
            }
            if !self.iface.flat {
                let extra = self.variable_terms(&vz, &vzz);
                for (r, e) in row.iter_mut().zip(extra) {
                    *r += e;
                }
            }
        });
    }

    /// `−(Δf) v_z − 2∇f·∇v_z + |∇f|² v_zz`, formed on the padded grid.
    fn variable_terms(&self, vz: &[Complex64], vzz: &[Complex64]) -> Vec<Complex64> {
        let g = self.grid;
        let pad = |c: &[Complex64]| {
            let mut s = Vec::new();
            g.to_padded_samples(c, &mut s);
            s
        };
        let vz_s = pad(vz);
        let vzz_s = pad(vzz);
        let grads: Vec<Vec<f64>> = (0..g.dim())
            .map(|a| {
                let c: Vec<Complex64> = vz
                    .iter()
                    .enumerate()
                    .map(|(i, c)| if g.is_nyquist(i, a) { ZERO } else { c * Complex64::new(0.0, g.xi(i)[a]) })
                    .collect();
                pad(&c)
            })
            .collect();
        let it = self.iface;
        let prod: Vec<f64> = (0..vz_s.len())
            .map(|i| {
                let cross: f64 = it.grad.iter().zip(&grads).map(|(p, q)| p[i] * q[i]).sum();
                -it.lap[i] * vz_s[i] - 2.0 * cross + it.slope2[i] * vzz_s[i]
            })
            .collect();
        g.coeffs_from_padded(&prod)
    }

    /// Exact inverse of the flat operator (tridiagonal per mode, Thomas algorithm).
    fn precondition(&self, r: &[Complex64], out: &mut [Complex64]) {
        let m = self.modes();
        let nz = self.nz;
        let h2 = self.h * self.h;
        let radial = self.grid.radial();
        let cols: Vec<Vec<Complex64>> = (0..m)
            .into_par_iter()
            .map(|k| {
                let kap = radial[k];
                let mut cp = vec![0.0; nz];
                let mut dp = vec![ZERO; nz];
                for j in 0..nz {
                    let (lower, diag, upper) = if j == 0 {
                        (0.0, (-2.0 - 2.0 * self.h * kap) / h2 - kap * kap, 2.0 / h2)
                    } else {
                        (1.0 / h2, -2.0 / h2 - kap * kap, if j + 1 < nz { 1.0 / h2 } else { 0.0 })
                    };
                    let denom = diag - lower * if j > 0 { cp[j - 1] } else { 0.0 };
                    cp[j] = upper / denom;
                    let prev = if j > 0 { dp[j - 1] } else { ZERO };
                    dp[j] = (r[j * m + k] - prev * lower) / denom;
                }
                let mut x = vec![ZERO; nz];
                x[nz - 1] = dp[nz - 1];
                for j in (0..nz - 1).rev() {
                    x[j] = dp[j] - x[j + 1] * cp[j];
                }
                x
            })
            .collect();
        for (k, col) in cols.into_iter().enumerate() {
            for (j, v) in col.into_iter().enumerate() {
                out[j * m + k] = v;
            }
        }
    }

    /// Returns the level coefficients `0..=nz`, iterations and relative residual.
    pub(super) fn solve(&self, g: &SpectralField) -> Result<(Vec<Vec<Complex64>>, usize, f64), EllipticError> {
        let m = self.modes();
        let n = self.nz * m;
        let zeros = vec![ZERO; n];
        let mut b = vec![ZERO; n];
        self.apply(&zeros, g.coeffs(), &mut b);
        b.iter_mut().for_each(|c| *c = -*c);
        let top0 = vec![ZERO; m];
        let bnorm = norm(&b);
        let mut x = vec![ZERO; n];
        let (iterations, residual) = if bnorm == 0.0 { (0, 0.0) } else { self.bicgstab(&b, bnorm, &top0, &mut x)? };
        let mut levels: Vec<Vec<Complex64>> = x.chunks(m).map(<[Complex64]>::to_vec).collect();
        levels.push(g.coeffs().to_vec());
        Ok((levels, iterations, residual))
    }

    fn bicgstab(&self, b: &[Complex64], bnorm: f64, top0: &[Complex64], x: &mut [Complex64]) -> Result<(usize, f64), EllipticError> {
        let n = b.len();
        let mut r = b.to_vec();
        let r_hat = r.clone();
        let (mut rho, mut alpha, mut omega) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let mut v = vec![ZERO; n];
        let mut p = vec![ZERO; n];
        let mut y = vec![ZERO; n];
        let mut s = vec![ZERO; n];
        let mut zv = vec![ZERO; n];
        let mut t = vec![ZERO; n];
        let mut rel = 1.0;
        for it in 1..=self.max_iter {
            let rho_new = dot(&r_hat, &r);
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            p.par_iter_mut().zip(&r).zip(&v).for_each(|((pi, ri), vi)| *pi = ri + beta * (*pi - omega * vi));
            self.precondition(&p, &mut y);
            self.apply(&y, top0, &mut v);
            alpha = rho / dot(&r_hat, &v);
            s.par_iter_mut().zip(&r).zip(&v).for_each(|((si, ri), vi)| *si = ri - alpha * vi);
            x.par_iter_mut().zip(&y).for_each(|(xi, yi)| *xi += alpha * yi);
            rel = norm(&s) / bnorm;
            if rel <= self.tol {
                return Ok((it, rel));
            }
            self.precondition(&s, &mut zv);
            self.apply(&zv, top0, &mut t);
            omega = dot(&t, &s) / dot(&t, &t);
            x.par_iter_mut().zip(&zv).for_each(|(xi, zi)| *xi += omega * zi);
            r.par_iter_mut().zip(&s).zip(&t).for_each(|((ri, si), ti)| *ri = si - omega * ti);
            rel = norm(&r) / bnorm;
            if rel <= self.tol {
                return Ok((it, rel));
            }
        }
        Err(EllipticError::NonConvergence { iterations: self.max_iter, residual: rel })
    }
}
