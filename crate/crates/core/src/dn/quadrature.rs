//! Exponential quadrature for the vertical integral operators.
//!
//! Per Fourier class with wavenumber `κ`, the integrand is replaced on each
//! panel by its Lagrange interpolant through a small stencil of levels and
//! integrated exactly against the kernel `e^{-κ·distance}`.

use serde::{Deserialize, Serialize};

/// Interpolation order of the integrand on each panel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureOrder {
    /// Piecewise-linear integrand (second order).
    #[default]
    Linear,
    /// Piecewise-cubic integrand through four neighbouring levels (fourth order).
    Cubic,
}

impl QuadratureOrder {
    fn points(self) -> usize {
        match self {
            QuadratureOrder::Linear => 2,
            QuadratureOrder::Cubic => 4,
        }
    }
}

/// `M_q(x) = ∫_0^1 e^{-xu} u^q du` for `q = 0..=3`.
pub fn exp_moments(x: f64) -> [f64; 4] {
    let mut m = [0.0; 4];
    if x < 1.0 {
        for (q, slot) in m.iter_mut().enumerate() {
            let mut term = 1.0;
            let mut sum = 0.0;
            for n in 0..40 {
                if n > 0 {
                    term *= -x / n as f64;
                }
                sum += term / (n + q + 1) as f64;
                if term.abs() < 1e-18 {
                    break;
                }
            }
            *slot = sum;
        }
    } else {
        let e = (-x).exp();
        m[0] = (1.0 - e) / x;
        for q in 1..4 {
            m[q] = (q as f64 * m[q - 1] - e) / x;
        }
    }
    m
}

/// `a(x) = ∫_0^1 e^{-xu}(1-u) du`, weight of the far node for the linear rule.
pub fn phi_far(x: f64) -> f64 {
    let m = exp_moments(x);
    m[0] - m[1]
}

/// `b(x) = ∫_0^1 e^{-xu} u du`, weight of the near node for the linear rule.
pub fn phi_near(x: f64) -> f64 {
    exp_moments(x)[1]
}

/// Monomial coefficients of the Lagrange basis polynomials through `nodes`.
fn lagrange_coefficients(nodes: &[f64]) -> Vec<[f64; 4]> {
    let k = nodes.len();
    (0..k)
        .map(|m| {
            let mut poly = [0.0; 4];
            poly[0] = 1.0;
            let mut degree = 0;
            for (j, &nj) in nodes.iter().enumerate() {
                if j == m {
                    continue;
                }
                let denom = nodes[m] - nj;
                let mut next = [0.0; 4];
                for d in 0..=degree {
                    next[d + 1] += poly[d] / denom;
                    next[d] -= poly[d] * nj / denom;
                }
                poly = next;
                degree += 1;
            }
            poly
        })
        .collect()
}

/// Precomputed panel weights for every radial class.
#[derive(Clone, Debug)]
pub struct ExpQuadrature {
    points: usize,
    panels: usize,
    /// First stencil level per panel.
    start: Vec<usize>,
    /// `e^{-κΔ_p}` per class and panel.
    decay: Vec<f64>,
    /// Upward (`∫_{-∞}^z e^{-(z-τ)κ}`) weights, class × panel × point.
    up: Vec<f64>,
    /// Downward (`∫_z^0 e^{(z-τ)κ}`) weights, class × panel × point.
    down: Vec<f64>,
}

impl ExpQuadrature {
    pub fn new(z: &[f64], wavenumbers: &[f64], order: QuadratureOrder) -> Self {
        let panels = z.len() - 1;
        let points = order.points().min(z.len());
        let mut start = Vec::with_capacity(panels);
        let mut s_nodes = Vec::with_capacity(panels);
        for p in 0..panels {
            let st = if points == 2 { p } else { p.saturating_sub(1).min(z.len() - points) };
            let dz = z[p + 1] - z[p];
            start.push(st);
            s_nodes.push((0..points).map(|m| (z[st + m] - z[p]) / dz).collect::<Vec<_>>());
        }
        // Basis coefficients in s (distance from the panel bottom) and u = 1 - s.
        let basis_s: Vec<Vec<[f64; 4]>> = s_nodes.iter().map(|n| lagrange_coefficients(n)).collect();
        let basis_u: Vec<Vec<[f64; 4]>> = s_nodes
            .iter()
            .map(|n| lagrange_coefficients(&n.iter().map(|s| 1.0 - s).collect::<Vec<_>>()))
            .collect();
        let nclass = wavenumbers.len();
        let mut decay = vec![0.0; nclass * panels];
        let mut up = vec![0.0; nclass * panels * points];
        let mut down = vec![0.0; nclass * panels * points];
        for (c, &kappa) in wavenumbers.iter().enumerate() {
            for p in 0..panels {
                let dz = z[p + 1] - z[p];
                let x = kappa * dz;
                decay[c * panels + p] = (-x).exp();
                let mom = exp_moments(x);
                for m in 0..points {
                    let dot = |coef: &[f64; 4]| coef.iter().zip(&mom).map(|(a, b)| a * b).sum::<f64>();
                    let idx = (c * panels + p) * points + m;
                    up[idx] = dz * dot(&basis_u[p][m]);
                    down[idx] = dz * dot(&basis_s[p][m]);
                }
            }
        }
        Self { points, panels, start, decay, up, down }
    }

    /// `W(z_i) = ∫_{z_0}^{z_i} e^{-(z_i-τ)κ} h(τ) dτ` for one class; `h` and `out` are per level.
    pub fn integrate_up(&self, class: usize, h: &[f64], out: &mut [f64]) {
        self.integrate_up_generic(class, h, out);
    }

    /// `V(z_i) = −∫_{z_i}^0 e^{(z_i-τ)κ} h(τ) dτ` for one class.
    pub fn integrate_down(&self, class: usize, h: &[f64], out: &mut [f64]) {
        self.integrate_down_generic(class, h, out);
    }

    pub(crate) fn integrate_up_generic<T>(&self, class: usize, h: &[T], out: &mut [T])
    where
        T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
    {
        out[0] = T::default();
        for p in 0..self.panels {
            let base = class * self.panels + p;
            let mut acc = out[p] * self.decay[base];
            let w = &self.up[base * self.points..(base + 1) * self.points];
            let st = self.start[p];
            for m in 0..self.points {
                acc = acc + h[st + m] * w[m];
            }
            out[p + 1] = acc;
        }
    }

    pub(crate) fn integrate_down_generic<T>(&self, class: usize, h: &[T], out: &mut [T])
    where
        T: Copy + std::ops::Add<Output = T> + std::ops::Mul<f64, Output = T> + Default,
    {
        out[self.panels] = T::default();
        for p in (0..self.panels).rev() {
            let base = class * self.panels + p;
            let mut acc = out[p + 1] * self.decay[base];
            let w = &self.down[base * self.points..(base + 1) * self.points];
            let st = self.start[p];
            for m in 0..self.points {
                acc = acc + h[st + m] * (-w[m]);
            }
            out[p] = acc;
        }
    }
}
