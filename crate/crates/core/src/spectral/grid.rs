use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::SpectralError;

/// Cached forward/inverse plans for one transform length.
#[derive(Clone)]
struct Plans {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Plans {
    fn new(len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { len, forward: planner.plan_fft_forward(len), inverse: planner.plan_fft_inverse(len) }
    }
}

struct GridInner {
    dim: usize,
    n: usize,
    period: f64,
    base: Plans,
    padded: Plans,
    /// Radial wavenumber |ξ| per flat coefficient index.
    radial: Vec<f64>,
    /// Integer wavevector per flat coefficient index (second entry 0 when d = 1).
    kvec: Vec<[i64; 2]>,
    dealias: Vec<bool>,
}

/// Uniform periodic grid on the torus `[0, L)^d`, `d ∈ {1, 2}`.
///
/// Coefficient storage is row-major over the integer index per dimension,
/// where index `i` carries wavenumber `i` for `i ≤ N/2` and `i − N` otherwise.
/// Coefficients use the unit-amplitude convention
/// `f̂(k) = N^{-d} Σ_j f(x_j) e^{-i ξ_k·x_j}`, so `cos x` has `f̂(±1) = 1/2`
/// and Parseval reads `‖f‖²_{L²} = L^d Σ |f̂(k)|²`.
///
/// Cloning is cheap: plans and tables are shared behind an `Arc`.
#[derive(Clone)]
pub struct TorusGrid {
    inner: Arc<GridInner>,
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("dim", &self.dim())
            .field("n", &self.n())
            .field("period", &self.period())
            .finish()
    }
}

impl PartialEq for TorusGrid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.dim() == other.dim() && self.n() == other.n() && self.period() == other.period())
    }
}

impl TorusGrid {
    pub fn new(dim: usize, n: usize, period: f64) -> Result<Self, SpectralError> {
        if !(1..=2).contains(&dim) {
            return Err(SpectralError::InvalidGrid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(SpectralError::InvalidGrid(format!("points per dimension must be a power of two ≥ 8, got {n}")));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(SpectralError::InvalidGrid(format!("period must be positive and finite, got {period}")));
        }
        let total = n.pow(dim as u32);
        let dk = 2.0 * PI / period;
        let cut = n as f64 / 3.0;
        let mut radial = Vec::with_capacity(total);
        let mut kvec = Vec::with_capacity(total);
        let mut dealias = Vec::with_capacity(total);
        for idx in 0..total {
            let k = Self::index_to_k(dim, n, idx);
            let k2 = (k[0] * k[0] + k[1] * k[1]) as f64;
            radial.push(dk * k2.sqrt());
            kvec.push(k);
            dealias.push(k2.sqrt() <= cut + 1e-12);
        }
        Ok(Self {
            inner: Arc::new(GridInner {
                dim,
                n,
                period,
                base: Plans::new(n),
                padded: Plans::new(3 * n / 2),
                radial,
                kvec,
                dealias,
            }),
        })
    }

    /// Standard `2π`-periodic grid.
    pub fn periodic(dim: usize, n: usize) -> Result<Self, SpectralError> {
        Self::new(dim, n, 2.0 * PI)
    }

    fn index_to_k(dim: usize, n: usize, idx: usize) -> [i64; 2] {
        let wrap = |i: usize| -> i64 {
            if i <= n / 2 {
                i as i64
            } else {
                i as i64 - n as i64
            }
        };
        match dim {
            1 => [wrap(idx), 0],
            _ => [wrap(idx / n), wrap(idx % n)],
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn period(&self) -> f64 {
        self.inner.period
    }

    /// Number of samples (equivalently coefficients), `N^d`.
    pub fn len(&self) -> usize {
        self.inner.radial.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Torus volume `L^d`.
    pub fn volume(&self) -> f64 {
        self.period().powi(self.dim() as i32)
    }

    /// Quadrature weight of one sample, `(L/N)^d`.
    pub fn cell_volume(&self) -> f64 {
        (self.period() / self.n() as f64).powi(self.dim() as i32)
    }

    /// Frequency spacing `2π/L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.period()
    }

    pub fn kvec(&self, idx: usize) -> [i64; 2] {
        self.inner.kvec[idx]
    }

    /// Physical wavevector `2πk/L` (second entry 0 when d = 1).
    pub fn xi(&self, idx: usize) -> [f64; 2] {
        let k = self.inner.kvec[idx];
        let dk = self.dk();
        [dk * k[0] as f64, dk * k[1] as f64]
    }

    /// `|ξ|` for every flat index.
    pub fn radial(&self) -> &[f64] {
        &self.inner.radial
    }

    /// Whether component `axis` of the wavevector at `idx` sits on the Nyquist line.
    pub fn is_nyquist(&self, idx: usize, axis: usize) -> bool {
        self.inner.kvec[idx][axis].unsigned_abs() as usize == self.n() / 2
    }

    /// Mask of modes retained by the 2/3 dealiasing rule (integer `|k| ≤ N/3`).
    pub fn dealias_mask(&self) -> &[bool] {
        &self.inner.dealias
    }

    /// Largest `|ξ|` kept by dealiasing; the default Galerkin cutoff.
    pub fn dealias_radius(&self) -> f64 {
        self.n() as f64 / 3.0 * self.dk()
    }

    /// Smallest nonzero `|ξ|`.
    pub fn min_nonzero_xi(&self) -> f64 {
        self.dk()
    }

    /// Flat index of an integer wavevector, if representable.
    pub fn index_of(&self, k: [i64; 2]) -> Option<usize> {
        let n = self.n() as i64;
        let fold = |v: i64| -> Option<usize> {
            if v > n / 2 || v <= -n / 2 {
                None
            } else {
                Some(v.rem_euclid(n) as usize)
            }
        };
        match self.dim() {
            1 => {
                if k[1] != 0 {
                    return None;
                }
                fold(k[0])
            }
            _ => Some(fold(k[0])? * self.n() + fold(k[1])?),
        }
    }

    /// Sample coordinates `x_j = jL/N` per dimension for flat index `idx`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let h = self.period() / self.n() as f64;
        match self.dim() {
            1 => [h * idx as f64, 0.0],
            _ => [h * (idx / self.n()) as f64, h * (idx % self.n()) as f64],
        }
    }

    /// Samples of `func` at every grid point.
    pub fn sample<F: Fn([f64; 2]) -> f64>(&self, func: F) -> Vec<f64> {
        (0..self.len()).map(|i| func(self.point(i))).collect()
    }

    pub(crate) fn padded_n(&self) -> usize {
        self.inner.padded.len
    }

    pub(crate) fn padded_len(&self) -> usize {
        self.padded_n().pow(self.dim() as u32)
    }

    /// Unnormalized d-dimensional transform in place.
    fn transform(&self, plans: &Plans, data: &mut [Complex64], forward: bool) {
        let m = plans.len;
        let fft = if forward { &plans.forward } else { &plans.inverse };
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        fft.process_with_scratch(data, &mut scratch);
        if self.dim() == 2 {
            transpose_square(data, m);
            fft.process_with_scratch(data, &mut scratch);
            transpose_square(data, m);
        }
    }

    /// Forward transform of real samples to unit-amplitude coefficients.
    pub fn forward_real(&self, samples: &[f64]) -> Result<Vec<Complex64>, SpectralError> {
        if samples.len() != self.len() {
            return Err(SpectralError::LengthMismatch { expected: self.len(), got: samples.len() });
        }
        let mut data: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        self.forward_in_place(&mut data);
        Ok(data)
    }

    /// Forward transform (normalized by `N^d`) of complex samples in place.
    pub fn forward_in_place(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.len());
        self.transform(&self.inner.base, data, true);
        let scale = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|c| *c *= scale);
    }

    /// Inverse transform of coefficients to real samples (imaginary parts discarded).
    pub fn inverse_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut data = coeffs.to_vec();
        self.inverse_in_place(&mut data);
        data.into_iter().map(|c| c.re).collect()
    }

    /// Inverse transform in place (no normalization: coefficients are amplitudes).
    pub fn inverse_in_place(&self, data: &mut [Complex64]) {
        debug_assert_eq!(data.len(), self.len());
        self.transform(&self.inner.base, data, false);
    }

    /// Evaluates a coefficient array on the 3/2-padded grid.
    ///
    /// A Nyquist coefficient is split evenly between `±N/2` so that real
    /// fields stay real on the finer grid.
    pub(crate) fn to_padded_samples(&self, coeffs: &[Complex64], out: &mut Vec<f64>) {
        let n = self.n();
        let m = self.padded_n();
        let mut buf = vec![Complex64::new(0.0, 0.0); self.padded_len()];
        let place = |i: usize| -> [(usize, f64); 2] {
            // Target padded indices and weights for base index i.
            if i < n / 2 {
                [(i, 1.0), (usize::MAX, 0.0)]
            } else if i == n / 2 {
                [(n / 2, 0.5), (m - n / 2, 0.5)]
            } else {
                [(m - (n - i), 1.0), (usize::MAX, 0.0)]
            }
        };
        match self.dim() {
            1 => {
                for (i, &c) in coeffs.iter().enumerate() {
                    for (t, w) in place(i) {
                        if t != usize::MAX {
                            buf[t] += c * w;
                        }
                    }
                }
            }
            _ => {
                for i0 in 0..n {
                    for i1 in 0..n {
                        let c = coeffs[i0 * n + i1];
                        if c == Complex64::new(0.0, 0.0) {
                            continue;
                        }
                        for (t0, w0) in place(i0) {
                            if t0 == usize::MAX {
                                continue;
                            }
                            for (t1, w1) in place(i1) {
                                if t1 != usize::MAX {
                                    buf[t0 * m + t1] += c * (w0 * w1);
                                }
                            }
                        }
                    }
                }
            }
        }
        self.transform(&self.inner.padded, &mut buf, false);
        out.clear();
        out.extend(buf.iter().map(|c| c.re));
    }

    /// Transforms padded-grid samples back to base coefficients, folding the
    /// `±N/2` lines onto the Nyquist slot. No dealiasing is applied here.
    pub(crate) fn coeffs_from_padded(&self, samples: &[f64]) -> Vec<Complex64> {
        let n = self.n();
        let m = self.padded_n();
        let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        self.transform(&self.inner.padded, &mut buf, true);
        let scale = 1.0 / self.padded_len() as f64;
        let src = |i: usize| -> [usize; 2] {
            if i < n / 2 {
                [i, usize::MAX]
            } else if i == n / 2 {
                [n / 2, m - n / 2]
            } else {
                [m - (n - i), usize::MAX]
            }
        };
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        match self.dim() {
            1 => {
                for (i, o) in out.iter_mut().enumerate() {
                    for s in src(i) {
                        if s != usize::MAX {
                            *o += buf[s] * scale;
                        }
                    }
                }
            }
            _ => {
                for i0 in 0..n {
                    for i1 in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for s0 in src(i0) {
                            if s0 == usize::MAX {
                                continue;
                            }
                            for s1 in src(i1) {
                                if s1 != usize::MAX {
                                    acc += buf[s0 * m + s1];
                                }
                            }
                        }
                        out[i0 * n + i1] = acc * scale;
                    }
                }
            }
        }
        out
    }

    /// Zeroes every coefficient outside the 2/3 dealiasing disc.
    pub fn dealias(&self, coeffs: &mut [Complex64]) {
        for (c, &keep) in coeffs.iter_mut().zip(self.dealias_mask()) {
            if !keep {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }
}

fn transpose_square(data: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            data.swap(i * m + j, j * m + i);
        }
    }
}
