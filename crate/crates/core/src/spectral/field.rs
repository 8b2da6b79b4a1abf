use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use rustfft::num_complex::Complex64;

use super::{SpectralError, TorusGrid};

/// A real function on the torus, stored as unit-amplitude Fourier coefficients.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: TorusGrid,
    coeffs: Vec<Complex64>,
}

impl PartialEq for SpectralField {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.coeffs == other.coeffs
    }
}

impl SpectralField {
    pub fn zeros(grid: &TorusGrid) -> Self {
        Self { grid: grid.clone(), coeffs: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_coeffs(grid: &TorusGrid, coeffs: Vec<Complex64>) -> Result<Self, SpectralError> {
        if coeffs.len() != grid.len() {
            return Err(SpectralError::LengthMismatch { expected: grid.len(), got: coeffs.len() });
        }
        Ok(Self { grid: grid.clone(), coeffs })
    }

    /// Forward transform of real samples.
    pub fn from_samples(grid: &TorusGrid, samples: &[f64]) -> Result<Self, SpectralError> {
        Ok(Self { grid: grid.clone(), coeffs: grid.forward_real(samples)? })
    }

    pub fn from_fn<F: Fn([f64; 2]) -> f64>(grid: &TorusGrid, func: F) -> Self {
        let samples = grid.sample(func);
        Self::from_samples(grid, &samples).expect("sample count matches grid")
    }

    /// Real samples on the grid.
    pub fn to_samples(&self) -> Vec<f64> {
        self.grid.inverse_real(&self.coeffs)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at an integer wavevector (zero if not representable).
    pub fn coeff(&self, k: [i64; 2]) -> Complex64 {
        self.grid.index_of(k).map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Spatial mean, the `k = 0` coefficient.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn check_grid(&self, other: &SpectralField) -> Result<(), SpectralError> {
        if self.grid != other.grid {
            return Err(SpectralError::GridMismatch);
        }
        Ok(())
    }

    /// `L²` inner product `∫ f g dx = L^d Σ Re(f̂ conj(ĝ))`.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        debug_assert!(self.grid == other.grid);
        let s: f64 = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a * b.conj()).re).sum();
        s * self.grid.volume()
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.coeffs.iter().map(|c| c.norm_sqr()).sum();
        (s * self.grid.volume()).sqrt()
    }

    /// Largest deviation from Hermitian symmetry `f̂(−k) = conj f̂(k)`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let mut worst: f64 = 0.0;
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = g.kvec(i);
            let n = g.n() as i64;
            let mirror = [-k[0], -k[1]].map(|v| if v == -n / 2 { n / 2 } else { v });
            if let Some(j) = g.index_of(mirror) {
                worst = worst.max((c - self.coeffs[j].conj()).norm());
            }
        }
        worst
    }

    /// Largest coefficient magnitude with `|ξ| > radius`.
    pub fn max_outside(&self, radius: f64) -> f64 {
        self.coeffs
            .iter()
            .zip(self.grid.radial())
            .filter(|(_, &r)| r > radius * (1.0 + 1e-12))
            .map(|(c, _)| c.norm())
            .fold(0.0, f64::max)
    }

    /// Membership in `V_R`: coefficients vanish for `|ξ| > R`.
    pub fn in_band(&self, radius: f64) -> bool {
        self.max_outside(radius) == 0.0
    }

    pub fn scale(&mut self, a: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= a);
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) {
        debug_assert!(self.grid == other.grid);
        for (s, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *s += o * a;
        }
    }

    /// Sup norm of the grid samples.
    pub fn max_abs(&self) -> f64 {
        self.to_samples().iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        self.axpy(-1.0, rhs);
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}
