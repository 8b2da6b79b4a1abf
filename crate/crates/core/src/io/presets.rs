use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::spectral::{SpectralField, TorusGrid};

use super::config::InitConfig;
use super::IoError;

/// Named initial interfaces. Every preset is mean-free and band-limited to the dealiasing radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `A cos(k x₁)`
    #[default]
    SingleMode,
    /// `A (cos x₁ + cos 2x₁)`, scaled by the fundamental wavenumber.
    TwoMode,
    /// Seeded random Fourier coefficients on `1 ≤ |k| ≤ band`, decaying like `1/(1+|k|²)`,
    /// scaled to `max |f| = A`.
    RandomBand,
    /// Periodized Gaussian centred in the cell, mean removed, scaled to `max |f| = A`.
    GaussianBump,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::SingleMode, Preset::TwoMode, Preset::RandomBand, Preset::GaussianBump];

    pub fn name(self) -> &'static str {
        match self {
            Preset::SingleMode => "single_mode",
            Preset::TwoMode => "two_mode",
            Preset::RandomBand => "random_band",
            Preset::GaussianBump => "gaussian_bump",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = IoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| IoError::UnknownPreset(s.to_string()))
    }
}

/// The small-data preset used for the bootstrap check: seeded random band, amplitude 0.01.
pub fn epsilon0_preset() -> InitConfig {
    InitConfig { preset: Preset::RandomBand, amplitude: 0.01, seed: 2024, band: 6, ..InitConfig::default() }
}

fn band_limit(f: &mut SpectralField) {
    let cut = f.grid().n() as f64 / 3.0 + 1e-9;
    let grid = f.grid().clone();
    for (idx, c) in f.coeffs_mut().iter_mut().enumerate() {
        let k = grid.kvec(idx);
        if ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt() > cut {
            *c = Complex64::new(0.0, 0.0);
        }
    }
    f.coeffs_mut()[0] = Complex64::new(0.0, 0.0);
}

fn scale_to_max(mut f: SpectralField, amplitude: f64) -> SpectralField {
    let peak = f.to_samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        f.scale(amplitude / peak);
    }
    f
}

/// Builds the configured initial interface.
pub fn make_initial(init: &InitConfig, grid: &TorusGrid) -> Result<SpectralField, IoError> {
    if !(init.amplitude > 0.0 && init.amplitude.is_finite()) {
        return Err(IoError::Invalid(vec![super::Violation::new("init.amplitude", format!("must be positive, got {}", init.amplitude))]));
    }
    let limit = grid.n() as f64 / 3.0;
    let a = init.amplitude;
    let dk = grid.dk();
    let mut f = match init.preset {
        Preset::SingleMode => {
            if init.mode as f64 > limit {
                return Err(IoError::Invalid(vec![super::Violation::new("init.mode", format!("must be ≤ N/3 = {limit:.0}, got {}", init.mode))]));
            }
            let k = init.mode as f64 * dk;
            SpectralField::from_fn(grid, |x| a * (k * x[0]).cos())
        }
        Preset::TwoMode => SpectralField::from_fn(grid, |x| a * ((dk * x[0]).cos() + (2.0 * dk * x[0]).cos())),
        Preset::RandomBand => {
            let mut rng = ChaCha8Rng::seed_from_u64(init.seed);
            let band = (init.band as f64).min(limit);
            let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
            for idx in 0..grid.len() {
                let k = grid.kvec(idx);
                // One representative per ±k pair: the lexicographically positive one.
                if !(k[0] > 0 || (k[0] == 0 && k[1] > 0)) {
                    continue;
                }
                let r = ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt();
                if r > band {
                    continue;
                }
                let amp = 1.0 / (1.0 + r * r);
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * amp;
                coeffs[idx] = c;
                if let Some(j) = grid.index_of([-k[0], -k[1]]) {
                    coeffs[j] = c.conj();
                }
            }
            SpectralField::from_coeffs(grid, coeffs).expect("length matches the grid")
        }
        Preset::GaussianBump => {
            let l = grid.period();
            let w2 = 2.0 * init.width * init.width;
            let dim = grid.dim();
            SpectralField::from_fn(grid, |x| {
                let mut total = 0.0;
                let images: i32 = 3;
                let range = |d: usize| if d < dim { -images..=images } else { 0..=0 };
                for i in range(0) {
                    for j in range(1) {
                        let dx = x[0] - l / 2.0 + i as f64 * l;
                        let dy = if dim > 1 { x[1] - l / 2.0 + j as f64 * l } else { 0.0 };
                        total += (-(dx * dx + dy * dy) / w2).exp();
                    }
                }
                total
            })
        }
    };
    band_limit(&mut f);
    Ok(match init.preset {
        Preset::SingleMode | Preset::TwoMode => f,
        _ => scale_to_max(f, a),
    })
}

/// `cos(k x₁)` at physical wavenumber `k·2π/L`.
pub fn cosine(grid: &TorusGrid, k: u32, amplitude: f64) -> SpectralField {
    let xi = k as f64 * 2.0 * PI / grid.period();
    SpectralField::from_fn(grid, |x| amplitude * (xi * x[0]).cos())
}
