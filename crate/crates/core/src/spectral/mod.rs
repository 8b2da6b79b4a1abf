//! Torus grids, transforms, Fourier multipliers, Littlewood–Paley blocks,
//! truncation and the Poisson semigroup.

mod field;
mod grid;
mod layers;
pub mod lp;
mod multiplier;

use thiserror::Error;

pub use field::SpectralField;
pub use grid::TorusGrid;
pub use layers::{LayeredField, VerticalGrid};
pub use multiplier::{abs_nabla, apply_radial, divergence, gradient, Multiplier};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("Poisson semigroup needs z ≤ 0, got {0}")]
    PositiveDepth(f64),
    #[error("semigroup time must be ≥ 0, got {0}")]
    NegativeTime(f64),
    #[error("Littlewood–Paley index must be ≥ -1, got {0}")]
    InvalidBlock(i32),
    #[error("cutoff radius must be positive, got {0}")]
    InvalidCutoff(f64),
    #[error("axis {0} out of range")]
    InvalidAxis(usize),
    #[error("invalid vertical grid: {0}")]
    InvalidVertical(String),
}

/// Real samples to coefficients.
pub fn forward_transform(grid: &TorusGrid, samples: &[f64]) -> Result<SpectralField, SpectralError> {
    SpectralField::from_samples(grid, samples)
}

pub fn apply_multiplier(field: &SpectralField, m: Multiplier) -> Result<SpectralField, SpectralError> {
    m.apply(field)
}

/// Littlewood–Paley block `P_j` (`j = −1` is the low block `P_{≤0}`).
pub fn lp_project(field: &SpectralField, j: i32) -> Result<SpectralField, SpectralError> {
    if j < -1 {
        return Err(SpectralError::InvalidBlock(j));
    }
    Ok(apply_radial(field, |r| lp::block(j, r)))
}

/// Homogeneous block `Ṗ_j = ψ(2^{-j}|∇|)` for any integer `j`.
pub fn lp_project_homogeneous(field: &SpectralField, j: i32) -> SpectralField {
    apply_radial(field, |r| lp::homogeneous_block(j, r))
}

/// Sharp Fourier truncation `S_R`.
pub fn fourier_truncate(field: &SpectralField, radius: f64) -> Result<SpectralField, SpectralError> {
    Multiplier::SharpCutoff { radius }.apply(field)
}

/// `e^{z|∇|} f` at every level.
pub fn poisson_extend(f: &SpectralField, z: &VerticalGrid) -> LayeredField {
    let levels = z
        .levels()
        .iter()
        .map(|&zl| Multiplier::PoissonSemigroup { z: zl }.apply(f).expect("vertical levels are ≤ 0"))
        .collect();
    LayeredField::from_levels(z, levels).expect("levels match vertical grid")
}
