//! Mean curvature of a graph and the Taylor coefficient.

use crate::spectral::{divergence, gradient, SpectralField};

/// `H₁` as a function of `x = |p|²`: `(1+x)^{-1/2} − 1`, evaluated without cancellation.
pub fn h1(x: f64) -> f64 {
    let s = (1.0 + x).sqrt();
    -x / (s * (1.0 + s))
}

/// `H₁(p)` for gradient samples given componentwise.
pub fn h1_profile(components: &[Vec<f64>]) -> Vec<f64> {
    let len = components.first().map_or(0, Vec::len);
    (0..len).map(|i| h1(components.iter().map(|c| c[i] * c[i]).sum())).collect()
}

/// `H(f) = −Δf − div(∇f H₁(∇f))` split into its parts.
#[derive(Clone, Debug)]
pub struct CurvatureDecomposition {
    /// `−Δf`
    pub linear_part: SpectralField,
    /// `−div(∇f H₁(∇f))`, dealiased.
    pub nonlinear_part: SpectralField,
    pub total: SpectralField,
}

/// Mean curvature `−div(∇f/√(1+|∇f|²))`.
///
/// The flux `∇f H₁(∇f)` is formed on the 3/2-padded grid and dealiased
/// before the divergence; the linear part is exact.
pub fn mean_curvature(f: &SpectralField) -> CurvatureDecomposition {
    let grid = f.grid();
    let linear_part = crate::spectral::apply_radial(f, |r| r * r);
    let grads = gradient(f);
    let mut padded: Vec<Vec<f64>> = Vec::with_capacity(grads.len());
    for g in &grads {
        let mut s = Vec::new();
        grid.to_padded_samples(g.coeffs(), &mut s);
        padded.push(s);
    }
    let profile = h1_profile(&padded);
    let flux: Vec<SpectralField> = padded
        .iter()
        .map(|p| {
            let prod: Vec<f64> = p.iter().zip(&profile).map(|(a, b)| a * b).collect();
            let mut c = grid.coeffs_from_padded(&prod);
            grid.dealias(&mut c);
            SpectralField::from_coeffs(grid, c).expect("grid-sized coefficients")
        })
        .collect();
    let nonlinear_part = divergence(&flux).scaled(-1.0);
    let total = &linear_part + &nonlinear_part;
    CurvatureDecomposition { linear_part, nonlinear_part, total }
}

/// Taylor coefficient samples and their minimum.
#[derive(Clone, Debug)]
pub struct TaylorCoefficient {
    pub samples: Vec<f64>,
    pub a_min: f64,
}

/// `a = (1 − G(f)f)/(1 + |∇f|²)` on the grid.
pub fn taylor_coefficient(f: &SpectralField, gff: &SpectralField) -> TaylorCoefficient {
    let grads: Vec<Vec<f64>> = gradient(f).iter().map(SpectralField::to_samples).collect();
    let g = gff.to_samples();
    let samples: Vec<f64> = g
        .iter()
        .enumerate()
        .map(|(i, gv)| {
            let slope2: f64 = grads.iter().map(|c| c[i] * c[i]).sum();
            (1.0 - gv) / (1.0 + slope2)
        })
        .collect();
    let a_min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    TaylorCoefficient { samples, a_min }
}
