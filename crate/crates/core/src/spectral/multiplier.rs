use rustfft::num_complex::Complex64;

use super::{lp, SpectralError, SpectralField};

/// Fourier multipliers acting on [`SpectralField`]s.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Multiplier {
    /// `|ξ|`
    AbsNabla,
    /// `|ξ|^s`; for `s < 0` the `ξ = 0` symbol is set to 0.
    AbsNablaPow(f64),
    /// `e^{z|ξ|}`, `z ≤ 0`.
    PoissonSemigroup { z: f64 },
    /// `1_{|ξ| ≤ R}`
    SharpCutoff { radius: f64 },
    /// `ψ(2^{-j}ξ)`, `j ≥ 0`.
    LpBlock(i32),
    /// Low block `φ(2ξ)`
    LpLow,
    /// `|ξ|(1 + |ξ|²)`
    OperatorA,
    /// `e^{-t|ξ|(1+|ξ|²)}`, `t ≥ 0`.
    SemigroupA { t: f64 },
    /// `i ξ_axis`, zeroed on the Nyquist line.
    Gradient(usize),
    /// `−|ξ|²`
    Laplacian,
}

impl Multiplier {
    pub fn validate(&self) -> Result<(), SpectralError> {
        match *self {
            Multiplier::PoissonSemigroup { z } if !(z <= 0.0) => Err(SpectralError::PositiveDepth(z)),
            Multiplier::SemigroupA { t } if !(t >= 0.0) => Err(SpectralError::NegativeTime(t)),
            Multiplier::LpBlock(j) if j < 0 => Err(SpectralError::InvalidBlock(j)),
            Multiplier::SharpCutoff { radius } if !(radius > 0.0) => Err(SpectralError::InvalidCutoff(radius)),
            Multiplier::Gradient(axis) if axis > 1 => Err(SpectralError::InvalidAxis(axis)),
            _ => Ok(()),
        }
    }

    pub fn is_radial(&self) -> bool {
        !matches!(self, Multiplier::Gradient(_))
    }

    /// Continuous symbol at wavevector `xi` (ignores the Nyquist convention).
    pub fn symbol(&self, xi: [f64; 2]) -> Complex64 {
        let r = (xi[0] * xi[0] + xi[1] * xi[1]).sqrt();
        let real = match *self {
            Multiplier::AbsNabla => r,
            Multiplier::AbsNablaPow(s) => {
                if r == 0.0 {
                    if s == 0.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    r.powf(s)
                }
            }
            Multiplier::PoissonSemigroup { z } => (z * r).exp(),
            Multiplier::SharpCutoff { radius } => {
                if r <= radius * (1.0 + 1e-12) {
                    1.0
                } else {
                    0.0
                }
            }
            Multiplier::LpBlock(j) => lp::block(j, r),
            Multiplier::LpLow => lp::low(r),
            Multiplier::OperatorA => r * (1.0 + r * r),
            Multiplier::SemigroupA { t } => (-t * r * (1.0 + r * r)).exp(),
            Multiplier::Gradient(axis) => return Complex64::new(0.0, xi[axis]),
            Multiplier::Laplacian => -r * r,
        };
        Complex64::new(real, 0.0)
    }

    /// Multiplies every coefficient by the symbol, in place.
    pub fn apply_in_place(&self, field: &mut SpectralField) -> Result<(), SpectralError> {
        self.validate()?;
        let grid = field.grid().clone();
        match *self {
            Multiplier::Gradient(axis) => {
                if axis >= grid.dim() {
                    return Err(SpectralError::InvalidAxis(axis));
                }
                for (i, c) in field.coeffs_mut().iter_mut().enumerate() {
                    *c = if grid.is_nyquist(i, axis) { Complex64::new(0.0, 0.0) } else { *c * Complex64::new(0.0, grid.xi(i)[axis]) };
                }
            }
            _ => {
                for (i, c) in field.coeffs_mut().iter_mut().enumerate() {
                    *c *= self.symbol(grid.xi(i)).re;
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, field: &SpectralField) -> Result<SpectralField, SpectralError> {
        let mut out = field.clone();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }
}

/// Applies a radial symbol given as a function of `|ξ|`.
pub fn apply_radial<F: Fn(f64) -> f64>(field: &SpectralField, symbol: F) -> SpectralField {
    let mut out = field.clone();
    let radial = field.grid().radial().to_vec();
    for (c, r) in out.coeffs_mut().iter_mut().zip(radial) {
        *c *= symbol(r);
    }
    out
}

/// `|∇|` applied to a field.
pub fn abs_nabla(field: &SpectralField) -> SpectralField {
    apply_radial(field, |r| r)
}

/// Gradient components (`d` of them).
pub fn gradient(field: &SpectralField) -> Vec<SpectralField> {
    (0..field.grid().dim()).map(|a| Multiplier::Gradient(a).apply(field).expect("axis within dimension")).collect()
}

/// Divergence of a vector field given by components.
pub fn divergence(components: &[SpectralField]) -> SpectralField {
    let mut out = SpectralField::zeros(components[0].grid());
    for (a, c) in components.iter().enumerate() {
        out += &Multiplier::Gradient(a).apply(c).expect("axis within dimension");
    }
    out
}
