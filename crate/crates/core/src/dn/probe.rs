use crate::norms::sobolev;
use crate::spectral::SpectralField;

use super::{DnError, FixedPointSolver};

/// Lipschitz quotient of the remainder in the interface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProbeResult {
    /// `‖R(f₁;g) − R(f₂;g)‖_{H^{σ−1}} / (‖f₁ − f₂‖_{H^s} ‖g‖_{H^σ})`
    pub ratio: f64,
    /// Set when the quotient was 0/0 (identical interfaces or zero data).
    pub degenerate: bool,
}

pub fn dn_contraction_probe(
    solver: &FixedPointSolver,
    f1: &SpectralField,
    f2: &SpectralField,
    g: &SpectralField,
    s: f64,
    sigma: f64,
) -> Result<ProbeResult, DnError> {
    let r1 = solver.solve(f1, g)?.remainder;
    let r2 = solver.solve(f2, g)?.remainder;
    let num = sobolev(&(&r1 - &r2), sigma - 1.0);
    let den = sobolev(&(f1 - f2), s) * sobolev(g, sigma);
    if den == 0.0 {
        return Ok(ProbeResult { ratio: 0.0, degenerate: true });
    }
    Ok(ProbeResult { ratio: num / den, degenerate: false })
}
