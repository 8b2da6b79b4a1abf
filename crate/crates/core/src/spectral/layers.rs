use std::sync::Arc;

use super::{Multiplier, SpectralError, SpectralField, TorusGrid};

/// Vertical levels `−Z_max = z_0 < … < z_n = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct VerticalGrid {
    z: Arc<[f64]>,
}

impl VerticalGrid {
    /// Geometric spacing: `intervals` panels whose width grows by `ratio`
    /// moving down from `z = 0`.
    pub fn geometric(intervals: usize, ratio: f64, z_max: f64) -> Result<Self, SpectralError> {
        if intervals < 2 || !(ratio >= 1.0) || !(z_max > 0.0) || !z_max.is_finite() {
            return Err(SpectralError::InvalidVertical(format!(
                "need intervals ≥ 2, ratio ≥ 1, z_max > 0 (got {intervals}, {ratio}, {z_max})"
            )));
        }
        if ratio == 1.0 {
            return Self::uniform(intervals, z_max);
        }
        let h0 = z_max * (ratio - 1.0) / (ratio.powi(intervals as i32) - 1.0);
        let mut z = vec![0.0; intervals + 1];
        let mut depth = 0.0;
        let mut h = h0;
        for i in (0..intervals).rev() {
            depth += h;
            z[i] = -depth;
            h *= ratio;
        }
        z[0] = -z_max;
        Self::from_levels(z)
    }

    pub fn uniform(intervals: usize, z_max: f64) -> Result<Self, SpectralError> {
        if intervals < 2 || !(z_max > 0.0) {
            return Err(SpectralError::InvalidVertical(format!("need intervals ≥ 2 and z_max > 0 (got {intervals}, {z_max})")));
        }
        let z = (0..=intervals).map(|i| -z_max + z_max * i as f64 / intervals as f64).collect::<Vec<_>>();
        Self::from_levels(z)
    }

    pub fn from_levels(mut z: Vec<f64>) -> Result<Self, SpectralError> {
        if z.len() < 2 {
            return Err(SpectralError::InvalidVertical("at least two levels required".into()));
        }
        if z.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(SpectralError::InvalidVertical("levels must be strictly ascending".into()));
        }
        let top = *z.last().expect("nonempty");
        if top.abs() > 1e-12 {
            return Err(SpectralError::InvalidVertical(format!("top level must be 0, got {top}")));
        }
        *z.last_mut().expect("nonempty") = 0.0;
        Ok(Self { z: z.into() })
    }

    pub fn levels(&self) -> &[f64] {
        &self.z
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn z_max(&self) -> f64 {
        -self.z[0]
    }

    /// Tail truncation `e^{-k_min Z_max}` must be negligible: `Z_max ≥ 20/k_min`.
    pub fn check_depth(&self, grid: &TorusGrid) -> Result<(), SpectralError> {
        let need = 20.0 / grid.min_nonzero_xi();
        if self.z_max() < need {
            return Err(SpectralError::InvalidVertical(format!("Z_max = {} below 20/k_min = {need}", self.z_max())));
        }
        Ok(())
    }

    /// Same depth, twice the panels, ratio square-rooted: the refinement used in convergence studies.
    pub fn refined(&self, ratio: f64) -> Result<Self, SpectralError> {
        Self::geometric(2 * (self.len() - 1), ratio.sqrt(), self.z_max())
    }
}

/// A function of `(x, z)`: one [`SpectralField`] per vertical level.
#[derive(Clone, Debug)]
pub struct LayeredField {
    z: VerticalGrid,
    levels: Vec<SpectralField>,
}

impl LayeredField {
    pub fn zeros(grid: &TorusGrid, z: &VerticalGrid) -> Self {
        Self { z: z.clone(), levels: vec![SpectralField::zeros(grid); z.len()] }
    }

    pub fn from_levels(z: &VerticalGrid, levels: Vec<SpectralField>) -> Result<Self, SpectralError> {
        if levels.len() != z.len() {
            return Err(SpectralError::LengthMismatch { expected: z.len(), got: levels.len() });
        }
        if let Some(first) = levels.first() {
            for l in &levels[1..] {
                first.check_grid(l)?;
            }
        }
        Ok(Self { z: z.clone(), levels })
    }

    pub fn vertical(&self) -> &VerticalGrid {
        &self.z
    }

    pub fn grid(&self) -> &TorusGrid {
        self.levels[0].grid()
    }

    pub fn levels(&self) -> &[SpectralField] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> &SpectralField {
        &self.levels[i]
    }

    /// Level at `z = 0`.
    pub fn top(&self) -> &SpectralField {
        self.levels.last().expect("at least two levels")
    }

    /// Applies a multiplier level by level.
    pub fn map(&self, m: Multiplier) -> Result<Self, SpectralError> {
        let levels = self.levels.iter().map(|l| m.apply(l)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { z: self.z.clone(), levels })
    }

    /// Largest per-level `L²` norm.
    pub fn sup_l2(&self) -> f64 {
        self.levels.iter().map(SpectralField::l2_norm).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_levels() {
        let v = VerticalGrid::geometric(200, 1.05, 40.0).unwrap();
        let z = v.levels();
        assert_eq!(z.len(), 201);
        assert_eq!(z[200], 0.0);
        assert_eq!(z[0], -40.0);
        let h_top = z[200] - z[199];
        let h_next = z[199] - z[198];
        assert!((h_next / h_top - 1.05).abs() < 1e-9);
        assert!((z[1] - z[0]) > (z[200] - z[199]));
        let g = TorusGrid::periodic(1, 16).unwrap();
        assert!(v.check_depth(&g).is_ok());
        assert!(VerticalGrid::geometric(200, 1.05, 10.0).unwrap().check_depth(&g).is_err());
    }

    #[test]
    fn rejects_bad_levels() {
        assert!(VerticalGrid::from_levels(vec![-1.0, -2.0, 0.0]).is_err());
        assert!(VerticalGrid::from_levels(vec![-1.0, -0.5]).is_err());
        assert!(VerticalGrid::from_levels(vec![-1.0, 0.5]).is_err());
    }
}
