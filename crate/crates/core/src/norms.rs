//! Sobolev, Besov, Lipschitz and Chemin–Lerner norms.

use thiserror::Error;

use crate::spectral::{gradient, lp, lp_project, lp_project_homogeneous, SpectralField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NormError {
    #[error("exponent {name} = {value} outside [1, ∞]")]
    InvalidExponent { name: &'static str, value: f64 },
    #[error("homogeneous norm of negative order {0} requires a mean-free field")]
    NonzeroMean(f64),
    #[error("trajectory needs at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("trajectory times must be strictly increasing")]
    UnsortedTimes,
    #[error("trajectory fields live on different grids")]
    GridMismatch,
    #[error("Chemin–Lerner norms are defined for Besov specs only")]
    NotBesov,
}

/// Which norm to evaluate. Exponents use `f64::INFINITY` for `∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormSpec {
    Lebesgue(f64),
    Sobolev(f64),
    HomSobolev(f64),
    Besov { s: f64, p: f64, q: f64 },
    HomBesov { s: f64, p: f64, q: f64 },
    LipschitzW1inf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormWarning {
    /// A homogeneous seminorm ignored a nonzero mean.
    MeanDropped,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub value: f64,
    pub warnings: Vec<NormWarning>,
}

fn check_exponent(name: &'static str, value: f64) -> Result<(), NormError> {
    if value >= 1.0 {
        Ok(())
    } else {
        Err(NormError::InvalidExponent { name, value })
    }
}

fn has_mean(f: &SpectralField) -> bool {
    f.coeffs()[0].norm() > 1e-14 * (1.0 + f.l2_norm())
}

/// `‖·‖_{L^p}` of grid samples by the rectangle rule (exact for trigonometric
/// polynomials when `p = 2`).
pub fn lebesgue_samples(samples: &[f64], cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 2.0 {
        (samples.iter().map(|v| v * v).sum::<f64>() * cell).sqrt()
    } else {
        (samples.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
    }
}

fn lebesgue(f: &SpectralField, p: f64) -> f64 {
    if p == 2.0 {
        f.l2_norm()
    } else {
        lebesgue_samples(&f.to_samples(), f.grid().cell_volume(), p)
    }
}

fn weighted_sum(f: &SpectralField, weight: impl Fn(f64) -> f64) -> f64 {
    let s: f64 = f.coeffs().iter().zip(f.grid().radial()).map(|(c, &r)| weight(r) * c.norm_sqr()).sum();
    (s * f.grid().volume()).sqrt()
}

/// ℓ^q combination of nonnegative terms.
fn lq(terms: impl Iterator<Item = f64>, q: f64) -> f64 {
    if q.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        terms.map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// Inhomogeneous block indices `−1..=J` covering the grid's frequencies.
pub fn inhomogeneous_blocks(f: &SpectralField) -> std::ops::RangeInclusive<i32> {
    let r_max = f.grid().radial().iter().fold(0.0f64, |m, &r| m.max(r));
    -1..=lp::top_block(r_max)
}

/// Homogeneous block indices meeting the nonzero grid frequencies.
pub fn homogeneous_blocks(f: &SpectralField) -> std::ops::RangeInclusive<i32> {
    let r_max = f.grid().radial().iter().fold(0.0f64, |m, &r| m.max(r));
    let (lo, hi) = lp::homogeneous_range(f.grid().min_nonzero_xi(), r_max);
    lo..=hi
}

/// Per-block `(weight exponent j, ‖P_j f‖_p)` for inhomogeneous blocks.
fn inhomogeneous_block_norms(f: &SpectralField, p: f64) -> Vec<(i32, f64)> {
    inhomogeneous_blocks(f).map(|j| (j, lebesgue(&lp_project(f, j).expect("j ≥ -1"), p))).collect()
}

fn homogeneous_block_norms(f: &SpectralField, p: f64) -> Vec<(i32, f64)> {
    homogeneous_blocks(f).map(|j| (j, lebesgue(&lp_project_homogeneous(f, j), p))).collect()
}

fn block_weight(j: i32, s: f64, homogeneous: bool) -> f64 {
    if !homogeneous && j < 0 {
        1.0
    } else {
        (s * j as f64).exp2()
    }
}

/// Evaluates a norm, reporting soft warnings.
pub fn norm_report(f: &SpectralField, spec: NormSpec) -> Result<NormReport, NormError> {
    let mut warnings = Vec::new();
    let value = match spec {
        NormSpec::Lebesgue(p) => {
            check_exponent("p", p)?;
            lebesgue(f, p)
        }
        NormSpec::Sobolev(s) => weighted_sum(f, |r| (1.0 + r * r).powf(s)),
        NormSpec::HomSobolev(s) => {
            if has_mean(f) {
                if s < 0.0 {
                    return Err(NormError::NonzeroMean(s));
                }
                warnings.push(NormWarning::MeanDropped);
            }
            weighted_sum(f, |r| if r == 0.0 { 0.0 } else { r.powf(2.0 * s) })
        }
        NormSpec::Besov { s, p, q } => {
            check_exponent("p", p)?;
            check_exponent("q", q)?;
            let blocks = inhomogeneous_block_norms(f, p);
            lq(blocks.into_iter().map(|(j, b)| block_weight(j, s, false) * b), q)
        }
        NormSpec::HomBesov { s, p, q } => {
            check_exponent("p", p)?;
            check_exponent("q", q)?;
            if has_mean(f) {
                if s < 0.0 {
                    return Err(NormError::NonzeroMean(s));
                }
                warnings.push(NormWarning::MeanDropped);
            }
            let blocks = homogeneous_block_norms(f, p);
            lq(blocks.into_iter().map(|(j, b)| block_weight(j, s, true) * b), q)
        }
        NormSpec::LipschitzW1inf => lipschitz(f),
    };
    Ok(NormReport { value, warnings })
}

pub fn norm(f: &SpectralField, spec: NormSpec) -> Result<f64, NormError> {
    norm_report(f, spec).map(|r| r.value)
}

/// `max(‖f‖_∞, max_i ‖∂_i f‖_∞)` over grid samples.
pub fn lipschitz(f: &SpectralField) -> f64 {
    gradient(f).iter().map(SpectralField::max_abs).fold(f.max_abs(), f64::max)
}

/// `‖f‖_{H^s}`, infallible shorthand.
pub fn sobolev(f: &SpectralField, s: f64) -> f64 {
    weighted_sum(f, |r| (1.0 + r * r).powf(s))
}

/// `‖f‖_{Ḣ^s}` seminorm of the mean-free part (`s ≥ 0`).
pub fn hom_sobolev(f: &SpectralField, s: f64) -> f64 {
    weighted_sum(f, |r| if r == 0.0 { 0.0 } else { r.powf(2.0 * s) })
}

/// Time-sampled fields on one grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    fields: Vec<SpectralField>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralField>) -> Result<Self, NormError> {
        if times.len() != fields.len() {
            return Err(NormError::TooFewSamples(times.len().min(fields.len())));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(NormError::UnsortedTimes);
        }
        if let Some(first) = fields.first() {
            if fields.iter().any(|f| f.grid() != first.grid()) {
                return Err(NormError::GridMismatch);
            }
        }
        Ok(Self { times, fields })
    }

    pub fn empty() -> Self {
        Self { times: Vec::new(), fields: Vec::new() }
    }

    /// Appends a sample; `t` must exceed the last time.
    pub fn push(&mut self, t: f64, f: SpectralField) -> Result<(), NormError> {
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(NormError::UnsortedTimes);
            }
            if f.grid() != self.fields[0].grid() {
                return Err(NormError::GridMismatch);
            }
        }
        self.times.push(t);
        self.fields.push(f);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `(∫ |h(t)|^ρ dt)^{1/ρ}` by the trapezoid rule, or the sup for `ρ = ∞`.
fn time_norm(times: &[f64], values: &[f64], rho: f64) -> f64 {
    if rho.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let integral: f64 = times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].abs().powf(rho) + v[1].abs().powf(rho)))
        .sum();
    integral.powf(1.0 / rho)
}

fn besov_parts(spec: NormSpec) -> Result<(f64, f64, f64, bool), NormError> {
    match spec {
        NormSpec::Besov { s, p, q } => Ok((s, p, q, false)),
        NormSpec::HomBesov { s, p, q } => Ok((s, p, q, true)),
        _ => Err(NormError::NotBesov),
    }
}

/// Chemin–Lerner norm: time norm inside each Littlewood–Paley block, then the ℓ^q sum.
pub fn chemin_lerner_norm(traj: &Trajectory, rho_t: f64, spec: NormSpec) -> Result<f64, NormError> {
    let (s, p, q, homogeneous) = besov_parts(spec)?;
    check_exponent("p", p)?;
    check_exponent("q", q)?;
    check_exponent("rho", rho_t)?;
    if traj.len() < 2 {
        return Err(NormError::TooFewSamples(traj.len()));
    }
    let per_time: Vec<Vec<(i32, f64)>> = traj
        .fields()
        .iter()
        .map(|f| if homogeneous { homogeneous_block_norms(f, p) } else { inhomogeneous_block_norms(f, p) })
        .collect();
    let nblocks = per_time[0].len();
    let terms = (0..nblocks).map(|b| {
        let j = per_time[0][b].0;
        let series: Vec<f64> = per_time.iter().map(|row| row[b].1).collect();
        block_weight(j, s, homogeneous) * time_norm(traj.times(), &series, rho_t)
    });
    Ok(lq(terms, q))
}

/// Naive `L^ρ_t B` norm: the static norm first, then the time norm.
pub fn time_lebesgue_norm(traj: &Trajectory, rho_t: f64, spec: NormSpec) -> Result<f64, NormError> {
    besov_parts(spec)?;
    check_exponent("rho", rho_t)?;
    if traj.len() < 2 {
        return Err(NormError::TooFewSamples(traj.len()));
    }
    let values = traj.fields().iter().map(|f| norm(f, spec)).collect::<Result<Vec<_>, _>>()?;
    Ok(time_norm(traj.times(), &values, rho_t))
}
