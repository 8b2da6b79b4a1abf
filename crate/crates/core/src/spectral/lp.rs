//! Littlewood–Paley bump pair.
//!
//! `bump` is a smooth radial profile equal to 1 on `|ξ| ≤ 5/4` and 0 on
//! `|ξ| ≥ 8/5`; `annulus(ξ) = bump(ξ) − bump(2ξ)` is supported in
//! `5/8 ≤ |ξ| ≤ 8/5`. Dyadic blocks are `annulus(2^{-j} ξ)` for `j ≥ 0`; the low
//! block is `bump(2ξ)`, so that the blocks telescope to exactly 1.

pub const INNER: f64 = 5.0 / 4.0;
pub const OUTER: f64 = 8.0 / 5.0;

fn flat_exp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth step from 1 (at `r ≤ 5/4`) to 0 (at `r ≥ 8/5`), `C^∞` everywhere.
pub fn bump(r: f64) -> f64 {
    if r <= INNER {
        return 1.0;
    }
    if r >= OUTER {
        return 0.0;
    }
    let t = (r - INNER) / (OUTER - INNER);
    let up = flat_exp(1.0 - t);
    up / (up + flat_exp(t))
}

/// Low-frequency symbol `φ(2r)`, supported in `|ξ| ≤ 4/5`.
pub fn low(r: f64) -> f64 {
    bump(2.0 * r)
}

/// `ψ(r) = φ(r) − φ(2r)`.
pub fn annulus(r: f64) -> f64 {
    bump(r) - bump(2.0 * r)
}

/// Symbol of block `j`: `φ(2·)` for `j = −1`, `ψ(2^{-j}·)` for `j ≥ 0`.
/// Negative `j < −1` yields the homogeneous block `ψ(2^{-j}·)`.
pub fn block(j: i32, r: f64) -> f64 {
    if j == -1 {
        low(r)
    } else {
        annulus(r * (-(j as f64)).exp2())
    }
}

/// Homogeneous block `ψ(2^{-j}·)` for any integer `j`.
pub fn homogeneous_block(j: i32, r: f64) -> f64 {
    annulus(r * (-(j as f64)).exp2())
}

/// Highest inhomogeneous block index touching `|ξ| ≤ r_max`.
pub fn top_block(r_max: f64) -> i32 {
    if r_max < 5.0 / 8.0 {
        return -1;
    }
    ((r_max * 8.0 / 5.0).log2().ceil() as i32).max(0)
}

/// Range of homogeneous blocks whose support meets `[r_min, r_max]`, `r_min > 0`.
pub fn homogeneous_range(r_min: f64, r_max: f64) -> (i32, i32) {
    let lo = (r_min * 5.0 / 8.0).log2().floor() as i32;
    let hi = (r_max * 8.0 / 5.0).log2().ceil() as i32;
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_profile() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.25), 1.0);
        assert_eq!(bump(1.6), 0.0);
        let mid = bump(0.5 * (INNER + OUTER));
        assert!((mid - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let r = INNER + (OUTER - INNER) * i as f64 / 1000.0;
            let v = bump(r);
            assert!(v <= prev + 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn unit_mode_sits_in_block_zero() {
        assert_eq!(block(0, 1.0), 1.0);
        assert_eq!(block(1, 1.0), 0.0);
        assert_eq!(block(-1, 1.0), 0.0);
        assert_eq!(block(-1, 0.5), 1.0);
    }

    #[test]
    fn blocks_telescope_to_one() {
        for i in 0..1000 {
            let r = 1e-3 + 300.0 * i as f64 / 999.0;
            let total: f64 = (-1..=top_block(r)).map(|j| block(j, r)).sum();
            assert!((total - 1.0).abs() <= 1e-12, "r={r}: {total}");
        }
    }
}
