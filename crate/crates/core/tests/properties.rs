//! Property-based checks of the invariants that hold for every input.

use proptest::prelude::*;

use muskat::curvature::mean_curvature;
use muskat::dn::{DnBackend, DnOptions, FixedPointSolver};
use muskat::elliptic::lyapunov_j;
use muskat::evolution::MuskatParams;
use muskat::io::{make_initial, InitConfig, Preset, Snapshot};
use muskat::norms::{norm, sobolev, NormSpec};
use muskat::spectral::{apply_multiplier, fourier_truncate, lp, lp_project, Multiplier, SpectralField, TorusGrid};

fn grid_for(dim: usize) -> TorusGrid {
    TorusGrid::periodic(dim, if dim == 1 { 64 } else { 16 }).unwrap()
}

fn random_field(dim: usize, seed: u64, band: u32, amplitude: f64) -> SpectralField {
    let init = InitConfig { preset: Preset::RandomBand, amplitude, seed, band, ..InitConfig::default() };
    make_initial(&init, &grid_for(dim)).unwrap()
}

fn field_strategy() -> impl Strategy<Value = SpectralField> {
    (1usize..=2, any::<u64>(), 1u32..=20, 0.01f64..2.0).prop_map(|(dim, seed, band, amp)| random_field(dim, seed, band, amp))
}

fn samples_strategy() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1usize..=2).prop_flat_map(|dim| {
        let len = grid_for(dim).len();
        (Just(dim), prop::collection::vec(-10.0f64..10.0, len))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn transform_round_trip_and_parseval((dim, samples) in samples_strategy()) {
        let grid = grid_for(dim);
        let f = SpectralField::from_samples(&grid, &samples).unwrap();
        let back = f.to_samples();
        let scale = samples.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in samples.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-13 * scale);
        }
        let quad: f64 = samples.iter().map(|v| v * v).sum::<f64>() * grid.cell_volume();
        prop_assert!((quad - f.l2_norm().powi(2)).abs() <= 1e-12 * quad.max(1e-300));
        prop_assert!(f.hermitian_defect() <= 1e-13 * scale);
    }

    #[test]
    fn radial_multipliers_commute(f in field_strategy(), z in -3.0f64..0.0, s in 0.0f64..3.0) {
        let a = Multiplier::PoissonSemigroup { z };
        let b = Multiplier::AbsNablaPow(s);
        let ab = apply_multiplier(&apply_multiplier(&f, b).unwrap(), a).unwrap();
        let ba = apply_multiplier(&apply_multiplier(&f, a).unwrap(), b).unwrap();
        prop_assert!((&ab - &ba).l2_norm() <= 1e-14 * ab.l2_norm().max(1e-300));
        // Composition equals the product symbol applied once.
        let direct = muskat::spectral::apply_radial(&f, |r| (z * r).exp() * if r > 0.0 { r.powf(s) } else if s == 0.0 { 1.0 } else { 0.0 });
        prop_assert!((&ab - &direct).l2_norm() <= 1e-14 * ab.l2_norm().max(1e-300));
    }

    #[test]
    fn truncation_is_an_orthogonal_projection(f in field_strategy(), g in field_strategy(), radius in 0.5f64..25.0) {
        prop_assume!(f.grid() == g.grid());
        let sf = fourier_truncate(&f, radius).unwrap();
        let ssf = fourier_truncate(&sf, radius).unwrap();
        prop_assert_eq!(sf.coeffs(), ssf.coeffs());
        let sg = fourier_truncate(&g, radius).unwrap();
        let lhs = sf.inner(&g);
        let rhs = f.inner(&sg);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * f.l2_norm() * g.l2_norm());
        prop_assert!(sf.max_outside(radius) == 0.0);
    }

    #[test]
    fn littlewood_paley_blocks_reconstruct_and_separate(f in field_strategy()) {
        let top = lp::top_block(f.grid().dealias_radius() * 2.0);
        let mut sum = SpectralField::zeros(f.grid());
        let blocks: Vec<SpectralField> = (-1..=top).map(|j| lp_project(&f, j).unwrap()).collect();
        for b in &blocks {
            sum += b;
        }
        prop_assert!((&sum - &f).l2_norm() <= 1e-13 * f.l2_norm());
        for j in -1..=top {
            for l in (j + 2)..=top {
                let pjl = lp_project(&blocks[(l + 1) as usize], j).unwrap();
                prop_assert!(pjl.l2_norm() <= 1e-14 * f.l2_norm());
            }
        }
    }

    #[test]
    fn partition_of_unity(r in 0.0f64..4096.0) {
        let total: f64 = (-1..=lp::top_block(r)).map(|j| lp::block(j, r)).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sobolev_norms_increase_with_s(f in field_strategy(), s1 in -2.0f64..4.0, ds in 0.0f64..3.0) {
        prop_assert!(sobolev(&f, s1 + ds) >= sobolev(&f, s1) * (1.0 - 1e-14));
        let l2 = norm(&f, NormSpec::Lebesgue(2.0)).unwrap();
        prop_assert!((sobolev(&f, 0.0) - l2).abs() <= 1e-12 * l2);
    }

    #[test]
    fn curvature_is_mean_free_and_splits(f in field_strategy(), amp in 0.01f64..0.5) {
        let f = f.scaled(amp / sobolev(&f, 2.0).max(1e-300));
        let h = mean_curvature(&f);
        prop_assert!(h.total.mean().abs() <= 1e-10 * sobolev(&f, 2.0));
        let sum = &h.linear_part + &h.nonlinear_part;
        prop_assert!((&sum - &h.total).l2_norm() <= 1e-12 * h.total.l2_norm().max(1e-300));
    }

    #[test]
    fn curvature_preserves_evenness(seed in any::<u64>(), amp in 0.01f64..0.3) {
        // Even part of a random field: f(x) + f(−x).
        let g = random_field(1, seed, 10, amp);
        let grid = g.grid().clone();
        let s = g.to_samples();
        let n = grid.n();
        let even: Vec<f64> = (0..n).map(|i| 0.5 * (s[i] + s[(n - i) % n])).collect();
        let f = SpectralField::from_samples(&grid, &even).unwrap();
        let h = mean_curvature(&f).total.to_samples();
        let scale = h.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            prop_assert!((h[i] - h[(n - i) % n]).abs() <= 1e-12 * scale);
        }
        // The curvature operator is odd in f, part by part.
        let pos = mean_curvature(&f);
        let neg = mean_curvature(&f.scaled(-1.0));
        prop_assert!((&pos.linear_part + &neg.linear_part).l2_norm() <= 1e-14 * pos.linear_part.l2_norm().max(1e-300));
        prop_assert!((&pos.nonlinear_part + &neg.nonlinear_part).l2_norm() <= 1e-13 * pos.nonlinear_part.l2_norm().max(1e-300));
    }

    #[test]
    fn snapshots_round_trip_exactly(f in field_strategy(), t in 0.0f64..100.0) {
        let snap = Snapshot::from_field(t, &f, &MuskatParams::default());
        let text = serde_json::to_string(&snap).unwrap();
        let back: Snapshot = serde_json::from_str(&text).unwrap();
        let g = back.to_field().unwrap();
        prop_assert_eq!(g.coeffs(), f.coeffs());
        prop_assert_eq!(back.meta.t, t);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn lyapunov_functional_is_nonnegative(seed in any::<u64>(), band in 1u32..=12, size in 0.01f64..0.2) {
        let grid = TorusGrid::periodic(1, 32).unwrap();
        let init = InitConfig { preset: Preset::RandomBand, amplitude: 1.0, seed, band, ..InitConfig::default() };
        let f = make_initial(&init, &grid).unwrap();
        let f = f.scaled(size / sobolev(&f, 2.0));
        let solver = FixedPointSolver::new(&grid, DnOptions { levels: 120, ..DnOptions::default() }).unwrap();
        let gff = solver.apply(&f, &f).unwrap();
        prop_assert!(lyapunov_j(&f, &gff) >= -1e-8 * sobolev(&f, 2.0).powi(2));
        prop_assert!(gff.mean().abs() <= 1e-12);
    }
}
