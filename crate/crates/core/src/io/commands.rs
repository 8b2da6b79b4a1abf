use std::path::{Path, PathBuf};

use serde_json::json;

use crate::diagnostics::{bootstrap_from_rows, contraction_experiment, dissipation_split, fit_decay_rate, lipschitz_decay};
use crate::dn::{DnBackend, FixedPointSolver};
use crate::elliptic::{lyapunov_j, lyapunov_j_quadratic, EllipticSolver};
use crate::evolution::{run, Model, RunOutcome};
use crate::norms::{hom_sobolev, lipschitz, norm, sobolev, NormSpec};
use crate::spectral::{abs_nabla, SpectralField, TorusGrid};

use super::config::{BackendKind, InitConfig, RunConfig};
use super::output::{write_file, write_snapshot, CsvSink, Manifest, Snapshot};
use super::presets::{cosine, make_initial, Preset};
use super::IoError;

/// A constructed DN backend of either kind.
#[allow(clippy::large_enum_variant)] // built once per command
pub enum Backend {
    FixedPoint(FixedPointSolver),
    Elliptic(EllipticSolver),
}

impl Backend {
    pub fn as_dyn(&self) -> &dyn DnBackend {
        match self {
            Backend::FixedPoint(s) => s,
            Backend::Elliptic(s) => s,
        }
    }
}

pub fn build_backend(cfg: &RunConfig, grid: &TorusGrid) -> Result<Backend, IoError> {
    Ok(match cfg.dn.backend {
        BackendKind::FixedPoint => Backend::FixedPoint(FixedPointSolver::new(grid, cfg.dn.fixed_point.clone())?),
        BackendKind::Elliptic => Backend::Elliptic(EllipticSolver::new(grid, cfg.dn.elliptic.clone())?),
    })
}

/// What a command wrote and a JSON summary of its result.
#[derive(Clone, Debug)]
pub struct CommandOutcome {
    pub files: Vec<PathBuf>,
    pub summary: serde_json::Value,
}

fn finish(command: &str, cfg: &RunConfig, mut files: Vec<PathBuf>, summary: serde_json::Value) -> Result<CommandOutcome, IoError> {
    let dir = &cfg.output.dir;
    let mut manifest = Manifest::new(command, cfg);
    manifest.files = files.iter().filter_map(|p| p.strip_prefix(dir).ok().map(|q| q.display().to_string())).collect();
    manifest.outcome = summary.clone();
    files.push(manifest.write(dir)?);
    Ok(CommandOutcome { files, summary })
}

fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf, IoError> {
    let path = dir.join(name);
    write_file(&path, &serde_json::to_string_pretty(value).map_err(|e| IoError::Parse(e.to_string()))?)?;
    Ok(path)
}

fn summarize_run(out: &RunOutcome) -> serde_json::Value {
    let rows = &out.rows;
    let t: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let l2: Vec<f64> = rows.iter().map(|r| r.l2).collect();
    let t_end = out.final_state.t;
    let fit = fit_decay_rate(&t, &l2, (0.2 * t_end, t_end)).ok();
    json!({
        "completed": out.completed(),
        "error": out.error.as_ref().map(|e| e.to_string()),
        "steps": out.steps,
        "t_reached": t_end,
        "rows": rows.len(),
        "l2_initial": l2.first(),
        "l2_final": l2.last(),
        "decay_rate": fit.map(|f| f.rate),
        "decay_r_squared": fit.map(|f| f.r_squared),
        "bootstrap_sup_ratio": bootstrap_from_rows(rows).sup_ratio,
        "dissipation_constant": dissipation_split(rows).constant,
        "lipschitz_decayed": lipschitz_decay(rows).decayed(),
        "min_a": rows.iter().map(|r| r.a_min).fold(f64::INFINITY, f64::min),
        "max_gff": rows.iter().map(|r| r.max_gff).fold(f64::NEG_INFINITY, f64::max),
        "max_abs_mean": rows.iter().map(|r| r.mean.abs()).fold(0.0, f64::max),
        "in_band": out.final_state.in_vr,
    })
}

/// `run`: evolves the configured initial data, streaming `diagnostics.csv` and
/// optional snapshots into the output directory. The outputs are written even
/// when the run stops early; the error is returned afterwards.
pub fn run_evolution(cfg: &RunConfig) -> Result<CommandOutcome, IoError> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let backend = build_backend(cfg, &grid)?;
    let model = Model::new(&grid, cfg.params.clone(), backend.as_dyn(), cfg.stepper.nonlinearity)?;
    let f0 = make_initial(&cfg.init, &grid)?;
    let dir = cfg.output.dir.clone();
    let csv_path = dir.join("diagnostics.csv");
    let mut sink = CsvSink::create(&csv_path)?;
    let mut files = vec![csv_path];
    let mut write_error: Option<IoError> = None;
    let mut index = 0usize;
    let out = run(&f0, &model, &cfg.stepper, &cfg.run_spec(false), |state, row| {
        if write_error.is_some() {
            return;
        }
        let mut result = sink.push(row);
        if result.is_ok() && cfg.output.snapshots {
            let path = dir.join(format!("snapshot_{index:05}.json"));
            result = write_snapshot(&path, &Snapshot::from_field(state.t, &state.f, &cfg.params));
            files.push(path);
        }
        index += 1;
        if let Err(e) = result {
            write_error = Some(e);
        }
    });
    if let Some(e) = write_error {
        return Err(e);
    }
    sink.finish()?;
    let summary = summarize_run(&out);
    let outcome = finish("run", cfg, files, summary)?;
    match out.error {
        Some(e) => Err(e.into()),
        None => Ok(outcome),
    }
}

fn random_field(grid: &TorusGrid, seed: u64, amplitude: f64) -> Result<SpectralField, IoError> {
    make_initial(&InitConfig { preset: Preset::RandomBand, amplitude, seed, band: 8, ..InitConfig::default() }, grid)
}

/// `dn-check`: one DN solve at the initial data with residual history (fixed point),
/// the flat-interface exactness check and a self-adjointness defect.
pub fn dn_check(cfg: &RunConfig) -> Result<CommandOutcome, IoError> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let backend = build_backend(cfg, &grid)?;
    let f = make_initial(&cfg.init, &grid)?;
    let zero = SpectralField::zeros(&grid);
    let g1 = random_field(&grid, cfg.init.seed.wrapping_add(1), 1.0)?;
    let g2 = random_field(&grid, cfg.init.seed.wrapping_add(2), 1.0)?;
    let be = backend.as_dyn();
    let flat = be.apply(&zero, &g1)?;
    let flat_defect = (&flat - &abs_nabla(&g1)).l2_norm() / g1.l2_norm();
    let outs = be.apply_many(&f, &[&f, &g1, &g2])?;
    let sa_defect = (outs[1].inner(&g2) - g1.inner(&outs[2])).abs() / (g1.l2_norm() * g2.l2_norm());
    let (iterations, history) = match &backend {
        Backend::FixedPoint(s) => {
            let sol = s.solve(&f, &f)?;
            (Some(sol.iterations), sol.residual_history)
        }
        Backend::Elliptic(_) => (None, Vec::new()),
    };
    let ratios: Vec<f64> = history.windows(2).map(|w| w[1] / w[0]).collect();
    let a = crate::curvature::taylor_coefficient(&f, &outs[0]);
    let summary = json!({
        "backend": be.name(),
        "iterations": iterations,
        "residual_history": history,
        "residual_ratios": ratios,
        "flat_relative_defect": flat_defect,
        "self_adjoint_defect": sa_defect,
        "l2_gff": outs[0].l2_norm(),
        "remainder_relative": (&outs[0] - &abs_nabla(&f)).l2_norm() / abs_nabla(&f).l2_norm().max(f64::MIN_POSITIVE),
        "a_min": a.a_min,
    });
    let path = write_json(&cfg.output.dir, "dn_check.json", &summary)?;
    finish("dn-check", cfg, vec![path], summary)
}

/// `oracle-compare`: fixed-point against elliptic backend on `G(f) cos(kx)` at the
/// configured and at doubled vertical resolutions, with the observed order.
pub fn oracle_compare(cfg: &RunConfig) -> Result<CommandOutcome, IoError> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let f = make_initial(&cfg.init, &grid)?;
    let g = cosine(&grid, cfg.scan.oracle_mode, 1.0);
    let compare = |fp_opts: &crate::dn::DnOptions, strip: &crate::elliptic::StripOptions| -> Result<f64, IoError> {
        let a = FixedPointSolver::new(&grid, fp_opts.clone())?.apply(&f, &g)?;
        let b = EllipticSolver::new(&grid, strip.clone())?.apply(&f, &g)?;
        Ok((&a - &b).l2_norm() / b.l2_norm())
    };
    let coarse = compare(&cfg.dn.fixed_point, &cfg.dn.elliptic)?;
    let fine = compare(&cfg.dn.fixed_point.refined(), &cfg.dn.elliptic.refined())?;
    let summary = json!({
        "discrepancy": coarse,
        "discrepancy_refined": fine,
        "observed_order": (coarse / fine).log2(),
    });
    let path = write_json(&cfg.output.dir, "oracle_compare.json", &summary)?;
    finish("oracle-compare", cfg, vec![path], summary)
}

/// `lyapunov-scan`: `J(f)` against its quadratic part and `‖f‖²_{H²}` over seeded
/// random fields at each configured amplitude.
pub fn lyapunov_scan(cfg: &RunConfig) -> Result<CommandOutcome, IoError> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let backend = build_backend(cfg, &grid)?;
    let mut csv = String::from("amplitude,seed,J,J_quadratic,H2sq,ratio\n");
    let mut min_ratio = f64::INFINITY;
    for &amp in &cfg.scan.amplitudes {
        for i in 0..cfg.scan.samples as u64 {
            let seed = cfg.init.seed.wrapping_add(i);
            let f = random_field(&grid, seed, amp)?;
            let gff = backend.as_dyn().apply(&f, &f)?;
            let j = lyapunov_j(&f, &gff);
            let h2 = sobolev(&f, 2.0).powi(2);
            let ratio = j / h2;
            min_ratio = min_ratio.min(ratio);
            csv.push_str(&format!("{amp:.16e},{seed},{j:.16e},{:.16e},{h2:.16e},{ratio:.16e}\n", lyapunov_j_quadratic(&f)));
        }
    }
    let path = cfg.output.dir.join("lyapunov_scan.csv");
    write_file(&path, &csv)?;
    let summary = json!({ "min_j_over_h2": min_ratio, "nonnegative": min_ratio >= -1e-8 });
    finish("lyapunov-scan", cfg, vec![path], summary)
}

/// `contraction`: distance between runs from `f₀` and `f₀ + δ cos 2x`, for `δ` and `δ/2`.
pub fn contraction(cfg: &RunConfig) -> Result<CommandOutcome, IoError> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let backend = build_backend(cfg, &grid)?;
    let model = Model::new(&grid, cfg.params.clone(), backend.as_dyn(), cfg.stepper.nonlinearity)?;
    let f0 = make_initial(&cfg.init, &grid)?;
    let rs = cfg.run_spec(true);
    let delta = cfg.scan.perturbation;
    let full = contraction_experiment(&f0, &(&f0 + &cosine(&grid, 2, delta)), &model, &cfg.stepper, &rs)?;
    let half = contraction_experiment(&f0, &(&f0 + &cosine(&grid, 2, delta / 2.0)), &model, &cfg.stepper, &rs)?;
    let end = |r: &crate::diagnostics::ContractionReport| r.distances.last().copied().unwrap_or(0.0);
    let summary = json!({
        "max_ratio": full.max_ratio,
        "ratio_at_t": full.ratio_at_t,
        "terminal_distance": end(&full),
        "terminal_distance_half": end(&half),
        "halving_ratio": end(&half) / end(&full),
        "times": full.times,
        "distances": full.distances,
    });
    let path = write_json(&cfg.output.dir, "contraction.json", &summary)?;
    finish("contraction", cfg, vec![path], summary)
}

/// `norms`: norm table of the initial data.
pub fn norms_table(cfg: &RunConfig) -> Result<CommandOutcome, IoError> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let f = make_initial(&cfg.init, &grid)?;
    let s = cfg.time.s_norm;
    let besov = |spec| norm(&f, spec).map_err(|e| IoError::Parse(e.to_string()));
    let summary = json!({
        "L2": f.l2_norm(),
        "Linf": besov(NormSpec::Lebesgue(f64::INFINITY))?,
        "Hhalf": hom_sobolev(&f, 0.5),
        "H3half": hom_sobolev(&f, 1.5),
        "H2": sobolev(&f, 2.0),
        "Hs": sobolev(&f, s),
        "s": s,
        "B_1_inf_1": besov(NormSpec::Besov { s: 1.0, p: f64::INFINITY, q: 1.0 })?,
        "B_s_2_2": besov(NormSpec::Besov { s, p: 2.0, q: 2.0 })?,
        "Lip": lipschitz(&f),
        "mean": f.mean(),
    });
    let path = write_json(&cfg.output.dir, "norms.json", &summary)?;
    finish("norms", cfg, vec![path], summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(dir: &Path) -> RunConfig {
        let mut cfg = RunConfig::default();
        cfg.grid.n = 16;
        cfg.dn.fixed_point.levels = 60;
        cfg.time.t_final = 0.02;
        cfg.stepper.dt = 0.005;
        cfg.output.cadence = 1;
        cfg.output.dir = dir.to_path_buf();
        cfg
    }

    #[test]
    fn run_writes_one_row_per_cadence_point_and_a_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path());
        cfg.output.snapshots = true;
        let out = run_evolution(&cfg).unwrap();
        let csv = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 5);
        assert!(dir.path().join("snapshot_00004.json").exists());
        let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["command"], "run");
        assert_eq!(manifest["config"]["grid"]["n"], 16);
        assert!(out.summary["completed"].as_bool().unwrap());
    }

    #[test]
    fn identical_configs_give_identical_csv_bytes() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let mut ca = small(a.path());
        ca.init.preset = Preset::RandomBand;
        ca.init.seed = 3;
        let mut cb = ca.clone();
        cb.output.dir = b.path().to_path_buf();
        run_evolution(&ca).unwrap();
        run_evolution(&cb).unwrap();
        let x = std::fs::read(a.path().join("diagnostics.csv")).unwrap();
        let y = std::fs::read(b.path().join("diagnostics.csv")).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn norms_command_reports_the_cosine_l2() {
        let dir = tempfile::tempdir().unwrap();
        let out = norms_table(&small(dir.path())).unwrap();
        let l2 = out.summary["L2"].as_f64().unwrap();
        assert!((l2 - 0.01 * std::f64::consts::PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn invalid_config_maps_to_exit_code_two() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path());
        cfg.stepper.dt = -1.0;
        assert_eq!(run_evolution(&cfg).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn large_data_maps_to_exit_code_three() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small(dir.path());
        cfg.init.amplitude = 3.0;
        cfg.init.mode = 3;
        let err = dn_check(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 3, "{err}");
    }
}
