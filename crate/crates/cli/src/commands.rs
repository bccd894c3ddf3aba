//! Subcommand bodies. Each returns the rendered report and whether every
//! applicable check passed.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write as _};

use aps_core::aps2d::{self, Aps2dProblem, BoundaryData, SolverControls};
use aps_core::conditions::{self, ConditionReport};
use aps_core::energies::{Compressibility, K2Expectation};
use aps_core::fem3d::{self, Fem3dOptions, InitialGuess, TopBottom};
use aps_core::{catalog, io, pucci_energy, CheckConfig, EnergyModel, Grid, ParamTable, Verdict};

use crate::config::{Format, RunConfig};

/// Failure of a run as opposed to a failed check.
#[derive(Debug)]
pub struct RunError(pub String);

impl<E: std::fmt::Display> From<E> for RunError {
    fn from(e: E) -> Self {
        RunError(e.to_string())
    }
}

pub struct Outcome {
    pub report: String,
    pub ok: bool,
}

fn grid(cfg: &RunConfig) -> Result<Grid, RunError> {
    Ok(Grid::new(cfg.grid_max, cfg.grid_n)?)
}

fn check_config(cfg: &RunConfig) -> Result<CheckConfig, RunError> {
    Ok(CheckConfig {
        grid: grid(cfg)?,
        tol: cfg.tol,
        seed: cfg.seed,
        trials: cfg.trials,
    })
}

pub fn build_model(cfg: &RunConfig) -> Result<EnergyModel, RunError> {
    let spec = &cfg.model;
    if let Some(src) = &spec.dsl {
        let params = ParamTable::from_pairs(spec.params.iter().map(|(k, v)| (k.as_str(), *v)))?;
        let c = if spec.incompressible {
            Compressibility::IncompressibleOnly
        } else {
            Compressibility::Compressible
        };
        return Ok(EnergyModel::from_dsl("dsl", src, params, c)?);
    }
    let name = spec
        .name
        .as_deref()
        .ok_or_else(|| RunError("no model given: pass a catalog name or --dsl".into()))?;
    let mut m = EnergyModel::by_name(name)?;
    for (k, v) in &spec.params {
        m = m.with_param(k, *v)?;
    }
    Ok(m)
}

fn boundary(cfg: &RunConfig) -> Result<BoundaryData, RunError> {
    let b = &cfg.boundary;
    if let Some(c) = b.affine {
        return Ok(BoundaryData::Affine(c));
    }
    match &b.bc {
        Some(src) => {
            let params = ParamTable::from_pairs(b.bc_params.iter().map(|(k, v)| (k.as_str(), *v)))?;
            Ok(BoundaryData::expression(src, &params)?)
        }
        None => Ok(BoundaryData::Default { amplitude: b.amplitude }),
    }
}

fn verdict_cell(v: &Verdict) -> String {
    match v {
        Verdict::NotApplicable(_) => "n/a".into(),
        other => other.to_string(),
    }
}

fn render_report_text(r: &ConditionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model: {}", r.model);
    if let Some(v) = &r.volumetric {
        let _ = writeln!(s, "volumetric: {v}");
    }
    let _ = writeln!(s, "grid: {} points on (0, {}]", r.grid_points, r.grid_max);
    let _ = writeln!(s, "APS-convex: {}", if r.aps_convex() { "yes" } else { "no" });
    for (name, v) in r.rows() {
        let _ = writeln!(s, "  {name:<20} {v}");
    }
    match r.k1.b {
        Some(b) => {
            let _ = writeln!(s, "K1 constant b = {b} (spread {:.1e})", r.k1.spread);
        }
        None => {
            let _ = writeln!(s, "K1 constant b: none (spread {:.1e})", r.k1.spread);
        }
    }
    let _ = writeln!(
        s,
        "K2 probe: max discrepancy {:.2e}, max residual {:.2e}",
        r.k2_probe.max_discrepancy, r.k2_probe.max_residual
    );
    if let Some(rs) = r.reference {
        let _ = writeln!(
            s,
            "reference state: residual stress {:.3e}, shear modulus {}",
            rs.residual_stress, rs.shear_modulus
        );
    }
    let _ = writeln!(s, "local shear modulus dσ12/dγ(0) = {}", r.local_shear_modulus);
    let _ = writeln!(
        s,
        "APS+ sampling: seed {}, {} trials, {} evaluated, {} skipped",
        r.aps_plus.seed, r.aps_plus.trials, r.aps_plus.evaluated, r.aps_plus.skipped
    );
    if let Some(p) = &r.tc.principal {
        let _ = writeln!(s, "tension-compression symmetry (principal form): {p}");
    }
    if let Some(h) = r.tc.k1_half {
        let _ = writeln!(s, "K1 constant equals 1/2: {h}");
    }
    s
}

fn finish(cfg: &RunConfig, mut body: String) -> String {
    body.push_str(&cfg.embedded());
    body
}

pub fn check(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let model = build_model(cfg)?;
    let r = conditions::report(&model, &check_config(cfg)?);
    // tension-compression symmetry classifies the model; it is not a condition
    let ok = r
        .rows()
        .iter()
        .filter(|(name, _)| *name != "tc-symmetry")
        .all(|(_, v)| !v.failed());
    let body = match cfg.format {
        Format::Text => render_report_text(&r),
        Format::Csv => {
            let mut buf = Vec::new();
            io::write_report_csv(&r, true, &mut buf)?;
            String::from_utf8(buf)?
        }
        Format::Vtk => return Err(RunError("check has no VTK output".into())),
    };
    Ok(Outcome {
        report: finish(cfg, body),
        ok,
    })
}

pub fn table1(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let grid = grid(cfg)?;
    let mut rows = Vec::new();
    let mut matched = 0;
    let entries = catalog();
    for e in &entries {
        let exp = e.expected();
        let aps = conditions::check_aps2(&e.model, &grid, cfg.tol);
        let k1 = conditions::check_k1(&e.model, &grid);
        let k2 = conditions::check_k2(&e.model, &grid);
        let aps_ok = aps.passed() == exp.aps_convex;
        let b_ok = match exp.k1_b {
            Some(b) => k1.b.is_some_and(|x| (x - b).abs() < 1e-8),
            None => k1.verdict.failed(),
        };
        let k2_ok = match exp.k2 {
            K2Expectation::Holds => k2.passed(),
            K2Expectation::Fails => k2.failed(),
            K2Expectation::NotApplicable => matches!(k2, Verdict::NotApplicable(_)),
        };
        let all = aps_ok && b_ok && k2_ok;
        matched += usize::from(all);
        let aps_cell = match &aps {
            Verdict::Pass => "yes".to_string(),
            Verdict::Fail(w) => format!("no (R={:.3})", w.at),
            other => verdict_cell(other),
        };
        let b_cell = k1.b.map_or("no".to_string(), |b| format!("{b:.10}"));
        let k2_cell = match &k2 {
            Verdict::Pass => "yes",
            Verdict::Fail(_) => "no",
            _ => "n.a.",
        };
        let yn = |b: bool| if b { "yes" } else { "no" };
        let exp_k2 = match exp.k2 {
            K2Expectation::Holds => "yes",
            K2Expectation::Fails => "no",
            K2Expectation::NotApplicable => "n.a.",
        };
        rows.push([
            e.label.to_string(),
            aps_cell,
            yn(exp.aps_convex).to_string(),
            b_cell,
            exp.k1_b.map_or("no".into(), |b| format!("{b}")),
            k2_cell.to_string(),
            exp_k2.to_string(),
            if all { "ok".into() } else { "MISMATCH".into() },
        ]);
    }
    let header = [
        "model", "APS-convex", "expected", "K1 b", "expected", "K2", "expected", "status",
    ];
    let mut body = String::new();
    match cfg.format {
        Format::Csv => {
            let _ = writeln!(
                body,
                "model,aps_convex,aps_convex_expected,k1_b,k1_b_expected,k2,k2_expected,status"
            );
            for r in &rows {
                let cells: Vec<String> = r.iter().map(|c| c.replace(',', ";")).collect();
                let _ = writeln!(body, "{}", cells.join(","));
            }
        }
        Format::Text => {
            let mut w = header.map(str::len);
            for r in &rows {
                for (k, c) in r.iter().enumerate() {
                    w[k] = w[k].max(c.chars().count());
                }
            }
            let line = |cells: Vec<&str>| -> String {
                cells
                    .iter()
                    .enumerate()
                    .map(|(k, c)| format!("{c:<width$}", width = w[k]))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            let _ = writeln!(body, "{}", line(header.to_vec()));
            for r in &rows {
                let _ = writeln!(body, "{}", line(r.iter().map(String::as_str).collect()));
            }
            let _ = writeln!(body, "{matched}/{} rows match", entries.len());
        }
        Format::Vtk => return Err(RunError("table1 has no VTK output".into())),
    }
    Ok(Outcome {
        report: finish(cfg, body),
        ok: matched == entries.len(),
    })
}

pub fn counterexample(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let c = &cfg.counterexample;
    let grid = grid(cfg)?;
    let m = pucci_energy(c.mu, c.alpha)?;
    let ei = conditions::empirical_on_path(&m, &grid);
    let rs = conditions::reference_state(&m)?;
    let aps = conditions::check_aps2(&m, &grid, cfg.tol);
    let residual_ok = rs.residual_stress.abs() < 1e-12;
    let modulus_ok = (rs.shear_modulus - c.mu).abs() < 1e-12 * c.mu.max(1.0);
    let threshold = if c.bisect {
        Some(conditions::alpha_threshold_bisect(c.mu, &grid, cfg.tol, c.resolution)?)
    } else {
        None
    };
    let mut rows: Vec<(&str, String)> = vec![
        ("model", m.to_string()),
        ("empirical-inequalities", verdict_cell(&ei)),
        ("residual-stress", format!("{:e}", rs.residual_stress)),
        ("shear-modulus", format!("{}", rs.shear_modulus)),
        ("aps2", verdict_cell(&aps)),
    ];
    if let Some(t) = threshold {
        rows.push(("alpha-threshold", format!("{t:.8}")));
        rows.push(("alpha-threshold-closed-form", format!("{:.8}", 8.0 / 9.0)));
    }
    let mut body = String::new();
    match cfg.format {
        Format::Text => {
            for (k, v) in &rows {
                let _ = writeln!(body, "{k:<28} {v}");
            }
        }
        Format::Csv => {
            let _ = writeln!(body, "quantity,value");
            for (k, v) in &rows {
                let _ = writeln!(body, "{k},{}", v.replace(',', ";"));
            }
        }
        Format::Vtk => return Err(RunError("counterexample has no VTK output".into())),
    }
    Ok(Outcome {
        report: finish(cfg, body),
        ok: ei.passed() && residual_ok && modulus_ok && aps.passed(),
    })
}

fn write_file(
    path: &str,
    emit: impl FnOnce(&mut BufWriter<File>) -> aps_core::Result<()>,
) -> Result<(), RunError> {
    let file = File::create(path).map_err(|e| RunError(format!("{path}: {e}")))?;
    let mut w = BufWriter::new(file);
    emit(&mut w)?;
    w.flush().map_err(|e| RunError(format!("{path}: {e}")))
}

pub fn solve2d(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let model = build_model(cfg)?;
    let bc = boundary(cfg)?;
    let s = &cfg.solve2d;
    let mut p = Aps2dProblem::new(model, s.n, &bc)?;
    p.strict = s.strict;
    p.controls = SolverControls {
        max_iterations: s.max_iterations,
        tolerance: s.tolerance,
        ..SolverControls::default()
    };
    let r = aps2d::solve(&mut p)?;
    let residual = aps2d::residual_iii(&p.field, &p.model)?;
    let mut body = String::new();
    let _ = writeln!(body, "model: {}", p.model);
    let _ = writeln!(body, "boundary: {}", bc.describe());
    let _ = writeln!(body, "grid: {0} x {0} nodes", s.n);
    let _ = writeln!(body, "iterations: {}", r.iterations);
    let _ = writeln!(body, "energy: {:.15e}", r.energy);
    let _ = writeln!(body, "gradient norm: {:.3e}", r.gradient_norm);
    let _ = writeln!(body, "equilibrium residual: {residual:.3e}");
    let _ = writeln!(body, "APS-convex: {}", if r.convex { "yes" } else { "no" });
    if let BoundaryData::Affine(c) = bc {
        let err = (0..p.field.values.len()).fold(0.0f64, |m, k| {
            let (x, y) = p.field.coords(k);
            m.max((p.field.values[k] - (c[0] * x + c[1] * y + c[2])).abs())
        });
        if err < 1e-10 {
            let _ = writeln!(body, "exact affine solution (max nodal error {err:.1e})");
        } else {
            let _ = writeln!(body, "affine solution not reproduced (max nodal error {err:.1e})");
        }
    }
    if let Some(out) = &cfg.out {
        write_file(out, |w| match cfg.format {
            Format::Vtk => io::write_field_vtk(&p.field, w),
            _ => io::write_field_csv(&p.field, w),
        })?;
        let _ = writeln!(body, "field written to {out}");
    }
    Ok(Outcome {
        report: finish(cfg, body),
        ok: true,
    })
}

/// `u_δ / A` below which the solution counts as anti-plane.
pub const ANTI_PLANE_THRESHOLD: f64 = 1e-6;
/// The same with a volumetric penalty, which only approximates `J = 1`.
pub const ANTI_PLANE_THRESHOLD_PENALIZED: f64 = 1e-4;

pub fn solve3d(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let mut model = build_model(cfg)?;
    let s = &cfg.solve3d;
    if let Some(ratio) = s.quasi_incompressible {
        model = model.quasi_incompressible(ratio)?;
    }
    let bc = boundary(cfg)?;
    let opts = Fem3dOptions {
        n: s.n,
        top_bottom: if s.free_faces { TopBottom::Free } else { TopBottom::Periodic },
        initial: if s.harmonic_start { InitialGuess::Harmonic } else { InitialGuess::Zero },
        max_iterations: s.max_iterations,
        tol_factor: s.tol_factor,
    };
    let r = fem3d::minimize(&model, &bc, &opts)?;
    let a = bc.amplitude();
    let rel = if a > 0.0 { r.max_interior_deviation / a } else { r.max_interior_deviation };
    let mut body = String::new();
    let _ = writeln!(body, "model: {model}");
    let _ = writeln!(body, "boundary: {}", bc.describe());
    let _ = writeln!(
        body,
        "mesh: {0} x {0} x {0} nodes, {1} top and bottom",
        s.n,
        if s.free_faces { "traction-free" } else { "periodic" }
    );
    let _ = writeln!(body, "iterations: {}", r.iterations);
    let _ = writeln!(body, "energy: {:.15e}", r.energy);
    let _ = writeln!(body, "gradient norm: {:.3e}", r.gradient_norm);
    let _ = writeln!(body, "max interior u_delta: {:.6e}", r.max_interior_deviation);
    let _ = writeln!(body, "max interior u_delta / amplitude: {rel:.6e}");
    let threshold = if s.quasi_incompressible.is_some() {
        ANTI_PLANE_THRESHOLD_PENALIZED
    } else {
        ANTI_PLANE_THRESHOLD
    };
    let _ = writeln!(
        body,
        "anti-plane: {} (threshold {threshold:e})",
        if rel < threshold { "yes" } else { "no" }
    );
    if let Some(out) = &cfg.out {
        write_file(out, |w| match cfg.format {
            Format::Csv => io::write_slice_csv(&r.displacement, w),
            _ => io::write_displacement_vtk(&r.displacement, w),
        })?;
        let _ = writeln!(body, "displacement written to {out}");
    }
    if let Some(path) = &s.slice {
        write_file(path, |w| io::write_slice_csv(&r.displacement, w))?;
        let _ = writeln!(body, "mid-layer slice written to {path}");
    }
    Ok(Outcome {
        report: finish(cfg, body),
        ok: true,
    })
}
