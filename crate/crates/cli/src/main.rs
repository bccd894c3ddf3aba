//! `aps`: condition reports, the catalog table, the counterexample and the
//! planar and three-dimensional solvers.
//!
//! Exit codes: 0 when every applicable check passes (or a solve succeeds),
//! 1 when some check fails, 2 on usage, domain or solver errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use aps_core::ParamTable;
use commands::{Outcome, RunError};
use config::{Format, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "aps", version, about = "Anti-plane shear analysis of isotropic hyperelastic energies")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// TOML run configuration, or a report with an embedded one.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Largest R of the sampling grid.
    #[arg(long, global = true)]
    grid_max: Option<f64>,
    /// Number of grid points.
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Relative tolerance of the sign checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Report file (check, table1, counterexample) or field file (solvers).
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug, Default)]
struct ModelArgs {
    /// Catalog model name, e.g. blatz-ko or mooney-rivlin.
    model: Option<String>,
    /// Energy W(I1, I2, I3) in the expression language.
    #[arg(long)]
    dsl: Option<String>,
    /// Parameter binding, repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,
    /// The DSL energy is only defined for I3 = 1.
    #[arg(long)]
    incompressible: bool,
}

#[derive(Args, Debug, Default)]
struct BoundaryArgs {
    /// Boundary datum as an expression in x1 and x2.
    #[arg(long)]
    bc: Option<String>,
    /// Parameter of the boundary expression, repeatable.
    #[arg(long = "bc-param", value_name = "NAME=VALUE")]
    bc_params: Vec<String>,
    /// Affine datum a*x1 + b*x2 + c.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, value_name = "A,B,C")]
    affine: Vec<f64>,
    /// Amplitude of the default datum.
    #[arg(long)]
    amplitude: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full condition report for one energy.
    Check {
        #[command(flatten)]
        model: ModelArgs,
        /// Samples of the APS+ directional check.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Computed against tabulated properties of the catalog.
    Table1,
    /// The energy that meets the empirical inequalities without being
    /// APS-convex.
    Counterexample {
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Also locate the alpha threshold by bisection.
        #[arg(long)]
        bisect: bool,
    },
    /// Planar anti-plane shear minimization on the unit square.
    Solve2d {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        boundary: BoundaryArgs,
        /// Nodes per edge.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        max_iterations: Option<usize>,
        #[arg(long)]
        tolerance: Option<f64>,
        /// Refuse energies that are not APS-convex.
        #[arg(long)]
        strict: bool,
    },
    /// Three-dimensional energy minimization on the unit cube.
    Solve3d {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        boundary: BoundaryArgs,
        /// Nodes per edge.
        #[arg(long)]
        n: Option<usize>,
        /// Traction-free instead of periodic top and bottom faces.
        #[arg(long)]
        free_faces: bool,
        /// Replace the volumetric part by a penalty kappa = RATIO * mu.
        #[arg(long, value_name = "RATIO")]
        quasi_incompressible: Option<f64>,
        /// Start from the extruded harmonic extension.
        #[arg(long)]
        harmonic_start: bool,
        #[arg(long)]
        max_iterations: Option<usize>,
        #[arg(long)]
        tol_factor: Option<f64>,
        /// CSV of u_delta on the mid layer.
        #[arg(long, value_name = "FILE")]
        slice: Option<String>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Table1 => "table1",
            Command::Counterexample { .. } => "counterexample",
            Command::Solve2d { .. } => "solve2d",
            Command::Solve3d { .. } => "solve3d",
        }
    }
}

fn bindings(raw: &[String]) -> Result<Vec<(String, f64)>, RunError> {
    raw.iter()
        .map(|b| ParamTable::parse_binding(b).map_err(RunError::from))
        .collect()
}

fn apply_model(cfg: &mut RunConfig, m: ModelArgs) -> Result<(), RunError> {
    if let Some(name) = m.model {
        cfg.model.name = Some(name);
        cfg.model.dsl = None;
    }
    if let Some(src) = m.dsl {
        cfg.model.dsl = Some(src);
    }
    if m.incompressible {
        cfg.model.incompressible = true;
    }
    for (k, v) in bindings(&m.params)? {
        cfg.model.params.insert(k, v);
    }
    Ok(())
}

fn apply_boundary(cfg: &mut RunConfig, b: BoundaryArgs) -> Result<(), RunError> {
    if let Some(src) = b.bc {
        cfg.boundary.bc = Some(src);
        cfg.boundary.affine = None;
    }
    match b.affine.as_slice() {
        [] => {}
        [p, q, r] => cfg.boundary.affine = Some([*p, *q, *r]),
        other => return Err(RunError(format!("--affine takes 3 coefficients, got {}", other.len()))),
    }
    if let Some(a) = b.amplitude {
        cfg.boundary.amplitude = a;
    }
    for (k, v) in bindings(&b.bc_params)? {
        cfg.boundary.bc_params.insert(k, v);
    }
    Ok(())
}

/// File values first, then flags.
fn resolve(cli: Cli) -> Result<(RunConfig, String), RunError> {
    let g = cli.global;
    let mut cfg = match &g.config {
        Some(path) => RunConfig::load(path).map_err(RunError)?,
        None => RunConfig::default(),
    };
    let name = cli.command.name();
    if let Some(c) = &cfg.command {
        if c != name {
            return Err(RunError(format!("configuration is for `{c}`, not `{name}`")));
        }
    }
    cfg.command = Some(name.to_string());
    if let Some(v) = g.grid_max {
        cfg.grid_max = v;
    }
    if let Some(v) = g.grid_n {
        cfg.grid_n = v;
    }
    if let Some(v) = g.tol {
        cfg.tol = v;
    }
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if let Some(v) = g.out {
        cfg.out = Some(v);
    }
    if let Some(v) = g.format {
        cfg.format = v;
    }
    match cli.command {
        Command::Check { model, trials } => {
            apply_model(&mut cfg, model)?;
            if let Some(t) = trials {
                cfg.trials = t;
            }
        }
        Command::Table1 => {}
        Command::Counterexample { mu, alpha, bisect } => {
            let c = &mut cfg.counterexample;
            if let Some(v) = mu {
                c.mu = v;
            }
            if let Some(v) = alpha {
                c.alpha = v;
            }
            c.bisect |= bisect;
        }
        Command::Solve2d {
            model,
            boundary,
            n,
            max_iterations,
            tolerance,
            strict,
        } => {
            apply_model(&mut cfg, model)?;
            apply_boundary(&mut cfg, boundary)?;
            let s = &mut cfg.solve2d;
            if let Some(v) = n {
                s.n = v;
            }
            if let Some(v) = max_iterations {
                s.max_iterations = v;
            }
            if let Some(v) = tolerance {
                s.tolerance = v;
            }
            s.strict |= strict;
        }
        Command::Solve3d {
            model,
            boundary,
            n,
            free_faces,
            quasi_incompressible,
            harmonic_start,
            max_iterations,
            tol_factor,
            slice,
        } => {
            apply_model(&mut cfg, model)?;
            apply_boundary(&mut cfg, boundary)?;
            let s = &mut cfg.solve3d;
            if let Some(v) = n {
                s.n = v;
            }
            s.free_faces |= free_faces;
            if quasi_incompressible.is_some() {
                s.quasi_incompressible = quasi_incompressible;
            }
            s.harmonic_start |= harmonic_start;
            if let Some(v) = max_iterations {
                s.max_iterations = v;
            }
            if let Some(v) = tol_factor {
                s.tol_factor = v;
            }
            if slice.is_some() {
                s.slice = slice;
            }
        }
    }
    Ok((cfg, name.to_string()))
}

fn run(cfg: &RunConfig, name: &str) -> Result<Outcome, RunError> {
    let outcome = match name {
        "check" => commands::check(cfg)?,
        "table1" => commands::table1(cfg)?,
        "counterexample" => commands::counterexample(cfg)?,
        "solve2d" => return commands::solve2d(cfg),
        "solve3d" => return commands::solve3d(cfg),
        _ => unreachable!("subcommand names are fixed"),
    };
    // reports go to --out when given, solver summaries always to stdout
    if let Some(out) = &cfg.out {
        std::fs::write(out, &outcome.report).map_err(|e| RunError(format!("{out}: {e}")))?;
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = resolve(cli).and_then(|(cfg, name)| {
        let o = run(&cfg, &name)?;
        if cfg.out.is_none() || name.starts_with("solve") {
            print!("{}", o.report);
        }
        Ok(o)
    });
    match result {
        Ok(o) if o.ok => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(1),
        Err(RunError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
