//! Run configuration: TOML file, command-line overrides, and the copy
//! embedded in every report.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Prefix of the configuration lines embedded in reports.
pub const EMBED_PREFIX: &str = "#% ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Vtk,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSpec {
    /// Catalog name such as `blatz-ko`.
    pub name: Option<String>,
    /// Energy source in the expression language; wins over `name`.
    pub dsl: Option<String>,
    /// Treat a DSL energy as defined on `I3 = 1` only.
    pub incompressible: bool,
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleSection {
    pub mu: f64,
    pub alpha: f64,
    pub bisect: bool,
    pub resolution: f64,
}

impl Default for CounterexampleSection {
    fn default() -> Self {
        CounterexampleSection {
            mu: 1.0,
            alpha: 0.95,
            bisect: false,
            resolution: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundarySection {
    /// Expression in `x1`, `x2`; unset means the default datum.
    pub bc: Option<String>,
    pub bc_params: BTreeMap<String, f64>,
    /// `[a, b, c]` for `a x1 + b x2 + c`; wins over `bc`.
    pub affine: Option<[f64; 3]>,
    /// Amplitude of the default datum.
    pub amplitude: f64,
}

impl Default for BoundarySection {
    fn default() -> Self {
        BoundarySection {
            bc: None,
            bc_params: BTreeMap::new(),
            affine: None,
            amplitude: aps_core::aps2d::DEFAULT_AMPLITUDE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Solve2dSection {
    pub n: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub strict: bool,
}

impl Default for Solve2dSection {
    fn default() -> Self {
        let c = aps_core::aps2d::SolverControls::default();
        Solve2dSection {
            n: 65,
            max_iterations: c.max_iterations,
            tolerance: c.tolerance,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Solve3dSection {
    pub n: usize,
    pub free_faces: bool,
    /// Penalty ratio `κ/μ` for a quasi-incompressible variant.
    pub quasi_incompressible: Option<f64>,
    pub harmonic_start: bool,
    pub max_iterations: usize,
    pub tol_factor: f64,
    /// CSV of `u_δ` on the mid layer.
    pub slice: Option<String>,
}

impl Default for Solve3dSection {
    fn default() -> Self {
        let o = aps_core::fem3d::Fem3dOptions::default();
        Solve3dSection {
            n: o.n,
            free_faces: false,
            quasi_incompressible: None,
            harmonic_start: false,
            max_iterations: o.max_iterations,
            tol_factor: o.tol_factor,
            slice: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<String>,
    pub grid_max: f64,
    pub grid_n: usize,
    pub tol: f64,
    pub seed: u64,
    pub trials: usize,
    pub format: Format,
    pub out: Option<String>,
    pub model: ModelSpec,
    pub boundary: BoundarySection,
    pub counterexample: CounterexampleSection,
    pub solve2d: Solve2dSection,
    pub solve3d: Solve3dSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = aps_core::CheckConfig::default();
        RunConfig {
            command: None,
            grid_max: c.grid.r_max,
            grid_n: c.grid.len(),
            tol: c.tol,
            seed: c.seed,
            trials: c.trials,
            format: Format::Text,
            out: None,
            model: ModelSpec::default(),
            boundary: BoundarySection::default(),
            counterexample: CounterexampleSection::default(),
            solve2d: Solve2dSection::default(),
            solve3d: Solve3dSection::default(),
        }
    }
}

impl RunConfig {
    /// Reads a TOML file. A report with embedded configuration lines is
    /// accepted too; only those lines are used then.
    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let embedded: Vec<&str> = text
            .lines()
            .filter_map(|l| l.strip_prefix(EMBED_PREFIX).or_else(|| (l == EMBED_PREFIX.trim_end()).then_some("")))
            .collect();
        let src = if embedded.is_empty() { text.clone() } else { embedded.join("\n") };
        toml::from_str(&src).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    /// The configuration as prefixed comment lines.
    pub fn embedded(&self) -> String {
        self.to_toml()
            .lines()
            .map(|l| format!("{EMBED_PREFIX}{l}\n"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_through_toml() {
        let mut c = RunConfig::default();
        c.model.name = Some("pucci".into());
        c.model.params.insert("alpha".into(), 0.9);
        c.boundary.affine = Some([1.0, 2.0, 3.0]);
        let back: RunConfig = toml::from_str(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_files_fill_defaults() {
        let c: RunConfig = toml::from_str("grid_n = 50\n[solve3d]\nn = 5\n").unwrap();
        assert_eq!(c.grid_n, 50);
        assert_eq!(c.solve3d.n, 5);
        assert_eq!(c.solve2d.n, 65);
        assert!(toml::from_str::<RunConfig>("bogus = 1").is_err());
    }
}
