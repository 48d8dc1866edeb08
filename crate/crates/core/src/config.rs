//! Strict TOML run configuration.
//!
//! ```toml
//! [model]
//! family = "cubic"
//! s = 0.1
//!
//! [params]
//! epsilon = 0.02
//! D = 1.0
//! xi = 0.0
//! ```
//!
//! `model` and `params` are required; `grid`, `spectrum`, `simulate`,
//! `newton` and `output` fall back to defaults. Unknown keys anywhere are
//! rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layer::Orientation;
use crate::model::{builtin_cubic, BistableModel, ProblemParams};
use crate::simulate::SimConfig;
use crate::spectrum::SpectrumConfig;
use crate::steady::NewtonConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Both,
}

impl Format {
    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub family: String,
    pub s: f64,
    /// Layer value; defaults to the midpoint of h^±(v*).
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default = "default_orientation")]
    pub orientation: Orientation,
}

fn default_orientation() -> Orientation {
    Orientation::JumpUp
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub theta: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        let sim = SimConfig::default();
        Self { n: 2048, dt: sim.dt, t_end: sim.t_end, theta: sim.theta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateSection {
    pub perturbation_amplitude: f64,
    pub seed: u64,
    pub sample_interval: f64,
    pub fit_floor: f64,
}

impl Default for SimulateSection {
    fn default() -> Self {
        let sim = SimConfig::default();
        Self {
            perturbation_amplitude: sim.perturbation_amplitude,
            seed: sim.seed,
            sample_interval: sim.sample_interval,
            fit_floor: sim.fit_floor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub format: Format,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { directory: PathBuf::from("out"), format: Format::Json }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    pub params: ProblemParams,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default)]
    pub simulate: SimulateSection,
    #[serde(default)]
    pub newton: NewtonConfig,
    #[serde(default)]
    pub output: OutputSection,
}

const SCHEMA: &[(&str, &[&str])] = &[
    ("model", &["family", "s", "alpha", "orientation"]),
    ("params", &["epsilon", "D", "xi"]),
    ("grid", &["n", "dt", "t_end", "theta"]),
    (
        "spectrum",
        &["lambda_max", "contour_samples", "eigen_count", "omega0", "case3_mu", "zero_mode_delta"],
    ),
    ("simulate", &["perturbation_amplitude", "seed", "sample_interval", "fit_floor"]),
    ("newton", &["max_iters", "tol", "armijo_factor", "min_step"]),
    ("output", &["directory", "format"]),
];

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn unknown_keys(table: &toml::Table) -> Vec<String> {
    let mut bad = Vec::new();
    for (key, value) in table {
        match SCHEMA.iter().find(|(s, _)| s == key) {
            None => bad.push(key.clone()),
            Some((_, fields)) => match value.as_table() {
                Some(t) => bad.extend(
                    t.keys().filter(|k| !fields.contains(&k.as_str())).map(|k| format!("{key}.{k}")),
                ),
                None => bad.push(format!("{key} (expected a table)")),
            },
        }
    }
    bad
}

impl RunConfig {
    /// Minimal configuration for the cubic family.
    pub fn cubic(s: f64, epsilon: f64, d: f64, xi: f64) -> Self {
        Self {
            model: ModelSection {
                family: "cubic".into(),
                s,
                alpha: None,
                orientation: Orientation::JumpUp,
            },
            params: ProblemParams { epsilon, d, xi },
            grid: GridSection::default(),
            spectrum: SpectrumConfig::default(),
            simulate: SimulateSection::default(),
            newton: NewtonConfig::default(),
            output: OutputSection::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
            Error::ConfigParse { line, column, message: e.message().trim().to_string() }
        })?;
        let mut problems = unknown_keys(&table);
        for section in ["model", "params"] {
            if !table.contains_key(section) {
                problems.push(format!("missing section [{section}]"));
            }
        }
        if !problems.is_empty() {
            return Err(Error::ConfigValidation(problems));
        }
        let cfg: RunConfig =
            table.try_into().map_err(|e| Error::ConfigValidation(vec![e.message().trim().to_string()]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    fn validate(&self) -> Result<()> {
        let mut bad = Vec::new();
        if self.model.family != "cubic" {
            bad.push(format!("model.family: unknown family `{}`", self.model.family));
        }
        if self.grid.n < 3 {
            bad.push("grid.n: need at least three nodes".into());
        }
        if !(self.grid.dt > 0.0) {
            bad.push("grid.dt: must be positive".into());
        }
        if !(self.grid.t_end > 0.0) {
            bad.push("grid.t_end: must be positive".into());
        }
        if !(0.5..=1.0).contains(&self.grid.theta) {
            bad.push("grid.theta: must lie in [0.5, 1]".into());
        }
        if self.spectrum.eigen_count == 0 {
            bad.push("spectrum.eigen_count: must be at least 1".into());
        }
        if !(self.spectrum.omega0 > 0.0) {
            bad.push("spectrum.omega0: must be positive".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::ConfigValidation(bad))
        }
    }

    pub fn build_model(&self) -> Result<BistableModel> {
        builtin_cubic(self.model.s)
    }

    pub fn problem_params(&self) -> Result<ProblemParams> {
        ProblemParams::new(self.params.epsilon, self.params.d, self.params.xi)
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            dt: self.grid.dt,
            t_end: self.grid.t_end,
            theta: self.grid.theta,
            perturbation_amplitude: self.simulate.perturbation_amplitude,
            seed: self.simulate.seed,
            sample_interval: self.simulate.sample_interval,
            fit_floor: self.simulate.fit_floor,
        }
    }
}
