use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use qgd_core::descent::{generic_eta, uniform_qubits, uniform_with_qubits};
use qgd_core::{DescentConfig, Mode, ObjectiveFunction, SeparableObjective};

use crate::error::CliError;

/// Which artifact encodings to write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
    #[default]
    Both,
}

impl OutputFormat {
    pub fn json(self) -> bool {
        matches!(self, Self::Json | Self::Both)
    }

    pub fn csv(self) -> bool {
        matches!(self, Self::Csv | Self::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveSpec {
    Polynomial(ObjectiveFunction),
    Separable(SeparableObjective),
}

impl ObjectiveSpec {
    pub fn n(&self) -> usize {
        match self {
            Self::Polynomial(f) => f.n(),
            Self::Separable(f) => f.n,
        }
    }

    pub fn grad_bound(&self) -> f64 {
        match self {
            Self::Polynomial(f) => f.grad_bound(),
            Self::Separable(f) => f.grad_bound,
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Self::Polynomial(_) => Mode::Generic,
            Self::Separable(_) => Mode::Separable,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum UniformQubits {
    Auto(AutoTag),
    Fixed(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoTag {
    Auto,
}

/// Explicit start vector, or the uniform state on `q` qubits.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum X0Spec {
    Vector(Vec<f64>),
    Uniform {
        #[serde(rename = "uniform_q")]
        q: UniformQubits,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            dir: default_dir(),
            format: OutputFormat::default(),
        }
    }
}

/// Report sections to include.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSpec {
    #[serde(default = "yes")]
    pub comparison: bool,
    #[serde(default = "yes")]
    pub resources: bool,
}

impl Default for ReportSpec {
    fn default() -> Self {
        Self {
            comparison: true,
            resources: true,
        }
    }
}

fn yes() -> bool {
    true
}

/// One run request as read from disk.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Artifact file stem; defaults to the config file stem.
    #[serde(default)]
    pub name: Option<String>,
    pub objective: ObjectiveSpec,
    pub x0: X0Spec,
    #[serde(rename = "T")]
    pub t: usize,
    pub eps: f64,
    pub mode: Mode,
    #[serde(default)]
    pub eta: Option<f64>,
    #[serde(default = "yes")]
    pub enforce_schedule: bool,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub audit: bool,
    #[serde(default)]
    pub report: ReportSpec,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub audit: bool,
    pub format: Option<OutputFormat>,
}

impl ExperimentConfig {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        let mut cfg: Self = serde_json::from_str(text).map_err(|e| CliError::schema(origin, &e))?;
        if cfg.name.is_none() {
            let stem = Path::new(origin)
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("run");
            cfg.name = Some(stem.to_string());
        }
        cfg.check(origin)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    fn check(&self, origin: &str) -> Result<(), CliError> {
        let name = self.name();
        if name.is_empty() || name.contains(['/', '\\']) {
            return Err(CliError::invalid(origin, format!("invalid run name {name:?}")));
        }
        if self.objective.mode() != self.mode {
            return Err(CliError::invalid(
                origin,
                format!(
                    "mode {:?} does not match a {} objective",
                    self.mode,
                    match self.objective {
                        ObjectiveSpec::Polynomial(_) => "polynomial",
                        ObjectiveSpec::Separable(_) => "separable",
                    }
                ),
            ));
        }
        if let X0Spec::Vector(v) = &self.x0 {
            if v.len() != self.objective.n() {
                return Err(CliError::invalid(
                    origin,
                    format!("x0 has {} entries, objective has n = {}", v.len(), self.objective.n()),
                ));
            }
        }
        if self.mode == Mode::Separable && self.eta.is_none() {
            return Err(CliError::invalid(origin, "separable mode needs eta"));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("run")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(dir) = &o.out {
            self.output.dir = dir.clone();
        }
        if o.audit {
            self.audit = true;
        }
        if let Some(f) = o.format {
            self.output.format = f;
        }
    }

    /// Learning rate used by the run: derived in generic mode, given in
    /// separable mode.
    pub fn eta(&self) -> Option<f64> {
        match &self.objective {
            ObjectiveSpec::Polynomial(f) => Some(generic_eta(f)),
            ObjectiveSpec::Separable(_) => self.eta,
        }
    }

    pub fn descent(&self) -> DescentConfig {
        let mut d = match self.mode {
            Mode::Generic => DescentConfig::generic(self.t, self.eps),
            Mode::Separable => DescentConfig::separable(self.t, self.eps, self.eta.unwrap_or(0.0)),
        };
        if self.mode == Mode::Generic {
            d.eta = self.eta;
        }
        d.enforce_schedule = self.enforce_schedule;
        d
    }

    /// The start vector, building the uniform state when requested.
    pub fn resolve_x0(&self) -> Result<Vec<f64>, CliError> {
        let n = self.objective.n();
        let q = match &self.x0 {
            X0Spec::Vector(v) => return Ok(v.clone()),
            X0Spec::Uniform { q: UniformQubits::Fixed(q) } => *q,
            X0Spec::Uniform {
                q: UniformQubits::Auto(_),
            } => {
                let eta = self.eta().unwrap_or(0.0);
                uniform_qubits(eta, self.objective.grad_bound(), self.t, n).map_err(|source| {
                    CliError::Descent {
                        name: self.name().to_string(),
                        source,
                    }
                })?
            }
        };
        if (1usize << q.min(63)) < n {
            return Err(CliError::invalid(
                self.name(),
                format!("{q} qubits cannot hold {n} coordinates"),
            ));
        }
        Ok(uniform_with_qubits(q, n))
    }
}

/// List of run configs, paths relative to the sweep file.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSweep {
    pub configs: Vec<PathBuf>,
}

impl RunSweep {
    pub fn load(path: &Path) -> Result<Vec<PathBuf>, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let origin = path.display().to_string();
        let sweep: Self = serde_json::from_str(&text).map_err(|e| CliError::schema(&origin, &e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Ok(sweep.configs.iter().map(|c| base.join(c)).collect())
    }
}
