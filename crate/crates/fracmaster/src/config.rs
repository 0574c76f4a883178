//! Experiment configuration (TOML). See `examples/*.toml` in the repository
//! root for one file per experiment kind.

use std::path::{Path, PathBuf};

use fracmaster_core::campanato::{BoundaryModel, FitClass};
use fracmaster_core::solver::QuadratureSpec;
use fracmaster_core::spectral::{BoundaryCondition, Coefficient, CoefficientProfile, DomainSpec};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
}

impl ConfigError {
    fn field(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError::Field { path: path.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Solve,
    Kernel,
    Extend,
    Regularity,
    Halfspace,
    Validate,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Solve => "solve",
            ExperimentKind::Kernel => "kernel",
            ExperimentKind::Extend => "extend",
            ExperimentKind::Regularity => "regularity",
            ExperimentKind::Halfspace => "halfspace",
            ExperimentKind::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    /// Fractional order `s ∈ (0, 1)`.
    pub s: Option<f64>,
    /// Output directory; `--out` takes precedence.
    pub output: Option<PathBuf>,
    pub domain: Option<DomainConfig>,
    pub time: Option<TimeConfig>,
    pub forcing: Option<ForcingConfig>,
    #[serde(default)]
    pub solver: SolverConfig,
    pub kernel: Option<KernelConfig>,
    pub extend: Option<ExtendConfig>,
    pub regularity: Option<RegularityConfig>,
    pub halfspace: Option<HalfspaceConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcName {
    Dirichlet,
    Neumann,
}

impl From<BcName> for BoundaryCondition {
    fn from(b: BcName) -> Self {
        match b {
            BcName::Dirichlet => BoundaryCondition::Dirichlet,
            BcName::Neumann => BoundaryCondition::Neumann,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    /// One length (interval) or two (box).
    pub lengths: Vec<f64>,
    pub origin: Option<Vec<f64>>,
    pub bc: BcName,
    pub grid_size: usize,
    /// Defaults to `grid_size / 2`.
    pub modes: Option<usize>,
    #[serde(default)]
    pub coefficient: CoefficientConfig,
    /// Ellipticity bounds; default to the coefficient's own range.
    pub ellipticity: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientConfig {
    Constant { value: f64 },
    Matrix { value: [[f64; 2]; 2] },
    /// One of `unit`, `one_plus_half_sin`, `ramp`.
    Profile { name: String },
    Table { nodes: Vec<f64>, values: Vec<f64> },
}

impl Default for CoefficientConfig {
    fn default() -> Self {
        CoefficientConfig::Constant { value: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub period: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingConfig {
    /// Real part of `e^{iρ_m t} φ_k(x)`.
    Mode { k: usize, m: i64 },
    /// Seeded random field with modes `k < kmax`, `|m| < mmax`.
    BandLimited { kmax: usize, mmax: i64 },
    /// `bump(t) · g(x)` with a compactly supported smooth time bump.
    Bump {
        #[serde(default)]
        center: Option<f64>,
        #[serde(default = "default_bump_width")]
        width: f64,
        #[serde(default)]
        space: SpaceFactor,
    },
    /// Sampled values, one CSV row per time sample and one column per node.
    Table { path: PathBuf },
}

fn default_bump_width() -> f64 {
    2.0
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceFactor {
    #[default]
    One,
    /// `|x − x0|^alpha` (first coordinate).
    DistancePower { x0: f64, alpha: f64 },
    /// `dist(x, ∂Ω)^alpha` (1D).
    BoundaryPower { alpha: f64 },
    /// `1 + |x − x0|^alpha`.
    ShiftedPower { x0: f64, alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathName {
    #[default]
    Multiplier,
    Subordination,
    Convolution,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default)]
    pub path: PathName,
    pub quadrature: Option<QuadratureSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub taus: Vec<f64>,
    pub xs: Vec<f64>,
    pub zs: Vec<f64>,
    /// Also evaluate masses and a Chapman–Kolmogorov defect.
    #[serde(default = "yes")]
    pub diagnostics: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendConfig {
    pub levels: usize,
    pub height: Option<f64>,
    #[serde(default = "default_flux_points")]
    pub flux_points: usize,
    #[serde(default = "default_window")]
    pub window_fraction: f64,
    /// Levels written as CSV slices; defaults to 0, 1, M/4, M/2, M.
    pub slice_levels: Option<Vec<usize>>,
    /// Extend `u = H^{-s} f` (true) or `f` itself (false).
    #[serde(default = "yes")]
    pub solve_first: bool,
}

fn default_flux_points() -> usize {
    fracmaster_core::extension::DEFAULT_FLUX_POINTS
}

fn default_window() -> f64 {
    0.125
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassName {
    Constant,
    Linear,
}

impl From<ClassName> for FitClass {
    fn from(c: ClassName) -> Self {
        match c {
            ClassName::Constant => FitClass::Constant,
            ClassName::Linear => FitClass::Linear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    PurePower,
    PowerPlusXlog,
}

impl From<ModelName> for BoundaryModel {
    fn from(m: ModelName) -> Self {
        match m {
            ModelName::PurePower => BoundaryModel::PurePower,
            ModelName::PowerPlusXlog => BoundaryModel::PowerPlusXlog,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegularityConfig {
    pub center_t: f64,
    pub center_x: Vec<f64>,
    pub class: ClassName,
    pub boundary: Option<BoundaryConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    pub node: usize,
    pub direction: [i64; 2],
    #[serde(default = "default_boundary_samples")]
    pub samples: usize,
    pub model: ModelName,
    /// Defaults to the time sample nearest `center_t`.
    pub time_index: Option<usize>,
}

fn default_boundary_samples() -> usize {
    8
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceConfig {
    pub xs: Vec<f64>,
    #[serde(default = "yes")]
    pub asymptotics: bool,
    #[serde(default)]
    pub theta: Option<f64>,
    pub consistency: Option<ConsistencyConfig>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsistencyConfig {
    pub length: f64,
    pub intervals: usize,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let mut cfg = Self::from_toml(&text)?;
        // Table paths are relative to the config file.
        if let (Some(ForcingConfig::Table { path: table }), Some(dir)) = (cfg.forcing.as_mut(), path.parent()) {
            if table.is_relative() {
                *table = dir.join(&*table);
            }
        }
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let de = toml::Deserializer::new(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            ConfigError::field(if path == "." { "<root>".to_string() } else { path }, inner.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// A bare config for `validate`, which needs nothing else.
    pub fn validate_only() -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            kind: ExperimentKind::Validate,
            seed: 0,
            s: None,
            output: None,
            domain: None,
            time: None,
            forcing: None,
            solver: SolverConfig::default(),
            kernel: None,
            extend: None,
            regularity: None,
            halfspace: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::field(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        if let Some(s) = self.s {
            if !(s > 0.0 && s < 1.0) {
                return Err(ConfigError::field("s", format!("must lie in (0, 1), got {s}")));
            }
        }
        let needs_problem = matches!(
            self.kind,
            ExperimentKind::Solve | ExperimentKind::Kernel | ExperimentKind::Extend | ExperimentKind::Regularity
        );
        if needs_problem {
            self.require_s()?;
            let d = self.domain.as_ref().ok_or_else(|| ConfigError::field("domain", "missing section"))?;
            d.validate()?;
        }
        if matches!(self.kind, ExperimentKind::Solve | ExperimentKind::Extend | ExperimentKind::Regularity) {
            let t = self.time.ok_or_else(|| ConfigError::field("time", "missing section"))?;
            if !(t.period > 0.0) {
                return Err(ConfigError::field("time.period", "must be positive"));
            }
            if t.samples < 2 || t.samples % 2 != 0 {
                return Err(ConfigError::field("time.samples", "must be even and at least 2"));
            }
            let f = self.forcing.as_ref().ok_or_else(|| ConfigError::field("forcing", "missing section"))?;
            f.validate()?;
        }
        match self.kind {
            ExperimentKind::Kernel => {
                let k = self.kernel.as_ref().ok_or_else(|| ConfigError::field("kernel", "missing section"))?;
                if k.taus.is_empty() || k.xs.is_empty() || k.zs.is_empty() {
                    return Err(ConfigError::field("kernel", "taus, xs and zs must be nonempty"));
                }
                if let Some(i) = k.taus.iter().position(|t| !(*t > 0.0)) {
                    return Err(ConfigError::field(format!("kernel.taus[{i}]"), "τ must be positive"));
                }
            }
            ExperimentKind::Extend => {
                let e = self.extend.as_ref().ok_or_else(|| ConfigError::field("extend", "missing section"))?;
                if e.levels < 4 {
                    return Err(ConfigError::field("extend.levels", "need at least 4 levels"));
                }
                if !(0.0..1.0).contains(&e.window_fraction) {
                    return Err(ConfigError::field("extend.window_fraction", "must lie in [0, 1)"));
                }
            }
            ExperimentKind::Regularity => {
                let r = self.regularity.as_ref().ok_or_else(|| ConfigError::field("regularity", "missing section"))?;
                let dim = self.domain.as_ref().map_or(1, |d| d.lengths.len());
                if r.center_x.len() != dim {
                    return Err(ConfigError::field("regularity.center_x", format!("expected {dim} coordinates")));
                }
            }
            ExperimentKind::Halfspace => {
                self.require_s()?;
                let h = self.halfspace.as_ref().ok_or_else(|| ConfigError::field("halfspace", "missing section"))?;
                if let Some(i) = h.xs.iter().position(|x| !(*x >= 0.0)) {
                    return Err(ConfigError::field(format!("halfspace.xs[{i}]"), "x must be ≥ 0"));
                }
                if let Some(c) = h.consistency {
                    if !(c.length > 2.0) || c.intervals < 16 {
                        return Err(ConfigError::field("halfspace.consistency", "need length > 2 and ≥ 16 intervals"));
                    }
                }
            }
            _ => {}
        }
        if let Some(q) = &self.solver.quadrature {
            q.validate().map_err(|e| ConfigError::field("solver.quadrature", e.to_string()))?;
        }
        Ok(())
    }

    pub fn require_s(&self) -> Result<f64, ConfigError> {
        self.s.ok_or_else(|| ConfigError::field("s", "missing fractional order"))
    }
}

impl DomainConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        if self.lengths.is_empty() || self.lengths.len() > 2 {
            return Err(ConfigError::field("domain.lengths", "give one or two lengths"));
        }
        if let Some(i) = self.lengths.iter().position(|l| !(*l > 0.0)) {
            return Err(ConfigError::field(format!("domain.lengths[{i}]"), "lengths must be positive"));
        }
        if let Some(o) = &self.origin {
            if o.len() != self.lengths.len() {
                return Err(ConfigError::field("domain.origin", "needs one entry per length"));
            }
        }
        if self.grid_size < 3 {
            return Err(ConfigError::field("domain.grid_size", "must be at least 3"));
        }
        if let Some(k) = self.modes {
            if k == 0 || (self.lengths.len() == 1 && k > self.grid_size - 2) {
                return Err(ConfigError::field("domain.modes", format!("must lie in 1..={}", self.grid_size - 2)));
            }
        }
        if let CoefficientConfig::Profile { name } = &self.coefficient {
            if CoefficientProfile::from_name(name).is_none() {
                return Err(ConfigError::field("domain.coefficient.name", format!("unknown profile '{name}'")));
            }
        }
        self.to_spec().validate().map_err(|e| ConfigError::field("domain.coefficient", e.to_string()))
    }

    pub fn modes(&self) -> usize {
        self.modes.unwrap_or((self.grid_size / 2).max(1))
    }

    pub fn to_spec(&self) -> DomainSpec {
        let origin = self.origin.clone().unwrap_or_else(|| vec![0.0; self.lengths.len()]);
        let mut spec = if self.lengths.len() == 1 {
            DomainSpec::span(origin[0], origin[0] + self.lengths[0])
        } else {
            let mut d = DomainSpec::rectangle(self.lengths[0], self.lengths[1]);
            d.origin = origin.clone();
            d
        };
        let coefficient = match &self.coefficient {
            CoefficientConfig::Constant { value } => Coefficient::Constant(*value),
            CoefficientConfig::Matrix { value } => Coefficient::Matrix(*value),
            CoefficientConfig::Profile { name } => {
                Coefficient::Profile(CoefficientProfile::from_name(name).unwrap_or(CoefficientProfile::Unit))
            }
            CoefficientConfig::Table { nodes, values } => Coefficient::Table { nodes: nodes.clone(), values: values.clone() },
        };
        let (lo, hi) = self.ellipticity.map(|[a, b]| (a, b)).unwrap_or_else(|| coefficient_range(&coefficient));
        spec = spec.with_coefficient(coefficient, lo, hi);
        spec
    }
}

/// Smallest and largest value (or eigenvalue) of the coefficient.
fn coefficient_range(c: &Coefficient) -> (f64, f64) {
    match c {
        Coefficient::Constant(v) => (*v, *v),
        Coefficient::Matrix(m) => {
            let tr = m[0][0] + m[1][1];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
            (0.5 * tr - disc, 0.5 * tr + disc)
        }
        Coefficient::Profile(p) => match p {
            CoefficientProfile::Unit => (1.0, 1.0),
            CoefficientProfile::OnePlusHalfSin => (0.5, 1.5),
            CoefficientProfile::Ramp => (1.0, 2.0),
        },
        Coefficient::Table { values, .. } => values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v))),
    }
}

impl ForcingConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        match self {
            ForcingConfig::BandLimited { kmax, mmax } => {
                if *kmax == 0 || *mmax < 1 {
                    return Err(ConfigError::field("forcing", "kmax and mmax must be positive"));
                }
            }
            ForcingConfig::Bump { width, .. } => {
                if !(*width > 0.0) {
                    return Err(ConfigError::field("forcing.width", "must be positive"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOLVE: &str = r#"
schema_version = 1
kind = "solve"
s = 0.5

[domain]
lengths = [3.141592653589793]
bc = "dirichlet"
grid_size = 65

[time]
period = 8.0
samples = 16

[forcing]
profile = "mode"
k = 1
m = 2
"#;

    #[test]
    fn parses_a_solve_config() {
        let c = ExperimentConfig::from_toml(SOLVE).unwrap();
        assert_eq!(c.kind, ExperimentKind::Solve);
        assert_eq!(c.domain.as_ref().unwrap().modes(), 32);
    }

    #[test]
    fn schema_errors_name_the_field() {
        let bad = SOLVE.replace("grid_size = 65", "grid_size = \"many\"");
        let e = ExperimentConfig::from_toml(&bad).unwrap_err().to_string();
        assert!(e.starts_with("domain.grid_size"), "{e}");
        let bad = SOLVE.replace("s = 0.5", "s = 1.5");
        assert!(ExperimentConfig::from_toml(&bad).unwrap_err().to_string().starts_with("s:"));
        let bad = SOLVE.replace("schema_version = 1", "schema_version = 9");
        assert!(ExperimentConfig::from_toml(&bad).unwrap_err().to_string().starts_with("schema_version"));
        let bad = SOLVE.replace("samples = 16", "samples = 15");
        assert!(ExperimentConfig::from_toml(&bad).unwrap_err().to_string().starts_with("time.samples"));
        let bad = SOLVE.replace("bc = \"dirichlet\"", "bc = \"robin\"");
        assert!(ExperimentConfig::from_toml(&bad).unwrap_err().to_string().starts_with("domain.bc"));
    }
}
