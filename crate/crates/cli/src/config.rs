//! Experiment configuration: one TOML file per run, with `--set` overrides
//! applied to the parsed document before it is typed.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use koopman_lift::dynamics::{CableParams, CableSystem, CircleRotation, Domain, IdentityMap, PiecewiseLinearMap, System};
use koopman_lift::observables::SampleRecipe;
use koopman_lift::quadrature::RuleSpec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed for quadrature shifts, center sampling and k-means.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    pub system: SystemConfig,
    pub dictionary: DictionaryConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub encoding: EncodingConfig,
    #[serde(default)]
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemConfig {
    Identity {
        #[serde(default = "unit_lower")]
        lower: Vec<f64>,
        #[serde(default = "unit_upper")]
        upper: Vec<f64>,
    },
    Rotation {
        shift: f64,
    },
    Piecewise {
        #[serde(default = "default_a")]
        a: f64,
        #[serde(default = "default_b")]
        b: f64,
        #[serde(default = "default_c")]
        c: f64,
        #[serde(default = "default_x_star")]
        x_star: f64,
    },
    Cable {
        #[serde(default)]
        params: CableParams,
        lower: Option<Vec<f64>>,
        upper: Option<Vec<f64>>,
    },
}

fn unit_lower() -> Vec<f64> {
    vec![0.0]
}
fn unit_upper() -> Vec<f64> {
    vec![1.0]
}
fn default_a() -> f64 {
    PiecewiseLinearMap::default().a()
}
fn default_b() -> f64 {
    PiecewiseLinearMap::default().b()
}
fn default_c() -> f64 {
    PiecewiseLinearMap::default().c()
}
fn default_x_star() -> f64 {
    PiecewiseLinearMap::default().x_star()
}

impl SystemConfig {
    pub fn build(&self) -> Result<System> {
        Ok(match self {
            SystemConfig::Identity { lower, upper } => {
                let domain = Domain::new(lower.clone(), upper.clone()).context("system.lower / system.upper")?;
                System::Identity(IdentityMap::new(domain))
            }
            SystemConfig::Rotation { shift } => {
                System::Rotation(CircleRotation::new(*shift).context("system.shift")?)
            }
            SystemConfig::Piecewise { a, b, c, x_star } => {
                System::Piecewise(PiecewiseLinearMap::new(*a, *b, *c, *x_star).context("system.{a, b, c, x_star}")?)
            }
            SystemConfig::Cable { params, lower, upper } => {
                let domain = match (lower, upper) {
                    (None, None) => CableSystem::default_domain(),
                    (Some(lo), Some(hi)) => {
                        Domain::new(lo.clone(), hi.clone()).context("system.lower / system.upper")?
                    }
                    _ => bail!("system.lower and system.upper must be given together"),
                };
                System::Cable(CableSystem::new(params.clone(), domain).context("system.params")?)
            }
        })
    }

    /// Column names for state trajectories.
    pub fn component_names(&self, dim: usize) -> Vec<String> {
        match self {
            SystemConfig::Cable { .. } => ["x", "y", "vx", "vy"].map(String::from).to_vec(),
            _ if dim == 1 => vec!["x".into()],
            _ => (0..dim).map(|d| format!("x{d}")).collect(),
        }
    }

    /// Initial state used when `scenario.x0` is empty.
    pub fn default_x0(&self, domain: &Domain) -> Vec<f64> {
        match self {
            SystemConfig::Cable { .. } => vec![0.3, -0.6, 0.0, 0.0],
            SystemConfig::Piecewise { .. } => vec![0.3],
            _ => domain
                .lower()
                .iter()
                .zip(domain.upper())
                .map(|(l, u)| l + 0.3 * (u - l))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DictionaryConfig {
    /// Complex exponentials, `m = 2·n_max + 1`.
    ExpTrig { n_max: usize },
    /// Constant, cosines and sines, `m = 2·n_max + 1`.
    RealFourier { n_max: usize },
    GaussianRbf {
        /// Number of k-means++ centers drawn from sample trajectories.
        #[serde(default = "default_center_count")]
        centers: usize,
        #[serde(default = "default_width_scale")]
        width_scale: f64,
        /// Sample-trajectory recipe; its seed is replaced by the master seed.
        #[serde(default)]
        samples: SampleConfig,
        /// Reads centers and widths from a CSV instead of sampling.
        #[serde(default)]
        centers_file: Option<PathBuf>,
    },
}

fn default_center_count() -> usize {
    300
}
fn default_width_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    pub trajectories: usize,
    pub steps: usize,
}

impl Default for SampleConfig {
    fn default() -> Self {
        let r = SampleRecipe::default();
        Self {
            trajectories: r.trajectories,
            steps: r.steps,
        }
    }
}

impl SampleConfig {
    pub fn recipe(&self, seed: u64) -> SampleRecipe {
        SampleRecipe {
            trajectories: self.trajectories,
            steps: self.steps,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Gauss-Legendre points per panel (one-dimensional domains).
    pub points_per_panel: usize,
    /// Panel count; `0` picks `max(256, 4·n_max)` for Fourier dictionaries.
    pub panel_count: usize,
    /// Sobol points (multi-dimensional domains).
    pub sample_count: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            points_per_panel: RuleSpec::DEFAULT_POINTS_PER_PANEL,
            panel_count: 0,
            sample_count: RuleSpec::DEFAULT_SAMPLE_COUNT,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncodingConfig {
    /// Tikhonov weight; unset uses the dictionary default.
    pub lambda: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Initial state; empty uses the system default.
    pub x0: Vec<f64>,
    pub steps: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self { x0: Vec::new(), steps: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub stability_eps: f64,
    /// Dictionary sizes `m` for `sweep` (odd).
    pub sweep_sizes: Vec<usize>,
    /// Dictionary sizes `m` for `kernel-check` (odd).
    pub kernel_sizes: Vec<usize>,
    pub kernel_grid: usize,
    /// Half-width of the excluded neighbourhood of each breakpoint.
    pub kernel_exclusion: f64,
    pub residual_harmonics: Vec<i64>,
    pub residual_sizes: Vec<usize>,
    pub residual_grid: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            stability_eps: koopman_lift::analysis::STABILITY_EPS,
            sweep_sizes: vec![17, 33, 257, 1025],
            kernel_sizes: vec![17, 33, 257],
            kernel_grid: 200,
            kernel_exclusion: 0.02,
            residual_harmonics: vec![1, 2, 5],
            residual_sizes: vec![1, 3, 9, 17, 33, 65, 129, 257, 513],
            residual_grid: 4096,
        }
    }
}

impl ExperimentConfig {
    /// Reads `path`, applies `key=value` overrides and types the result.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text, overrides).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Table = text.parse().context("invalid TOML")?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let cfg: Self = serde_path_to_error::deserialize(toml::Value::Table(doc)).map_err(|e| {
            let path = e.path().to_string();
            let msg = e.into_inner().message().to_string();
            if path == "." {
                anyhow::anyhow!("invalid configuration: {msg}")
            } else {
                anyhow::anyhow!("invalid configuration at `{path}`: {msg}")
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let q = &self.quadrature;
        if q.points_per_panel == 0 {
            bail!("quadrature.points_per_panel must be positive");
        }
        if q.sample_count == 0 {
            bail!("quadrature.sample_count must be positive");
        }
        if let Some(l) = self.encoding.lambda {
            if !(l.is_finite() && l >= 0.0) {
                bail!("encoding.lambda must be finite and non-negative, got {l}");
            }
        }
        if let DictionaryConfig::GaussianRbf { centers, width_scale, .. } = &self.dictionary {
            if *centers == 0 {
                bail!("dictionary.centers must be positive");
            }
            if !(width_scale.is_finite() && *width_scale > 0.0) {
                bail!("dictionary.width_scale must be positive, got {width_scale}");
            }
        }
        let a = &self.analysis;
        for (key, sizes) in [("analysis.sweep_sizes", &a.sweep_sizes), ("analysis.kernel_sizes", &a.kernel_sizes)] {
            if let Some(m) = sizes.iter().find(|m| **m % 2 == 0) {
                bail!("{key}: dictionary size {m} is even; Fourier families have odd sizes");
            }
        }
        if !(a.stability_eps.is_finite() && a.stability_eps >= 0.0) {
            bail!("analysis.stability_eps must be non-negative");
        }
        Ok(())
    }

    /// Canonical TOML text of the resolved configuration.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("serializing configuration")
    }
}

/// Sets a dotted key, e.g. `dictionary.n_max=64`. The value is parsed as a
/// TOML value and falls back to a plain string.
fn apply_override(doc: &mut toml::Table, spec: &str) -> Result<()> {
    let Some((key, raw)) = spec.split_once('=') else {
        bail!("override `{spec}` is not of the form key=value");
    };
    let key = key.trim();
    let value = parse_value(raw.trim());
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        bail!("override key `{key}` has an empty segment");
    }
    let (last, parents) = parts.split_last().expect("split yields at least one part");
    let mut table = doc;
    for (depth, p) in parents.iter().enumerate() {
        let entry = table
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = match entry {
            toml::Value::Table(t) => t,
            _ => bail!("override key `{key}`: `{}` is not a table", parts[..=depth].join(".")),
        };
    }
    table.insert(last.to_string(), value);
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[system]\nkind = \"piecewise\"\n[dictionary]\nkind = \"real_fourier\"\nn_max = 8\n";

    #[test]
    fn defaults_fill_missing_sections() {
        let cfg = ExperimentConfig::parse(MINIMAL, &[]).unwrap();
        assert_eq!(cfg.scenario.steps, 100);
        assert_eq!(cfg.quadrature.points_per_panel, 8);
        assert!(matches!(cfg.system, SystemConfig::Piecewise { x_star, .. } if x_star == 0.5));
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let cfg = ExperimentConfig::parse(
            MINIMAL,
            &["dictionary.n_max=32".into(), "scenario.x0=[0.1]".into(), "encoding.lambda=1e-6".into()],
        )
        .unwrap();
        assert_eq!(cfg.dictionary, DictionaryConfig::RealFourier { n_max: 32 });
        assert_eq!(cfg.scenario.x0, vec![0.1]);
        assert_eq!(cfg.encoding.lambda, Some(1e-6));
    }

    #[test]
    fn unknown_key_is_named() {
        let err = ExperimentConfig::parse(&format!("{MINIMAL}[scenario]\nstep = 3\n"), &[]).unwrap_err();
        assert!(format!("{err:#}").contains("step"), "{err:#}");
    }

    #[test]
    fn malformed_override_is_rejected() {
        assert!(ExperimentConfig::parse(MINIMAL, &["dictionary".into()]).is_err());
        assert!(ExperimentConfig::parse(MINIMAL, &["seed.x=1".into()]).is_err());
    }

    #[test]
    fn even_sweep_size_is_rejected() {
        let err = ExperimentConfig::parse(MINIMAL, &["analysis.sweep_sizes=[16]".into()]).unwrap_err();
        assert!(err.to_string().contains("analysis.sweep_sizes"));
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = ExperimentConfig::parse(MINIMAL, &[]).unwrap();
        let again = ExperimentConfig::parse(&cfg.to_toml().unwrap(), &[]).unwrap();
        assert_eq!(cfg, again);
    }
}
