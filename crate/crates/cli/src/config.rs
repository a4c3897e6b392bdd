//! Run configuration, read from JSON. Unknown keys are rejected everywhere.

use std::path::Path;

use layermodes_core::completeness::{ClassifyOptions, EigenvalueLaw, TailModel};
use layermodes_core::modefinder::polynomial::quarterwave_stack;
use layermodes_core::{FrequencyScale, Layer, Material, Polarization, SearchRegion, Stack};
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub stack: Option<StackConfig>,
    #[serde(default)]
    pub modes: Option<ModesConfig>,
    #[serde(default)]
    pub spectrum: Option<SpectrumConfig>,
    #[serde(default)]
    pub census: Option<CensusConfig>,
    #[serde(default)]
    pub asymptotics: Option<AsymptoticsConfig>,
    #[serde(default)]
    pub completeness: Option<CompletenessConfig>,
    /// Output directory; `--out` overrides it.
    #[serde(default)]
    pub output_dir: Option<std::path::PathBuf>,
    /// Seed for the contour jitter; `--seed` overrides it.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MaterialConfig {
    Constant {
        n: f64,
        #[serde(default)]
        k: f64,
    },
    Lorentz {
        f: f64,
        omega0: f64,
        gamma: f64,
    },
}

impl MaterialConfig {
    pub fn build(&self) -> Result<Material, CliError> {
        match *self {
            MaterialConfig::Constant { n, k } => {
                let m = Material::Constant { n: layermodes_core::Complex64::new(n, k) };
                m.validate()?;
                Ok(m)
            }
            MaterialConfig::Lorentz { f, omega0, gamma } => Ok(Material::lorentz(f, omega0, gamma)?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub material: MaterialConfig,
    pub thickness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum PolarizationConfig {
    Te,
    Tm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StackConfig {
    /// Explicit media, listed from the incidence side.
    Layered {
        ambient_in: MaterialConfig,
        layers: Vec<LayerConfig>,
        ambient_out: MaterialConfig,
        #[serde(default = "te")]
        polarization: PolarizationConfig,
        #[serde(default)]
        theta0: f64,
        #[serde(default = "one")]
        c: f64,
    },
    /// Alternating layers of index `ratio` and 1 with unit optical thickness.
    QuarterWave { ratio: f64, layers: usize },
}

fn te() -> PolarizationConfig {
    PolarizationConfig::Te
}

fn one() -> f64 {
    1.0
}

impl StackConfig {
    pub fn build(&self) -> Result<Stack, CliError> {
        match self {
            StackConfig::Layered { ambient_in, layers, ambient_out, polarization, theta0, c } => {
                let layers = layers
                    .iter()
                    .map(|l| Ok(Layer::new(l.material.build()?, l.thickness)))
                    .collect::<Result<Vec<_>, CliError>>()?;
                let pol = match polarization {
                    PolarizationConfig::Te => Polarization::Te,
                    PolarizationConfig::Tm => Polarization::Tm,
                };
                Ok(Stack::new(ambient_in.build()?, layers, ambient_out.build()?, pol, *theta0, FrequencyScale::new(*c)?)?)
            }
            StackConfig::QuarterWave { ratio, layers } => Ok(quarterwave_stack(*ratio, *layers)?),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RegionConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum ModeMethod {
    /// Argument-principle subdivision with Newton polishing.
    Contour,
    /// Roots of the equal-phase polynomial (equal optical thicknesses only).
    ExactPolynomial,
}

fn contour() -> ModeMethod {
    ModeMethod::Contour
}

fn max_depth() -> u32 {
    layermodes_core::modefinder::DEFAULT_MAX_DEPTH
}

fn newton_tol() -> f64 {
    layermodes_core::modefinder::DEFAULT_NEWTON_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ModesConfig {
    pub region: RegionConfig,
    #[serde(default = "contour")]
    pub method: ModeMethod,
    #[serde(default = "max_depth")]
    pub max_depth: u32,
    #[serde(default = "newton_tol")]
    pub newton_tol: f64,
    /// Radius of the disks left out around material poles; defaults to `max(1e-3 Γ, 1e-8)`.
    #[serde(default)]
    pub exclusion_radius: Option<f64>,
}

impl ModesConfig {
    pub fn search_region(&self, seed: u64) -> Result<SearchRegion, CliError> {
        region(&self.region, self.max_depth, self.newton_tol, self.exclusion_radius, seed)
    }
}

pub fn region(
    r: &RegionConfig,
    max_depth: u32,
    newton_tol: f64,
    exclusion_radius: Option<f64>,
    seed: u64,
) -> Result<SearchRegion, CliError> {
    let mut region = SearchRegion::new(r.re_min, r.re_max, r.im_min, r.im_max)?;
    region.max_depth = max_depth;
    region.newton_tol = newton_tol;
    region.exclusion_radius = exclusion_radius;
    region.seed = seed;
    region.validate()?;
    Ok(region)
}

fn points() -> usize {
    1000
}

fn half() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub omega_min: f64,
    pub omega_max: f64,
    #[serde(default = "points")]
    pub points: usize,
    /// Transmittance below which a grid point counts as part of a stop band.
    #[serde(default = "half")]
    pub stop_band_threshold: f64,
}

fn radii() -> Vec<f64> {
    vec![0.1, 0.05, 0.02, 0.01]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CensusConfig {
    pub region: RegionConfig,
    /// Disk centres `[re, im]`; defaults to the material poles inside the region.
    #[serde(default)]
    pub poles: Option<Vec<[f64; 2]>>,
    #[serde(default = "radii")]
    pub radii: Vec<f64>,
    #[serde(default = "max_depth")]
    pub max_depth: u32,
    #[serde(default = "newton_tol")]
    pub newton_tol: f64,
    #[serde(default)]
    pub exclusion_radius: Option<f64>,
}

fn orders() -> Vec<i64> {
    vec![10, 20, 50, 100]
}

fn m_min() -> i64 {
    layermodes_core::analysis::ASYMPTOTIC_M_MIN
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticsConfig {
    /// High-frequency coefficient `A`; defaults to the sum of the Lorentz strengths.
    #[serde(default)]
    pub a: Option<f64>,
    /// Thickness; defaults to the total stack thickness.
    #[serde(default)]
    pub d: Option<f64>,
    #[serde(default = "orders")]
    pub orders: Vec<i64>,
    #[serde(default = "m_min")]
    pub m_min: i64,
    /// Polish each decaying approximation into an exact mode of the stack.
    #[serde(default)]
    pub compare_exact: bool,
    /// Near-resonance family per Lorentz layer for these orders.
    #[serde(default)]
    pub near_resonance: Option<NearResonanceConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct NearResonanceConfig {
    pub m_min: u32,
    pub m_max: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EigenvalueSetConfig {
    /// `λ_{±m} = ±spacing (m − shift)`.
    Arithmetic {
        #[serde(default = "pi")]
        spacing: f64,
        #[serde(default)]
        shift: f64,
    },
    /// `λ_m = mπ + i log(4m²π²/(A d²))`.
    LargeFrequency { a: f64, d: f64 },
}

fn pi() -> f64 {
    std::f64::consts::PI
}

impl EigenvalueSetConfig {
    pub fn law(&self) -> EigenvalueLaw {
        match *self {
            EigenvalueSetConfig::Arithmetic { spacing, shift } => EigenvalueLaw::Arithmetic { spacing, shift },
            EigenvalueSetConfig::LargeFrequency { a, d } => EigenvalueLaw::LargeFrequency { a, d },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum TailModelConfig {
    None,
    AsymptoticPairing,
}

impl From<TailModelConfig> for TailModel {
    fn from(t: TailModelConfig) -> Self {
        match t {
            TailModelConfig::None => TailModel::None,
            TailModelConfig::AsymptoticPairing => TailModel::AsymptoticPairing,
        }
    }
}

fn truncation() -> usize {
    100_000
}

fn pairing() -> TailModelConfig {
    TailModelConfig::AsymptoticPairing
}

fn x_min() -> f64 {
    1.0
}

fn x_max() -> f64 {
    1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CompletenessConfig {
    #[serde(default)]
    pub set: Option<EigenvalueSetConfig>,
    /// Indices `m` whose factors are dropped from the set.
    #[serde(default)]
    pub remove: Vec<i64>,
    #[serde(default = "truncation")]
    pub truncation: usize,
    #[serde(default = "pairing")]
    pub tail_model: TailModelConfig,
    #[serde(default = "x_min")]
    pub x_min: f64,
    #[serde(default = "x_max")]
    pub x_max: f64,
    #[serde(default)]
    pub classify: ClassifyConfig,
    #[serde(default)]
    pub constancy: Option<ConstancyConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyConfig {
    pub margin: f64,
    pub fit_threshold: f64,
    pub points_per_decade: usize,
    pub check_doubling: bool,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        let d = ClassifyOptions::default();
        Self { margin: d.margin, fit_threshold: d.fit_threshold, points_per_decade: d.points_per_decade, check_doubling: d.check_doubling }
    }
}

impl From<ClassifyConfig> for ClassifyOptions {
    fn from(c: ClassifyConfig) -> Self {
        Self { margin: c.margin, fit_threshold: c.fit_threshold, points_per_decade: c.points_per_decade, check_doubling: c.check_doubling }
    }
}

fn samples() -> usize {
    41
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ConstancyConfig {
    pub a: f64,
    pub d: f64,
    #[serde(default = "truncation")]
    pub truncation: usize,
    pub z_min: f64,
    pub z_max: f64,
    /// Log-spaced sample count on `[z_min, z_max]`.
    #[serde(default = "samples")]
    pub samples: usize,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("{e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// First 16 hex digits of the SHA-256 of the normalized configuration.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&canonical)[..8])
    }

    pub fn stack(&self) -> Result<Stack, CliError> {
        self.stack.as_ref().ok_or_else(|| CliError::Config("missing `stack` section".into()))?.build()
    }
}

pub fn section<'a, T>(s: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
    s.as_ref().ok_or_else(|| CliError::Config(format!("missing `{name}` section")))
}

/// JSON schema of [`RunConfig`], as shipped in `docs/config.schema.json`.
pub fn schema() -> String {
    let mut text = serde_json::to_string_pretty(&schemars::schema_for!(RunConfig)).expect("schema serializes");
    text.push('\n');
    text
}
