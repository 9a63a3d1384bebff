//! Run configurations. Every field has a default, unknown fields are
//! rejected, and the parsed record is written back in canonical form.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use ymblow::inequality::HarnessConfig;
use ymblow::physical::PhysConfig;
use ymblow::radial::sobolev::NormSpec;
use ymblow::similarity::modulation::ModulationConfig;
use ymblow::similarity::Dynamics;
use ymblow::spectral::ProbeConfig;
use ymblow::PotentialForm;

use crate::Failure;

pub const CONFIG_VERSION: &str = "1";

fn version() -> String {
    CONFIG_VERSION.to_string()
}

/// Common interface of the subcommand configurations.
pub trait RunConfig: Serialize + DeserializeOwned + Default {
    fn config_version(&self) -> &str;

    /// Checks that do not need a run.
    fn validate(&self) -> Result<(), Failure> {
        Ok(())
    }
}

/// Reads a configuration file, or the defaults when `path` is `None`.
pub fn load<C: RunConfig>(path: Option<&Path>) -> Result<C, Failure> {
    let cfg: C = match path {
        None => C::default(),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Failure::usage("config_missing", format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::usage("config_parse", format!("{}: {e}", p.display())))?
        }
    };
    if cfg.config_version() != CONFIG_VERSION {
        return Err(Failure::usage(
            "config_version",
            format!("config_version {:?} not supported (expected {CONFIG_VERSION:?})", cfg.config_version()),
        ));
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Canonical serialization of a configuration.
pub fn canonical<C: Serialize>(cfg: &C) -> String {
    let mut s = serde_json::to_string_pretty(cfg).expect("configurations serialize");
    s.push('\n');
    s
}

/// Initial data of a physical run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhysData {
    /// `scale · u_T(0, ·)` with `u_T` the exact blowup solution.
    Exact {
        blowup: f64,
        scale: f64,
    },
    Zero,
    /// Exact data with `T = 1` plus a seeded perturbation of given pair norm.
    Perturbed {
        seed: u64,
        index: u64,
        size: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysRunConfig {
    pub config_version: String,
    pub d: u32,
    pub r_max: f64,
    pub nodes: usize,
    pub data: PhysData,
    pub run: PhysConfig,
    /// Fit window start and search length of the corrected blowup-time fit.
    pub corrected_fit_start: f64,
    pub corrected_fit_search: f64,
    /// Exponent of the correction term; `None` takes the leading stable
    /// eigenvalue from the spectral probe.
    pub correction_exponent: Option<f64>,
    pub profile_window: f64,
    pub profile_points: usize,
}

impl Default for PhysRunConfig {
    fn default() -> Self {
        Self {
            config_version: version(),
            d: 5,
            r_max: 8.0,
            nodes: 4096,
            data: PhysData::Exact { blowup: 1.0, scale: 1.0 },
            run: PhysConfig::default(),
            corrected_fit_start: 0.5,
            corrected_fit_search: 0.05,
            correction_exponent: None,
            profile_window: 3.0,
            profile_points: 301,
        }
    }
}

impl RunConfig for PhysRunConfig {
    fn config_version(&self) -> &str {
        &self.config_version
    }
}

/// Initial data of a similarity run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SimData {
    /// The static profile; only meaningful with `full` dynamics.
    Profile,
    /// `amplitude` times the gauge mode, as a deviation.
    Gauge { amplitude: f64 },
    /// Deviation generated by a seeded perturbation at trial time `t_blowup`.
    Seeded { seed: u64, index: u64, size: f64, t_blowup: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimRunConfig {
    pub config_version: String,
    pub d: u32,
    pub rho_max: f64,
    pub nodes: usize,
    pub dynamics: Dynamics,
    pub data: SimData,
    pub tau_end: f64,
    pub cfl: f64,
    pub sample_every: f64,
    /// Norm exponents; defaults to `((n-3)/2, n/2-1)`.
    pub spec: Option<NormSpec>,
    pub source_r_max: f64,
    pub source_nodes: usize,
}

impl Default for SimRunConfig {
    fn default() -> Self {
        Self {
            config_version: version(),
            d: 5,
            rho_max: 4.0,
            nodes: 512,
            dynamics: Dynamics::Linearized,
            data: SimData::Gauge { amplitude: 1e-3 },
            tau_end: 5.0,
            cfl: 0.5,
            sample_every: 0.1,
            spec: None,
            source_r_max: 8.0,
            source_nodes: 4096,
        }
    }
}

impl RunConfig for SimRunConfig {
    fn config_version(&self) -> &str {
        &self.config_version
    }
}

/// Perturbation fed to the blowup-time selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PerturbationSpec {
    Zero,
    Seeded { seed: u64, index: u64, size: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModulateConfig {
    pub config_version: String,
    pub d: u32,
    pub rho_max: f64,
    pub nodes: usize,
    pub source_r_max: f64,
    pub source_nodes: usize,
    pub perturbation: PerturbationSpec,
    pub modulation: ModulationConfig,
}

impl Default for ModulateConfig {
    fn default() -> Self {
        Self {
            config_version: version(),
            d: 5,
            rho_max: 4.0,
            nodes: 512,
            source_r_max: 8.0,
            source_nodes: 4096,
            perturbation: PerturbationSpec::Seeded { seed: 1, index: 0, size: 1e-3 },
            modulation: ModulationConfig::default(),
        }
    }
}

impl RunConfig for ModulateConfig {
    fn config_version(&self) -> &str {
        &self.config_version
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub config_version: String,
    pub d: u32,
    /// `[re_min, re_max, im_min, im_max]`.
    pub scan_box: [f64; 4],
    /// Center of a disk removed from the count.
    pub exclude: Option<[f64; 2]>,
    pub exclude_radius: f64,
    pub form: PotentialForm,
    pub probe: ProbeConfig,
    /// Also search the spectral gap up to this `ω`.
    pub gap_omega_max: Option<f64>,
    pub gap_step: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            config_version: version(),
            d: 5,
            scan_box: [0.5, 1.5, -0.5, 0.5],
            exclude: None,
            exclude_radius: 0.1,
            form: PotentialForm::default(),
            probe: ProbeConfig::default(),
            gap_omega_max: None,
            gap_step: 0.05,
        }
    }
}

impl RunConfig for SpectrumConfig {
    fn config_version(&self) -> &str {
        &self.config_version
    }

    fn validate(&self) -> Result<(), Failure> {
        let [a, b, c, d] = self.scan_box;
        if !(a < b && c < d) {
            return Err(Failure::usage("config", format!("empty scan box {:?}", self.scan_box)));
        }
        Ok(())
    }
}

/// Which inequality checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Product,
    Cubic,
    Lipschitz,
    Square,
    Hardy,
    WeightedSup,
    Corotational,
    Equivalence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InequalityConfig {
    pub config_version: String,
    pub suite: Suite,
    pub d: u32,
    pub spec: NormSpec,
    pub harness: HarnessConfig,
    pub lipschitz_delta: f64,
    pub square_k: u32,
    pub hardy_k: u32,
    pub sup_s: f64,
    pub monte_carlo_samples: usize,
    pub monte_carlo_width: f64,
    pub equivalence_tol: f64,
}

impl Default for InequalityConfig {
    fn default() -> Self {
        Self {
            config_version: version(),
            suite: Suite::All,
            d: 5,
            spec: NormSpec { s1: 2.0, s2: 2.5 },
            harness: HarnessConfig::default(),
            lipschitz_delta: 1.0,
            square_k: 3,
            hardy_k: 2,
            sup_s: 2.0,
            monte_carlo_samples: 10_000_000,
            monte_carlo_width: 0.6,
            equivalence_tol: 1e-6,
        }
    }
}

impl RunConfig for InequalityConfig {
    fn config_version(&self) -> &str {
        &self.config_version
    }
}

/// Which acceptance criteria `verify` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub config_version: String,
    pub level: Level,
    pub seed: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { config_version: version(), level: Level::Quick, seed: 1 }
    }
}

impl RunConfig for VerifyConfig {
    fn config_version(&self) -> &str {
        &self.config_version
    }
}
