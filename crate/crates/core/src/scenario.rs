//! Scenario parameter sets and simulation configuration.
//!
//! Four indoor-office scenarios are supported: 28 GHz and 140 GHz, each in
//! line-of-sight (LOS) and non-line-of-sight (NLOS) conditions. Each one maps
//! to a fixed [`ScenarioParams`] row; any field can be overridden by its
//! canonical key name (see [`ScenarioParams::set`]).
//!
//! The path-loss exponents for 140 GHz (2.0 LOS, 3.0 NLOS) are placeholders
//! and do not come from 140 GHz measurements. They only scale received power,
//! so none of the delay or angular statistics depend on them.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum inter-cluster void interval used for indoor office channels, ns.
pub const DEFAULT_MTI_NS: f64 = 6.0;
pub const DEFAULT_PDP_BIN_NS: f64 = 0.5;
pub const MIN_DISTANCE_M: f64 = 1.0;
pub const MAX_DISTANCE_M: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Band {
    #[serde(rename = "28GHz")]
    Ghz28,
    #[serde(rename = "140GHz")]
    Ghz140,
}

impl Band {
    pub fn frequency_hz(self) -> f64 {
        match self {
            Band::Ghz28 => 28.0e9,
            Band::Ghz140 => 140.0e9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Visibility {
    #[serde(rename = "LOS")]
    Los,
    #[serde(rename = "NLOS")]
    Nlos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Scenario {
    pub band: Band,
    pub visibility: Visibility,
}

impl Scenario {
    pub const GHZ28_LOS: Scenario = Scenario::new(Band::Ghz28, Visibility::Los);
    pub const GHZ28_NLOS: Scenario = Scenario::new(Band::Ghz28, Visibility::Nlos);
    pub const GHZ140_LOS: Scenario = Scenario::new(Band::Ghz140, Visibility::Los);
    pub const GHZ140_NLOS: Scenario = Scenario::new(Band::Ghz140, Visibility::Nlos);

    /// All four scenarios, in table column order.
    pub const ALL: [Scenario; 4] = [
        Scenario::GHZ28_LOS,
        Scenario::GHZ28_NLOS,
        Scenario::GHZ140_LOS,
        Scenario::GHZ140_NLOS,
    ];

    pub const fn new(band: Band, visibility: Visibility) -> Self {
        Scenario { band, visibility }
    }

    pub fn frequency_hz(self) -> f64 {
        self.band.frequency_hz()
    }

    pub fn is_los(self) -> bool {
        self.visibility == Visibility::Los
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let band = match self.band {
            Band::Ghz28 => "28GHz",
            Band::Ghz140 => "140GHz",
        };
        let vis = match self.visibility {
            Visibility::Los => "LOS",
            Visibility::Nlos => "NLOS",
        };
        write!(f, "{band}-{vis}")
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    /// Accepts forms like `28-los`, `28GHz-NLOS`, `140_nlos`, `140los`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        let norm = norm.replace("ghz", "");
        let scenario = match norm.as_str() {
            "28los" => Scenario::GHZ28_LOS,
            "28nlos" => Scenario::GHZ28_NLOS,
            "140los" => Scenario::GHZ140_LOS,
            "140nlos" => Scenario::GHZ140_NLOS,
            _ => {
                return Err(ConfigError::MalformedOverride {
                    key: "scenario".into(),
                    reason: format!("unknown scenario `{s}` (expected 28-los, 28-nlos, 140-los, 140-nlos)"),
                })
            }
        };
        Ok(scenario)
    }
}

/// Step 1 law for the number of time clusters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum ClusterCountLaw {
    /// LOS: N ~ DU(1, n_c_max).
    DiscreteUniform { n_c_max: u32 },
    /// NLOS: N = 1 + Poisson(lambda_c).
    ShiftedPoisson { lambda_c: f64 },
}

/// Law of the pre-sort inter-cluster delay draws, in ns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum ClusterDelayDist {
    Exponential { mu_tau: f64 },
    /// Mean and standard deviation of ln(delay / 1 ns).
    Lognormal { mu_tau: f64, sigma_tau: f64 },
}

/// Everything needed to generate channels for one scenario.
///
/// Angles are in degrees, delays in ns, shadowing in dB. Elevation means
/// (`mu_l_zod`, `mu_l_zoa`) are signed elevations above the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub cluster_count: ClusterCountLaw,
    pub beta_s: f64,
    pub mu_s: f64,
    pub cluster_delay: ClusterDelayDist,
    pub mu_rho: f64,
    pub mti: f64,
    pub gamma_cluster: f64,
    pub sigma_z: f64,
    pub gamma_subpath: f64,
    pub sigma_u: f64,
    pub l_aod_max: u32,
    pub l_aoa_max: u32,
    pub mu_l_zod: f64,
    pub sigma_l_zod: f64,
    pub mu_l_zoa: f64,
    pub sigma_l_zoa: f64,
    pub sigma_phi_aod: f64,
    pub sigma_theta_aod: f64,
    pub sigma_phi_aoa: f64,
    pub sigma_theta_aoa: f64,
    pub ple: f64,
    pub sigma_sf: f64,
}

/// Canonical override keys, in dump order.
pub const PARAM_KEYS: &[&str] = &[
    "n_c_max",
    "lambda_c",
    "beta_s",
    "mu_s",
    "cluster_delay_dist",
    "mu_tau",
    "sigma_tau",
    "mu_rho",
    "mti",
    "gamma_cluster",
    "sigma_z",
    "gamma_subpath",
    "sigma_u",
    "l_aod_max",
    "l_aoa_max",
    "mu_l_zod",
    "sigma_l_zod",
    "mu_l_zoa",
    "sigma_l_zoa",
    "sigma_phi_aod",
    "sigma_theta_aod",
    "sigma_phi_aoa",
    "sigma_theta_aoa",
    "ple",
    "sigma_sf",
];

/// Returns the parameter row for `scenario`.
pub fn lookup_params(scenario: Scenario) -> ScenarioParams {
    match (scenario.band, scenario.visibility) {
        (Band::Ghz28, Visibility::Los) => ScenarioParams {
            cluster_count: ClusterCountLaw::DiscreteUniform { n_c_max: 5 },
            beta_s: 0.8,
            mu_s: 2.4,
            cluster_delay: ClusterDelayDist::Lognormal { mu_tau: 2.7, sigma_tau: 1.4 },
            mu_rho: 2.6,
            mti: DEFAULT_MTI_NS,
            gamma_cluster: 38.7,
            sigma_z: 5.0,
            gamma_subpath: 2.5,
            sigma_u: 7.0,
            l_aod_max: 2,
            l_aoa_max: 2,
            mu_l_zod: -7.3,
            sigma_l_zod: 3.8,
            mu_l_zoa: 7.4,
            sigma_l_zoa: 3.8,
            sigma_phi_aod: 23.5,
            sigma_theta_aod: 16.0,
            sigma_phi_aoa: 19.3,
            sigma_theta_aoa: 14.5,
            ple: 1.2,
            sigma_sf: 0.0,
        },
        (Band::Ghz28, Visibility::Nlos) => ScenarioParams {
            cluster_count: ClusterCountLaw::ShiftedPoisson { lambda_c: 3.4 },
            beta_s: 0.6,
            mu_s: 4.1,
            cluster_delay: ClusterDelayDist::Exponential { mu_tau: 12.1 },
            mu_rho: 15.7,
            mti: DEFAULT_MTI_NS,
            gamma_cluster: 20.1,
            sigma_z: 7.0,
            gamma_subpath: 5.0,
            sigma_u: 8.0,
            l_aod_max: 2,
            l_aoa_max: 3,
            mu_l_zod: -5.5,
            sigma_l_zod: 2.9,
            mu_l_zoa: 5.5,
            sigma_l_zoa: 2.9,
            sigma_phi_aod: 31.6,
            sigma_theta_aod: 15.6,
            sigma_phi_aoa: 25.5,
            sigma_theta_aoa: 14.6,
            ple: 2.8,
            sigma_sf: 0.0,
        },
        (Band::Ghz140, Visibility::Los) => ScenarioParams {
            cluster_count: ClusterCountLaw::DiscreteUniform { n_c_max: 4 },
            beta_s: 0.8,
            mu_s: 1.0,
            cluster_delay: ClusterDelayDist::Exponential { mu_tau: 18.6 },
            mu_rho: 2.2,
            mti: DEFAULT_MTI_NS,
            gamma_cluster: 6.0,
            sigma_z: 3.0,
            gamma_subpath: 1.4,
            sigma_u: 5.0,
            l_aod_max: 2,
            l_aoa_max: 2,
            mu_l_zod: -6.8,
            sigma_l_zod: 4.9,
            mu_l_zoa: 7.4,
            sigma_l_zoa: 4.5,
            sigma_phi_aod: 4.8,
            sigma_theta_aod: 4.2,
            sigma_phi_aoa: 4.8,
            sigma_theta_aoa: 4.3,
            // placeholder, not measured at 140 GHz
            ple: 2.0,
            sigma_sf: 0.0,
        },
        (Band::Ghz140, Visibility::Nlos) => ScenarioParams {
            cluster_count: ClusterCountLaw::ShiftedPoisson { lambda_c: 1.3 },
            beta_s: 1.0,
            mu_s: 1.0,
            cluster_delay: ClusterDelayDist::Exponential { mu_tau: 23.5 },
            mu_rho: 2.2,
            mti: DEFAULT_MTI_NS,
            gamma_cluster: 13.4,
            sigma_z: 5.0,
            gamma_subpath: 2.0,
            sigma_u: 6.0,
            l_aod_max: 2,
            l_aoa_max: 2,
            mu_l_zod: -2.5,
            sigma_l_zod: 2.7,
            mu_l_zoa: 4.8,
            sigma_l_zoa: 2.8,
            sigma_phi_aod: 5.1,
            sigma_theta_aod: 4.1,
            sigma_phi_aoa: 5.4,
            sigma_theta_aoa: 4.2,
            // placeholder, not measured at 140 GHz
            ple: 3.0,
            sigma_sf: 0.0,
        },
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = value.trim().parse().map_err(|_| ConfigError::MalformedOverride {
        key: key.to_string(),
        reason: format!("`{value}` is not a number"),
    })?;
    if !v.is_finite() {
        return Err(ConfigError::MalformedOverride {
            key: key.to_string(),
            reason: format!("`{value}` is not finite"),
        });
    }
    Ok(v)
}

fn parse_u32(key: &str, value: &str) -> Result<u32, ConfigError> {
    value.trim().parse().map_err(|_| ConfigError::MalformedOverride {
        key: key.to_string(),
        reason: format!("`{value}` is not a non-negative integer"),
    })
}

impl ScenarioParams {
    /// Sets one field by its canonical key name.
    ///
    /// `n_c_max` and `lambda_c` switch the cluster-count law to the
    /// discrete-uniform or shifted-Poisson form respectively.
    /// `cluster_delay_dist` takes `exponential` or `lognormal`; switching
    /// keeps the current `mu_tau` and uses `sigma_tau = 1` until set.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim();
        match key {
            "n_c_max" => {
                self.cluster_count = ClusterCountLaw::DiscreteUniform { n_c_max: parse_u32(key, value)? }
            }
            "lambda_c" => {
                self.cluster_count = ClusterCountLaw::ShiftedPoisson { lambda_c: parse_f64(key, value)? }
            }
            "beta_s" => self.beta_s = parse_f64(key, value)?,
            "mu_s" => self.mu_s = parse_f64(key, value)?,
            "cluster_delay_dist" => {
                let mu_tau = match self.cluster_delay {
                    ClusterDelayDist::Exponential { mu_tau } | ClusterDelayDist::Lognormal { mu_tau, .. } => mu_tau,
                };
                self.cluster_delay = match value.trim().to_ascii_lowercase().as_str() {
                    "exponential" | "exp" => ClusterDelayDist::Exponential { mu_tau },
                    "lognormal" | "logn" => match self.cluster_delay {
                        ClusterDelayDist::Lognormal { .. } => self.cluster_delay,
                        ClusterDelayDist::Exponential { .. } => ClusterDelayDist::Lognormal { mu_tau, sigma_tau: 1.0 },
                    },
                    other => {
                        return Err(ConfigError::MalformedOverride {
                            key: key.to_string(),
                            reason: format!("`{other}` is not one of exponential, lognormal"),
                        })
                    }
                };
            }
            "mu_tau" => {
                let v = parse_f64(key, value)?;
                match &mut self.cluster_delay {
                    ClusterDelayDist::Exponential { mu_tau } | ClusterDelayDist::Lognormal { mu_tau, .. } => *mu_tau = v,
                }
            }
            "sigma_tau" => {
                let v = parse_f64(key, value)?;
                match &mut self.cluster_delay {
                    ClusterDelayDist::Lognormal { sigma_tau, .. } => *sigma_tau = v,
                    ClusterDelayDist::Exponential { .. } => {
                        return Err(ConfigError::MalformedOverride {
                            key: key.to_string(),
                            reason: "sigma_tau only applies to a lognormal cluster_delay_dist".into(),
                        })
                    }
                }
            }
            "mu_rho" => self.mu_rho = parse_f64(key, value)?,
            "mti" => self.mti = parse_f64(key, value)?,
            "gamma_cluster" => self.gamma_cluster = parse_f64(key, value)?,
            "sigma_z" => self.sigma_z = parse_f64(key, value)?,
            "gamma_subpath" => self.gamma_subpath = parse_f64(key, value)?,
            "sigma_u" => self.sigma_u = parse_f64(key, value)?,
            "l_aod_max" => self.l_aod_max = parse_u32(key, value)?,
            "l_aoa_max" => self.l_aoa_max = parse_u32(key, value)?,
            "mu_l_zod" => self.mu_l_zod = parse_f64(key, value)?,
            "sigma_l_zod" => self.sigma_l_zod = parse_f64(key, value)?,
            "mu_l_zoa" => self.mu_l_zoa = parse_f64(key, value)?,
            "sigma_l_zoa" => self.sigma_l_zoa = parse_f64(key, value)?,
            "sigma_phi_aod" => self.sigma_phi_aod = parse_f64(key, value)?,
            "sigma_theta_aod" => self.sigma_theta_aod = parse_f64(key, value)?,
            "sigma_phi_aoa" => self.sigma_phi_aoa = parse_f64(key, value)?,
            "sigma_theta_aoa" => self.sigma_theta_aoa = parse_f64(key, value)?,
            "ple" => self.ple = parse_f64(key, value)?,
            "sigma_sf" => self.sigma_sf = parse_f64(key, value)?,
            other => {
                return Err(ConfigError::MalformedOverride {
                    key: other.to_string(),
                    reason: "unknown parameter key".into(),
                })
            }
        }
        Ok(())
    }

    /// Flat `(key, value)` dump using canonical key names. Keys that do not
    /// apply to the current laws (e.g. `lambda_c` for LOS) are rendered `NA`.
    pub fn key_values(&self) -> Vec<(&'static str, String)> {
        let na = || "NA".to_string();
        let (n_c_max, lambda_c) = match self.cluster_count {
            ClusterCountLaw::DiscreteUniform { n_c_max } => (n_c_max.to_string(), na()),
            ClusterCountLaw::ShiftedPoisson { lambda_c } => (na(), lambda_c.to_string()),
        };
        let (dist, mu_tau, sigma_tau) = match self.cluster_delay {
            ClusterDelayDist::Exponential { mu_tau } => ("exponential".to_string(), mu_tau.to_string(), na()),
            ClusterDelayDist::Lognormal { mu_tau, sigma_tau } => {
                ("lognormal".to_string(), mu_tau.to_string(), sigma_tau.to_string())
            }
        };
        vec![
            ("n_c_max", n_c_max),
            ("lambda_c", lambda_c),
            ("beta_s", self.beta_s.to_string()),
            ("mu_s", self.mu_s.to_string()),
            ("cluster_delay_dist", dist),
            ("mu_tau", mu_tau),
            ("sigma_tau", sigma_tau),
            ("mu_rho", self.mu_rho.to_string()),
            ("mti", self.mti.to_string()),
            ("gamma_cluster", self.gamma_cluster.to_string()),
            ("sigma_z", self.sigma_z.to_string()),
            ("gamma_subpath", self.gamma_subpath.to_string()),
            ("sigma_u", self.sigma_u.to_string()),
            ("l_aod_max", self.l_aod_max.to_string()),
            ("l_aoa_max", self.l_aoa_max.to_string()),
            ("mu_l_zod", self.mu_l_zod.to_string()),
            ("sigma_l_zod", self.sigma_l_zod.to_string()),
            ("mu_l_zoa", self.mu_l_zoa.to_string()),
            ("sigma_l_zoa", self.sigma_l_zoa.to_string()),
            ("sigma_phi_aod", self.sigma_phi_aod.to_string()),
            ("sigma_theta_aod", self.sigma_theta_aod.to_string()),
            ("sigma_phi_aoa", self.sigma_phi_aoa.to_string()),
            ("sigma_theta_aoa", self.sigma_theta_aoa.to_string()),
            ("ple", self.ple.to_string()),
            ("sigma_sf", self.sigma_sf.to_string()),
        ]
    }

    /// Checks every field constraint and returns all violations.
    pub fn validate(&self) -> Result<(), Vec<ConfigError>> {
        let mut errors = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0 && v.is_finite()) {
                errors.push(ConfigError::InvalidParameter {
                    name: name.to_string(),
                    reason: format!("must be > 0, got {v}"),
                });
            }
        };
        match self.cluster_count {
            ClusterCountLaw::DiscreteUniform { n_c_max } => positive("n_c_max", n_c_max as f64),
            ClusterCountLaw::ShiftedPoisson { lambda_c } => positive("lambda_c", lambda_c),
        }
        positive("mu_s", self.mu_s);
        match self.cluster_delay {
            ClusterDelayDist::Exponential { mu_tau } => positive("mu_tau", mu_tau),
            // ln-domain mean may be any real; only the spread must be positive
            ClusterDelayDist::Lognormal { sigma_tau, .. } => positive("sigma_tau", sigma_tau),
        }
        positive("mu_rho", self.mu_rho);
        positive("mti", self.mti);
        positive("gamma_cluster", self.gamma_cluster);
        positive("sigma_z", self.sigma_z);
        positive("gamma_subpath", self.gamma_subpath);
        positive("sigma_u", self.sigma_u);
        positive("l_aod_max", self.l_aod_max as f64);
        positive("l_aoa_max", self.l_aoa_max as f64);
        positive("sigma_l_zod", self.sigma_l_zod);
        positive("mu_l_zoa", self.mu_l_zoa);
        positive("sigma_l_zoa", self.sigma_l_zoa);
        positive("sigma_phi_aod", self.sigma_phi_aod);
        positive("sigma_theta_aod", self.sigma_theta_aod);
        positive("sigma_phi_aoa", self.sigma_phi_aoa);
        positive("sigma_theta_aoa", self.sigma_theta_aoa);
        positive("ple", self.ple);
        if !(0.0..=1.0).contains(&self.beta_s) {
            errors.push(ConfigError::InvalidParameter {
                name: "beta_s".into(),
                reason: format!("must lie in [0, 1], got {}", self.beta_s),
            });
        }
        if !self.mu_l_zod.is_finite() {
            errors.push(ConfigError::InvalidParameter {
                name: "mu_l_zod".into(),
                reason: "must be finite".into(),
            });
        }
        if !(self.sigma_sf >= 0.0 && self.sigma_sf.is_finite()) {
            errors.push(ConfigError::InvalidParameter {
                name: "sigma_sf".into(),
                reason: format!("must be >= 0, got {}", self.sigma_sf),
            });
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }
}

/// Renders the four parameter rows as a fixed-width table.
pub fn render_parameter_table() -> String {
    let rows: Vec<Vec<(&str, String)>> = Scenario::ALL.iter().map(|s| lookup_params(*s).key_values()).collect();
    let mut out = format!("{:<20}", "parameter");
    for s in Scenario::ALL {
        out.push_str(&format!("{:>14}", s.to_string()));
    }
    out.push('\n');
    for (i, key) in PARAM_KEYS.iter().enumerate() {
        out.push_str(&format!("{key:<20}"));
        for row in &rows {
            debug_assert_eq!(row[i].0, *key);
            out.push_str(&format!("{:>14}", row[i].1));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("distance {value} m is outside [{MIN_DISTANCE_M}, {MAX_DISTANCE_M}] m")]
    DistanceOutOfRange { value: f64 },
    #[error("num_drops must be >= 1")]
    NonPositiveDrops,
    #[error("malformed override `{key}`: {reason}")]
    MalformedOverride { key: String, reason: String },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("pdp_bin_ns must be > 0, got {0}")]
    NonPositiveBinWidth(f64),
}

/// How the T-R separation is chosen per drop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum DistanceSpec {
    Fixed { distance_m: f64 },
    /// Uniform in `[min_m, max_m]`, drawn per drop from its own substream.
    Uniform { min_m: f64, max_m: f64 },
}

impl FromStr for DistanceSpec {
    type Err = ConfigError;

    /// `10` for a fixed distance, `5:40` for a uniform range.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            Some((lo, hi)) => Ok(DistanceSpec::Uniform {
                min_m: parse_f64("distance", lo)?,
                max_m: parse_f64("distance", hi)?,
            }),
            None => Ok(DistanceSpec::Fixed { distance_m: parse_f64("distance", s)? }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// Drops as JSON lines only.
    Jsonl,
    /// PDP, PAS and CDF tables as CSV only.
    Csv,
    #[default]
    All,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(OutputFormat::Jsonl),
            "csv" => Ok(OutputFormat::Csv),
            "all" => Ok(OutputFormat::All),
            other => Err(ConfigError::MalformedOverride {
                key: "format".into(),
                reason: format!("`{other}` is not one of jsonl, csv, all"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputSettings {
    pub out_dir: Option<PathBuf>,
    pub format: OutputFormat,
    pub workers: Option<usize>,
}

/// A Monte Carlo campaign for one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub scenario: Scenario,
    pub tx_power_dbm: f64,
    pub distance: DistanceSpec,
    pub num_drops: usize,
    pub master_seed: u64,
    pub pdp_bin_ns: f64,
    /// Parameter overrides applied on top of the scenario row, in order.
    pub overrides: Vec<(String, String)>,
    #[serde(skip)]
    pub output: OutputSettings,
}

impl SimConfig {
    pub fn new(scenario: Scenario) -> Self {
        SimConfig {
            scenario,
            tx_power_dbm: 0.0,
            distance: DistanceSpec::Fixed { distance_m: 10.0 },
            num_drops: 1,
            master_seed: 0,
            pdp_bin_ns: DEFAULT_PDP_BIN_NS,
            overrides: Vec::new(),
            output: OutputSettings::default(),
        }
    }

    /// Applies one key of a flat config file. Simulation keys are consumed
    /// here; anything else is queued as a parameter override.
    pub fn apply_key_value(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "scenario" => self.scenario = value.parse()?,
            "tx_power_dbm" => self.tx_power_dbm = parse_f64(key, value)?,
            "distance_m" => self.distance = DistanceSpec::Fixed { distance_m: parse_f64(key, value)? },
            "distance_range_m" => self.distance = value.parse()?,
            "num_drops" => {
                self.num_drops = value.trim().parse().map_err(|_| ConfigError::MalformedOverride {
                    key: key.into(),
                    reason: format!("`{value}` is not a non-negative integer"),
                })?
            }
            "master_seed" => {
                self.master_seed = value.trim().parse().map_err(|_| ConfigError::MalformedOverride {
                    key: key.into(),
                    reason: format!("`{value}` is not a 64-bit unsigned integer"),
                })?
            }
            "pdp_bin_ns" => self.pdp_bin_ns = parse_f64(key, value)?,
            _ => self.overrides.push((key.to_string(), value.to_string())),
        }
        Ok(())
    }
}

/// A checked configuration with overrides resolved into parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidatedConfig {
    pub config: SimConfig,
    pub params: ScenarioParams,
}

/// Checks `config` and resolves its parameters, collecting every violation.
pub fn validate_config(config: SimConfig) -> Result<ValidatedConfig, Vec<ConfigError>> {
    let mut errors = Vec::new();
    let in_range = |d: f64| (MIN_DISTANCE_M..=MAX_DISTANCE_M).contains(&d);
    match config.distance {
        DistanceSpec::Fixed { distance_m } => {
            if !in_range(distance_m) {
                errors.push(ConfigError::DistanceOutOfRange { value: distance_m });
            }
        }
        DistanceSpec::Uniform { min_m, max_m } => {
            for d in [min_m, max_m] {
                if !in_range(d) {
                    errors.push(ConfigError::DistanceOutOfRange { value: d });
                }
            }
            if min_m > max_m {
                errors.push(ConfigError::MalformedOverride {
                    key: "distance".into(),
                    reason: format!("range minimum {min_m} exceeds maximum {max_m}"),
                });
            }
        }
    }
    if config.num_drops == 0 {
        errors.push(ConfigError::NonPositiveDrops);
    }
    if !(config.pdp_bin_ns > 0.0 && config.pdp_bin_ns.is_finite()) {
        errors.push(ConfigError::NonPositiveBinWidth(config.pdp_bin_ns));
    }
    let mut params = lookup_params(config.scenario);
    for (key, value) in &config.overrides {
        if let Err(e) = params.set(key, value) {
            errors.push(e);
        }
    }
    if let Err(mut e) = params.validate() {
        errors.append(&mut e);
    }
    if errors.is_empty() {
        Ok(ValidatedConfig { config, params })
    } else {
        Err(errors)
    }
}

/// Parses a flat `key = value` file. Blank lines and `#` comments are
/// skipped; `key=value` without spaces is also accepted.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_assignment(line).map_err(|reason| ConfigError::MalformedOverride {
            key: format!("line {}", lineno + 1),
            reason,
        })?);
    }
    Ok(out)
}

/// Parses a single `key=value` assignment, as given to `--override`.
pub fn parse_assignment(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got `{s}`"))?;
    let (k, v) = (k.trim(), v.trim().trim_matches('"'));
    if k.is_empty() || v.is_empty() {
        return Err(format!("expected key=value, got `{s}`"));
    }
    Ok((k.to_string(), v.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nlos_28_row() {
        let p = lookup_params(Scenario::GHZ28_NLOS);
        assert_eq!(p.cluster_count, ClusterCountLaw::ShiftedPoisson { lambda_c: 3.4 });
        assert_eq!(p.beta_s, 0.6);
        assert_eq!(p.mu_s, 4.1);
        assert_eq!(p.cluster_delay, ClusterDelayDist::Exponential { mu_tau: 12.1 });
        assert_eq!(p.mu_rho, 15.7);
        assert_eq!((p.gamma_cluster, p.sigma_z), (20.1, 7.0));
        assert_eq!((p.gamma_subpath, p.sigma_u), (5.0, 8.0));
        assert_eq!((p.l_aod_max, p.l_aoa_max), (2, 3));
    }

    #[test]
    fn los_140_row() {
        let p = lookup_params(Scenario::GHZ140_LOS);
        assert_eq!(p.cluster_count, ClusterCountLaw::DiscreteUniform { n_c_max: 4 });
        assert_eq!((p.beta_s, p.mu_s), (0.8, 1.0));
        assert_eq!(p.cluster_delay, ClusterDelayDist::Exponential { mu_tau: 18.6 });
        assert_eq!((p.gamma_cluster, p.sigma_z), (6.0, 3.0));
    }

    #[test]
    fn los_28_lognormal_and_ple() {
        let p = lookup_params(Scenario::GHZ28_LOS);
        assert_eq!(p.cluster_delay, ClusterDelayDist::Lognormal { mu_tau: 2.7, sigma_tau: 1.4 });
        assert_eq!(p.ple, 1.2);
        assert_eq!(lookup_params(Scenario::GHZ28_NLOS).ple, 2.8);
    }

    #[test]
    fn all_rows_validate() {
        for s in Scenario::ALL {
            lookup_params(s).validate().unwrap();
            assert_eq!(lookup_params(s), lookup_params(s));
        }
    }

    #[test]
    fn scenario_parsing() {
        assert_eq!("28-los".parse::<Scenario>().unwrap(), Scenario::GHZ28_LOS);
        assert_eq!("140GHz_NLOS".parse::<Scenario>().unwrap(), Scenario::GHZ140_NLOS);
        for s in Scenario::ALL {
            assert_eq!(s.to_string().parse::<Scenario>().unwrap(), s);
        }
        assert!("60-los".parse::<Scenario>().is_err());
    }

    #[test]
    fn distance_bounds() {
        let mut c = SimConfig::new(Scenario::GHZ28_LOS);
        c.distance = DistanceSpec::Fixed { distance_m: 3.9 };
        assert!(validate_config(c.clone()).is_ok());
        c.distance = DistanceSpec::Fixed { distance_m: 0.5 };
        assert_eq!(
            validate_config(c).unwrap_err(),
            vec![ConfigError::DistanceOutOfRange { value: 0.5 }]
        );
    }

    #[test]
    fn zero_drops_rejected() {
        let mut c = SimConfig::new(Scenario::GHZ140_NLOS);
        c.num_drops = 0;
        assert_eq!(validate_config(c).unwrap_err(), vec![ConfigError::NonPositiveDrops]);
    }

    #[test]
    fn validation_collects_every_error() {
        let mut c = SimConfig::new(Scenario::GHZ140_NLOS);
        c.num_drops = 0;
        c.distance = DistanceSpec::Fixed { distance_m: 60.0 };
        c.overrides.push(("bogus".into(), "1".into()));
        c.overrides.push(("beta_s".into(), "1.5".into()));
        let errs = validate_config(c).unwrap_err();
        assert_eq!(errs.len(), 4, "{errs:?}");
        assert!(errs.iter().any(|e| matches!(e, ConfigError::MalformedOverride { key, .. } if key == "bogus")));
        assert!(errs.iter().any(|e| matches!(e, ConfigError::InvalidParameter { name, .. } if name == "beta_s")));
    }

    #[test]
    fn overrides_apply() {
        let mut c = SimConfig::new(Scenario::GHZ28_NLOS);
        c.overrides = vec![("mu_rho".into(), "10".into()), ("ple".into(), "3.1".into())];
        let v = validate_config(c).unwrap();
        assert_eq!(v.params.mu_rho, 10.0);
        assert_eq!(v.params.ple, 3.1);
    }

    #[test]
    fn law_switching_overrides() {
        let mut p = lookup_params(Scenario::GHZ28_LOS);
        p.set("lambda_c", "2.0").unwrap();
        assert_eq!(p.cluster_count, ClusterCountLaw::ShiftedPoisson { lambda_c: 2.0 });
        p.set("cluster_delay_dist", "exponential").unwrap();
        assert_eq!(p.cluster_delay, ClusterDelayDist::Exponential { mu_tau: 2.7 });
        assert!(p.set("sigma_tau", "1.0").is_err());
        assert!(p.set("beta_s", "abc").is_err());
    }

    #[test]
    fn key_value_dump_round_trips_through_set() {
        for s in Scenario::ALL {
            let original = lookup_params(s);
            // start from a different row and apply the dump
            let mut p = lookup_params(if s.is_los() { Scenario::GHZ28_NLOS } else { Scenario::GHZ28_LOS });
            // law keys first so later keys land in the right variant
            for (k, v) in original.key_values() {
                if v != "NA" && (k == "n_c_max" || k == "lambda_c" || k == "cluster_delay_dist") {
                    p.set(k, &v).unwrap();
                }
            }
            for (k, v) in original.key_values() {
                if v != "NA" {
                    p.set(k, &v).unwrap();
                }
            }
            assert_eq!(p, original, "{s}");
        }
    }

    #[test]
    fn parameter_table_matches_published_rows() {
        let table = render_parameter_table();
        let expect = [
            ("n_c_max", ["5", "NA", "4", "NA"]),
            ("lambda_c", ["NA", "3.4", "NA", "1.3"]),
            ("beta_s", ["0.8", "0.6", "0.8", "1"]),
            ("mu_s", ["2.4", "4.1", "1", "1"]),
            ("mu_tau", ["2.7", "12.1", "18.6", "23.5"]),
            ("sigma_tau", ["1.4", "NA", "NA", "NA"]),
            ("mu_rho", ["2.6", "15.7", "2.2", "2.2"]),
            ("gamma_cluster", ["38.7", "20.1", "6", "13.4"]),
            ("sigma_z", ["5", "7", "3", "5"]),
            ("gamma_subpath", ["2.5", "5", "1.4", "2"]),
            ("sigma_u", ["7", "8", "5", "6"]),
            ("l_aod_max", ["2", "2", "2", "2"]),
            ("l_aoa_max", ["2", "3", "2", "2"]),
            ("mu_l_zod", ["-7.3", "-5.5", "-6.8", "-2.5"]),
            ("sigma_l_zod", ["3.8", "2.9", "4.9", "2.7"]),
            ("mu_l_zoa", ["7.4", "5.5", "7.4", "4.8"]),
            ("sigma_l_zoa", ["3.8", "2.9", "4.5", "2.8"]),
            ("sigma_phi_aod", ["23.5", "31.6", "4.8", "5.1"]),
            ("sigma_theta_aod", ["16", "15.6", "4.2", "4.1"]),
            ("sigma_phi_aoa", ["19.3", "25.5", "4.8", "5.4"]),
            ("sigma_theta_aoa", ["14.5", "14.6", "4.3", "4.2"]),
        ];
        for (key, cells) in expect {
            let line = table
                .lines()
                .find(|l| l.split_whitespace().next() == Some(key))
                .unwrap_or_else(|| panic!("missing row {key}"));
            let got: Vec<&str> = line.split_whitespace().skip(1).collect();
            assert_eq!(got, cells, "row {key}");
        }
    }

    #[test]
    fn key_value_file_parsing() {
        let text = "# overrides\nmu_rho = 3.0\n\nsigma_sf=4 # dB\nscenario = \"140-nlos\"\n";
        let kv = parse_key_values(text).unwrap();
        assert_eq!(
            kv,
            vec![
                ("mu_rho".to_string(), "3.0".to_string()),
                ("sigma_sf".to_string(), "4".to_string()),
                ("scenario".to_string(), "140-nlos".to_string()),
            ]
        );
        assert!(parse_key_values("just a line").is_err());
    }

    #[test]
    fn distance_spec_parsing() {
        assert_eq!("12.5".parse::<DistanceSpec>().unwrap(), DistanceSpec::Fixed { distance_m: 12.5 });
        assert_eq!(
            "5:40".parse::<DistanceSpec>().unwrap(),
            DistanceSpec::Uniform { min_m: 5.0, max_m: 40.0 }
        );
    }
}
