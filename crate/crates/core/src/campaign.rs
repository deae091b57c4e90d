//! Monte Carlo campaigns: many drops of one scenario, per-drop metrics and
//! their aggregate distributions.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::channel::{generate_drop, ChannelDrop, ChannelError, Side};
use crate::scenario::{Scenario, ValidatedConfig};
use crate::stats::{drop_rms_delay_spread, global_rms_as, linear_grid, summarize, Plane, Summary};

/// Points in each aggregate CDF table.
pub const CDF_POINTS: usize = 201;

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("could not start worker pool: {0}")]
    WorkerPool(String),
}

/// Per-drop summary metrics. Angular spreads are global (delay-integrated)
/// RMS spreads in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropRecord {
    pub drop_index: u64,
    pub rms_ds_ns: f64,
    pub aod_az_spread_deg: f64,
    pub aod_el_spread_deg: f64,
    pub aoa_az_spread_deg: f64,
    pub aoa_el_spread_deg: f64,
    pub num_clusters: usize,
    pub num_subpaths: usize,
    pub rx_power_mw: f64,
    pub distance_m: f64,
}

/// Metric names in output order; also the `summary.json` keys.
pub const METRICS: [&str; 9] = [
    "rms_ds_ns",
    "aod_az_spread_deg",
    "aod_el_spread_deg",
    "aoa_az_spread_deg",
    "aoa_el_spread_deg",
    "num_clusters",
    "num_subpaths",
    "rx_power_mw",
    "distance_m",
];

impl DropRecord {
    pub fn from_drop(drop: &ChannelDrop) -> Self {
        DropRecord {
            drop_index: drop.drop_index,
            rms_ds_ns: drop_rms_delay_spread(drop),
            aod_az_spread_deg: global_rms_as(drop, Side::Aod, Plane::Azimuth),
            aod_el_spread_deg: global_rms_as(drop, Side::Aod, Plane::Elevation),
            aoa_az_spread_deg: global_rms_as(drop, Side::Aoa, Plane::Azimuth),
            aoa_el_spread_deg: global_rms_as(drop, Side::Aoa, Plane::Elevation),
            num_clusters: drop.clusters.len(),
            num_subpaths: drop.num_subpaths(),
            rx_power_mw: drop.link.rx_power_mw,
            distance_m: drop.distance_m,
        }
    }

    /// Value of the metric named in [`METRICS`].
    pub fn metric(&self, name: &str) -> Option<f64> {
        Some(match name {
            "rms_ds_ns" => self.rms_ds_ns,
            "aod_az_spread_deg" => self.aod_az_spread_deg,
            "aod_el_spread_deg" => self.aod_el_spread_deg,
            "aoa_az_spread_deg" => self.aoa_az_spread_deg,
            "aoa_el_spread_deg" => self.aoa_el_spread_deg,
            "num_clusters" => self.num_clusters as f64,
            "num_subpaths" => self.num_subpaths as f64,
            "rx_power_mw" => self.rx_power_mw,
            "distance_m" => self.distance_m,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    /// Hex SHA-256 of the validated configuration as JSON.
    pub config_hash: String,
    pub version: String,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub records: Vec<DropRecord>,
    /// Keyed by metric name.
    pub aggregates: BTreeMap<String, Summary>,
    pub provenance: Provenance,
}

pub fn config_hash(config: &ValidatedConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    hex::encode(Sha256::digest(json.as_bytes()))
}

impl CampaignResult {
    pub fn from_drops(config: &ValidatedConfig, drops: &[ChannelDrop]) -> Self {
        let records: Vec<DropRecord> = drops.iter().map(DropRecord::from_drop).collect();
        let aggregates = if records.is_empty() {
            BTreeMap::new()
        } else {
            METRICS
                .iter()
                .map(|&name| {
                    let values: Vec<f64> = records.iter().filter_map(|r| r.metric(name)).collect();
                    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    let summary = summarize(&values, &linear_grid(lo, hi, CDF_POINTS)).expect("non-empty metric");
                    (name.to_string(), summary)
                })
                .collect()
        };
        CampaignResult {
            records,
            aggregates,
            provenance: Provenance {
                master_seed: config.config.master_seed,
                config_hash: config_hash(config),
                version: env!("CARGO_PKG_VERSION").to_string(),
                scenario: config.config.scenario,
            },
        }
    }

    pub fn median(&self, metric: &str) -> Option<f64> {
        self.aggregates.get(metric).map(|s| s.median)
    }
}

/// Generates drops `0..num_drops` on `workers` threads (the rayon default
/// when `None`). Output order is by drop index whatever the worker count.
pub fn generate_drops(config: &ValidatedConfig, workers: Option<usize>) -> Result<Vec<ChannelDrop>, CampaignError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w.max(1));
    }
    let pool = builder.build().map_err(|e| CampaignError::WorkerPool(e.to_string()))?;
    let n = config.config.num_drops as u64;
    let drops = pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|i| generate_drop(config, i))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(drops)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Campaign {
    pub result: CampaignResult,
    pub drops: Vec<ChannelDrop>,
}

pub fn run_campaign(config: &ValidatedConfig, workers: Option<usize>) -> Result<Campaign, CampaignError> {
    let drops = generate_drops(config, workers)?;
    let result = CampaignResult::from_drops(config, &drops);
    Ok(Campaign { result, drops })
}
