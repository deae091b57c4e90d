//! Re-extraction of model structure from channels: MTI time-cluster
//! partitioning, SLT spatial-lobe extraction and maximum-likelihood fits of
//! the generating distribution families.

use thiserror::Error;

pub mod closed_loop;
pub mod external;
pub mod fit;
pub mod lobes;
pub mod partition;

pub use closed_loop::{closed_loop_fit, ClosedLoopFit, ClosedLoopSamples, PartitionCheck};
pub use external::{analyze_profiles, analyze_spectra, PasAnalysis, PdpAnalysis};
pub use fit::{
    compare_distributions, fit_composite_subpath, fit_exponential, fit_lognormal, fit_poisson_shifted, Family,
    FitReport, FittedDistribution, RankedFit,
};
pub use lobes::{
    beam_sweep, extract_spatial_lobes, interpolate_grid, interpolate_pas, DirectionalSample, Lobe, LobeSet,
    DEFAULT_SLT_DB,
};
pub use partition::{partition_time_clusters, ClusterPartition, PartitionedCluster};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("profile has no taps")]
    EmptyProfile,
    #[error("MTI must be > 0 ns, got {0}")]
    NonPositiveMti(f64),
    #[error("need samples at two or more distinct azimuths")]
    InsufficientSamples,
    #[error("angular spectrum carries no power")]
    EmptyGrid,
    #[error("no samples to fit")]
    EmptySamples,
    #[error("lognormal fit needs positive samples, got {0}")]
    NonPositiveSample(f64),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid sample {value}: {reason}")]
    InvalidSample { value: f64, reason: &'static str },
}
