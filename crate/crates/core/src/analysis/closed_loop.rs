//! Closed-loop check: pull the generating random quantities back out of
//! drops and re-fit them.

use serde::{Deserialize, Serialize};

use super::fit::{fit_composite_subpath, fit_exponential, fit_family, fit_poisson_shifted, Family, FitReport};
use super::partition::partition_time_clusters;
use super::AnalysisError;
use crate::channel::ChannelDrop;
use crate::stats::PowerDelayProfile;

/// Per-quantity samples gathered from a set of drops.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClosedLoopSamples {
    /// `N` per drop.
    pub cluster_counts: Vec<f64>,
    /// `M` per cluster.
    pub subpath_counts: Vec<f64>,
    /// Intra-cluster delays of every non-anchor subpath.
    pub intra_delays_ns: Vec<f64>,
    /// `Delta tau_n`, n >= 2, recovered by removing the void interval.
    pub inter_cluster_delays_ns: Vec<f64>,
}

impl ClosedLoopSamples {
    pub fn from_drops<'a>(drops: impl IntoIterator<Item = &'a ChannelDrop>, mti_ns: f64) -> Self {
        let mut out = ClosedLoopSamples::default();
        for drop in drops {
            out.push(drop, mti_ns);
        }
        out
    }

    pub fn push(&mut self, drop: &ChannelDrop, mti_ns: f64) {
        self.cluster_counts.push(drop.clusters.len() as f64);
        for c in &drop.clusters {
            self.subpath_counts.push(c.subpaths.len() as f64);
            self.intra_delays_ns.extend(c.subpaths.iter().skip(1).map(|s| s.intra_delay_ns));
        }
        self.inter_cluster_delays_ns.extend(drop.inter_cluster_delays_ns(mti_ns));
    }
}

/// Outcome of re-partitioning exact taps with the generating MTI.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PartitionCheck {
    /// Drops whose intra-cluster gaps were all below the MTI.
    pub checked: usize,
    /// Drops skipped because a subpath trailed its predecessor by >= MTI.
    pub skipped: usize,
    /// Checked drops whose cluster count and memberships were recovered.
    pub recovered: usize,
}

impl PartitionCheck {
    pub fn skipped_fraction(&self) -> f64 {
        let total = self.checked + self.skipped;
        if total == 0 {
            0.0
        } else {
            self.skipped as f64 / total as f64
        }
    }

    pub fn push(&mut self, drop: &ChannelDrop, mti_ns: f64) -> Result<(), AnalysisError> {
        let eligible = drop.clusters.iter().all(|c| {
            c.subpaths
                .windows(2)
                .all(|w| w[1].intra_delay_ns - w[0].intra_delay_ns < mti_ns)
        });
        if !eligible {
            self.skipped += 1;
            return Ok(());
        }
        self.checked += 1;
        let pdp = PowerDelayProfile::from_taps(drop.subpaths().map(|s| (s.excess_delay_ns, s.power_fraction)))
            .map_err(|_| AnalysisError::EmptyProfile)?;
        let partition = partition_time_clusters(&pdp, mti_ns)?;
        let expected: Vec<usize> = drop.clusters.iter().map(|c| c.subpaths.len()).collect();
        if partition.subpath_counts() == expected {
            self.recovered += 1;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedLoopFit {
    /// Shifted-Poisson fit of `N`; meaningful for NLOS drops.
    pub cluster_count: FitReport,
    /// Smallest and largest `N` seen, the empirical support for LOS drops.
    pub cluster_count_support: (usize, usize),
    pub subpath_count: FitReport,
    pub intra_delay: FitReport,
    /// `None` when no drop had two or more clusters.
    pub inter_cluster_delay: Option<FitReport>,
    pub partition: PartitionCheck,
}

/// Fits every generating law from `drops`. `delay_family` selects the law
/// fitted to the recovered inter-cluster delays.
pub fn closed_loop_fit(drops: &[ChannelDrop], mti_ns: f64, delay_family: Family) -> Result<ClosedLoopFit, AnalysisError> {
    let samples = ClosedLoopSamples::from_drops(drops, mti_ns);
    let mut partition = PartitionCheck::default();
    for drop in drops {
        partition.push(drop, mti_ns)?;
    }
    let support = samples
        .cluster_counts
        .iter()
        .fold((usize::MAX, 0), |(lo, hi), &n| (lo.min(n as usize), hi.max(n as usize)));
    let positive_gaps: Vec<f64> = samples
        .inter_cluster_delays_ns
        .iter()
        .copied()
        .filter(|d| *d > 0.0)
        .collect();
    let inter_cluster_delay = if positive_gaps.is_empty() {
        None
    } else {
        Some(fit_family(delay_family, &positive_gaps)?)
    };
    Ok(ClosedLoopFit {
        cluster_count: fit_poisson_shifted(&samples.cluster_counts)?,
        cluster_count_support: support,
        subpath_count: fit_composite_subpath(&samples.subpath_counts)?,
        intra_delay: fit_exponential(&samples.intra_delays_ns)?,
        inter_cluster_delay,
        partition,
    })
}
