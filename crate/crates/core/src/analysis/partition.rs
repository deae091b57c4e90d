use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::stats::PowerDelayProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionedCluster {
    pub first_tap: usize,
    pub tap_indices: Vec<usize>,
    /// Delay of the cluster's first tap relative to the profile's first tap.
    pub excess_delay_ns: f64,
    pub power_mw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterPartition {
    pub clusters: Vec<PartitionedCluster>,
    pub mti_ns: f64,
}

impl ClusterPartition {
    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn subpath_counts(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.tap_indices.len()).collect()
    }

    /// Intra-cluster delays of every non-leading tap.
    pub fn intra_delays_ns(&self, pdp: &PowerDelayProfile) -> Vec<f64> {
        self.clusters
            .iter()
            .flat_map(|c| {
                let t0 = pdp.taps[c.first_tap].excess_delay_ns;
                c.tap_indices[1..].iter().map(move |&i| pdp.taps[i].excess_delay_ns - t0)
            })
            .collect()
    }

    /// Gap between the last tap of each cluster and the first of the next,
    /// minus the void interval.
    pub fn inter_cluster_delays_ns(&self, pdp: &PowerDelayProfile) -> Vec<f64> {
        self.clusters
            .windows(2)
            .map(|w| {
                let end = pdp.taps[*w[0].tap_indices.last().unwrap()].excess_delay_ns;
                let start = pdp.taps[w[1].first_tap].excess_delay_ns;
                (start - end - self.mti_ns).max(0.0)
            })
            .collect()
    }
}

/// Splits a delay-sorted profile into time clusters: a tap opens a new
/// cluster when it trails the previous tap by at least `mti_ns`.
pub fn partition_time_clusters(pdp: &PowerDelayProfile, mti_ns: f64) -> Result<ClusterPartition, AnalysisError> {
    if !(mti_ns > 0.0) {
        return Err(AnalysisError::NonPositiveMti(mti_ns));
    }
    let Some(first) = pdp.taps.first() else {
        return Err(AnalysisError::EmptyProfile);
    };
    let origin = first.excess_delay_ns;
    let mut clusters: Vec<PartitionedCluster> = Vec::new();
    for (i, tap) in pdp.taps.iter().enumerate() {
        let opens = match i {
            0 => true,
            _ => tap.excess_delay_ns - pdp.taps[i - 1].excess_delay_ns >= mti_ns,
        };
        if opens {
            clusters.push(PartitionedCluster {
                first_tap: i,
                tap_indices: Vec::new(),
                excess_delay_ns: tap.excess_delay_ns - origin,
                power_mw: 0.0,
            });
        }
        let c = clusters.last_mut().unwrap();
        c.tap_indices.push(i);
        c.power_mw += tap.power_mw;
    }
    Ok(ClusterPartition { clusters, mti_ns })
}
