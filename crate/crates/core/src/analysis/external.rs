//! The extraction pipeline applied to tabulated profiles, generated or
//! measured: partition every PDP, fit the resulting counts and delays, and
//! count spatial lobes in every PAS.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::fit::{compare_distributions, fit_composite_subpath, fit_exponential, fit_family, fit_poisson_shifted};
use super::fit::{Family, FitReport, RankedFit, MIN_COMPARE_SAMPLES};
use super::lobes::{extract_spatial_lobes, interpolate_pas, DirectionalSample};
use super::partition::partition_time_clusters;
use super::AnalysisError;
use crate::channel::Side;
use crate::stats::{rms_delay_spread, PowerAngularSpectrum, PowerDelayProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdpAnalysis {
    pub num_profiles: usize,
    pub mti_ns: f64,
    pub median_rms_ds_ns: f64,
    pub cluster_count: FitReport,
    pub subpath_count: FitReport,
    /// `None` when every cluster has a single tap.
    pub intra_delay: Option<FitReport>,
    /// Inter-cluster delays after removing the void interval, ranked best
    /// first. Empty when no profile has two clusters.
    pub inter_cluster_delay: Vec<RankedFit>,
}

/// Partitions each profile with `mti_ns` and fits the recovered quantities.
pub fn analyze_profiles(profiles: &[PowerDelayProfile], mti_ns: f64) -> Result<PdpAnalysis, AnalysisError> {
    if profiles.is_empty() {
        return Err(AnalysisError::EmptySamples);
    }
    let (mut n, mut m, mut intra, mut inter, mut ds) = (vec![], vec![], vec![], vec![], vec![]);
    for pdp in profiles {
        let part = partition_time_clusters(pdp, mti_ns)?;
        n.push(part.num_clusters() as f64);
        m.extend(part.subpath_counts().into_iter().map(|c| c as f64));
        intra.extend(part.intra_delays_ns(pdp).into_iter().filter(|d| *d > 0.0));
        inter.extend(part.inter_cluster_delays_ns(pdp).into_iter().filter(|d| *d > 0.0));
        ds.push(rms_delay_spread(pdp).map_err(|_| AnalysisError::EmptyProfile)?);
    }
    ds.sort_by(f64::total_cmp);
    let families = [Family::Exponential, Family::Lognormal];
    let inter_cluster_delay = if inter.len() >= MIN_COMPARE_SAMPLES {
        compare_distributions(&inter, &families)?
    } else if inter.is_empty() {
        Vec::new()
    } else {
        vec![RankedFit {
            report: fit_family(Family::Exponential, &inter)?,
            ks_statistic: f64::NAN,
        }]
    };
    Ok(PdpAnalysis {
        num_profiles: profiles.len(),
        mti_ns,
        median_rms_ds_ns: ds[(ds.len() - 1) / 2],
        cluster_count: fit_poisson_shifted(&n)?,
        subpath_count: fit_composite_subpath(&m)?,
        intra_delay: if intra.is_empty() { None } else { Some(fit_exponential(&intra)?) },
        inter_cluster_delay,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PasAnalysis {
    pub slt_db: f64,
    pub interpolated: bool,
    /// Per side, how many spectra yielded each lobe count.
    pub lobe_count_histogram: BTreeMap<Side, BTreeMap<usize, usize>>,
}

/// Counts lobes in every spectrum. With `interpolate`, samples are treated
/// as coarse pointing directions and brought onto the 1 degree grid first;
/// otherwise each sample is deposited in its nearest cell.
pub fn analyze_spectra(
    spectra: &[(Side, Vec<DirectionalSample>)],
    slt_db: f64,
    interpolate: bool,
) -> Result<PasAnalysis, AnalysisError> {
    let mut hist: BTreeMap<Side, BTreeMap<usize, usize>> = BTreeMap::new();
    for (side, samples) in spectra {
        let pas = if interpolate {
            interpolate_pas(samples, *side)?
        } else {
            let mut pas = PowerAngularSpectrum::new(*side);
            for s in samples {
                pas.deposit(s.az_deg, s.el_deg, s.power_mw);
            }
            pas
        };
        let count = extract_spatial_lobes(&pas, slt_db)?.lobes.len();
        *hist.entry(*side).or_default().entry(count).or_insert(0) += 1;
    }
    Ok(PasAnalysis {
        slt_db,
        interpolated: interpolate,
        lobe_count_histogram: hist,
    })
}
