//! Time-cluster / spatial-lobe channel generation.
//!
//! A [`ChannelDrop`] is one realization of the omnidirectional impulse
//! response: a set of subpaths, each with a complex amplitude, an absolute
//! delay, and departure and arrival directions. Subpaths are grouped in time
//! into clusters and in space into lobes; the two groupings are independent.
//!
//! Generation runs ten steps in a fixed order, each on its own labeled
//! substream (see [`labels`]):
//!
//! 1. number of time clusters `N`
//! 2. subpaths per cluster `M_n`
//! 3. intra-cluster delays `rho_{m,n}`
//! 4. cluster excess delays `tau_n`
//! 5. cluster powers `P_n`
//! 6. subpath powers `Pi_{m,n}`
//! 7. subpath phases
//! 8. number of spatial lobes per side
//! 9. lobe mean directions
//! 10. per-subpath lobe assignment and angular offsets
//!
//! All elevations are signed angles above the horizon, in degrees.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pathloss::{link_budget, LinkBudget, PathLossError, SPEED_OF_LIGHT_M_S};
use crate::random::{fork_stream, RandomStream};
use crate::scenario::{ClusterCountLaw, ClusterDelayDist, DistanceSpec, Scenario, ScenarioParams, ValidatedConfig};

/// Substream labels, one per generation stage.
pub mod labels {
    pub const DISTANCE: &str = "distance";
    pub const SHADOWING: &str = "shadowing";
    pub const CLUSTER_COUNT: &str = "cluster-count";
    pub const SUBPATH_COUNTS: &str = "subpath-counts";
    pub const INTRA_DELAYS: &str = "intra-cluster-delays";
    pub const CLUSTER_DELAYS: &str = "cluster-delays";
    pub const CLUSTER_POWERS: &str = "cluster-powers";
    pub const SUBPATH_POWERS: &str = "subpath-powers";
    pub const PHASES: &str = "phases";
    pub const LOBE_COUNTS: &str = "lobe-counts";
    pub const LOBE_ANGLES: &str = "lobe-angles";
    pub const ANGLE_OFFSETS: &str = "angle-offsets";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "AOD")]
    Aod,
    #[serde(rename = "AOA")]
    Aoa,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Aod => "AOD",
            Side::Aoa => "AOA",
        }
    }
}

impl std::str::FromStr for Side {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "AOD" => Ok(Side::Aod),
            "AOA" => Ok(Side::Aoa),
            other => Err(format!("unknown side `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subpath {
    pub cluster_index: usize,
    pub subpath_index: usize,
    /// sqrt of `power_mw`.
    pub magnitude: f64,
    pub power_mw: f64,
    /// `power_mw / P_r`, computed without reference to `P_r`.
    pub power_fraction: f64,
    pub phase_rad: f64,
    pub intra_delay_ns: f64,
    pub excess_delay_ns: f64,
    pub absolute_delay_ns: f64,
    pub aod_az_deg: f64,
    pub aod_el_deg: f64,
    pub aoa_az_deg: f64,
    pub aoa_el_deg: f64,
    pub aod_lobe_index: usize,
    pub aoa_lobe_index: usize,
}

impl Subpath {
    /// Zenith-angle view of the departure elevation.
    pub fn zod_deg(&self) -> f64 {
        90.0 - self.aod_el_deg
    }

    pub fn zoa_deg(&self) -> f64 {
        90.0 - self.aoa_el_deg
    }

    pub fn azimuth_deg(&self, side: Side) -> f64 {
        match side {
            Side::Aod => self.aod_az_deg,
            Side::Aoa => self.aoa_az_deg,
        }
    }

    pub fn elevation_deg(&self, side: Side) -> f64 {
        match side {
            Side::Aod => self.aod_el_deg,
            Side::Aoa => self.aoa_el_deg,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeCluster {
    pub index: usize,
    pub excess_delay_ns: f64,
    pub power_mw: f64,
    pub power_fraction: f64,
    /// Ordered by intra-cluster delay; the first one has delay 0.
    pub subpaths: Vec<Subpath>,
}

impl TimeCluster {
    pub fn intra_delays_ns(&self) -> Vec<f64> {
        self.subpaths.iter().map(|s| s.intra_delay_ns).collect()
    }

    pub fn last_intra_delay_ns(&self) -> f64 {
        self.subpaths.last().map_or(0.0, |s| s.intra_delay_ns)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialLobe {
    pub side: Side,
    pub index: usize,
    pub mean_az_deg: f64,
    pub mean_el_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelDrop {
    pub scenario: Scenario,
    pub master_seed: u64,
    pub drop_index: u64,
    pub distance_m: f64,
    pub link: LinkBudget,
    pub clusters: Vec<TimeCluster>,
    pub aod_lobes: Vec<SpatialLobe>,
    pub aoa_lobes: Vec<SpatialLobe>,
}

impl ChannelDrop {
    pub fn subpaths(&self) -> impl Iterator<Item = &Subpath> + Clone + '_ {
        self.clusters.iter().flat_map(|c| c.subpaths.iter())
    }

    pub fn num_subpaths(&self) -> usize {
        self.clusters.iter().map(|c| c.subpaths.len()).sum()
    }

    pub fn total_power_mw(&self) -> f64 {
        self.subpaths().map(|s| s.power_mw).sum()
    }

    pub fn lobes(&self, side: Side) -> &[SpatialLobe] {
        match side {
            Side::Aod => &self.aod_lobes,
            Side::Aoa => &self.aoa_lobes,
        }
    }

    /// `tau_n - (tau_{n-1} + rho_last,n-1)` for n >= 2.
    pub fn inter_cluster_gaps_ns(&self) -> Vec<f64> {
        self.clusters
            .windows(2)
            .map(|w| w[1].excess_delay_ns - (w[0].excess_delay_ns + w[0].last_intra_delay_ns()))
            .collect()
    }

    /// Recovers `Delta tau_n` for n >= 2 by removing the void interval from
    /// each inter-cluster gap.
    pub fn inter_cluster_delays_ns(&self, mti_ns: f64) -> Vec<f64> {
        self.inter_cluster_gaps_ns().into_iter().map(|g| (g - mti_ns).max(0.0)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error(transparent)]
    PathLoss(#[from] PathLossError),
}

// Step 1
pub fn draw_num_time_clusters(params: &ScenarioParams, stream: &mut RandomStream) -> usize {
    match params.cluster_count {
        ClusterCountLaw::DiscreteUniform { n_c_max } => stream.discrete_uniform(1, i64::from(n_c_max)) as usize,
        ClusterCountLaw::ShiftedPoisson { lambda_c } => 1 + stream.poisson(lambda_c) as usize,
    }
}

// Step 2
pub fn draw_num_subpaths(params: &ScenarioParams, stream: &mut RandomStream, num_clusters: usize) -> Vec<usize> {
    (0..num_clusters)
        .map(|_| stream.composite_subpath(params.beta_s, params.mu_s) as usize)
        .collect()
}

/// Sorts raw intra-cluster draws and shifts them so the first is 0.
pub fn anchor_intra_delays(mut draws: Vec<f64>) -> Vec<f64> {
    draws.sort_by(f64::total_cmp);
    let first = draws.first().copied().unwrap_or(0.0);
    draws.iter_mut().for_each(|d| *d -= first);
    draws
}

// Step 3
pub fn draw_intra_cluster_delays(params: &ScenarioParams, stream: &mut RandomStream, num_subpaths: usize) -> Vec<f64> {
    let draws = (0..num_subpaths).map(|_| stream.exponential(params.mu_rho)).collect();
    anchor_intra_delays(draws)
}

/// Builds cluster delays from raw inter-cluster draws.
///
/// `last_intra[n]` is the largest intra-cluster delay of cluster `n`; only
/// the first `draws.len() - 1` entries are used.
pub fn cluster_delays_from_draws(mut draws: Vec<f64>, last_intra: &[f64], mti_ns: f64) -> Vec<f64> {
    draws.sort_by(f64::total_cmp);
    let Some(&min) = draws.first() else {
        return Vec::new();
    };
    let mut taus = Vec::with_capacity(draws.len());
    taus.push(0.0);
    for n in 1..draws.len() {
        let prev_end = taus[n - 1] + last_intra[n - 1];
        let mut tau = (prev_end + (draws[n] - min)) + mti_ns;
        // keep the void interval intact after rounding
        while tau - prev_end < mti_ns {
            tau = tau.next_up();
        }
        taus.push(tau);
    }
    taus
}

// Step 4
pub fn compose_cluster_delays(params: &ScenarioParams, stream: &mut RandomStream, last_intra: &[f64]) -> Vec<f64> {
    let n = last_intra.len();
    let draws = (0..n)
        .map(|_| match params.cluster_delay {
            ClusterDelayDist::Exponential { mu_tau } => stream.exponential(mu_tau),
            ClusterDelayDist::Lognormal { mu_tau, sigma_tau } => stream.lognormal(mu_tau, sigma_tau),
        })
        .collect();
    cluster_delays_from_draws(draws, last_intra, params.mti)
}

/// Normalized weights `exp(-delay/decay) * 10^(shadow/10)`, summing to 1.
pub fn decaying_power_fractions(delays_ns: &[f64], decay_ns: f64, shadow_db: &[f64]) -> Vec<f64> {
    let weights: Vec<f64> = delays_ns
        .iter()
        .zip(shadow_db)
        .map(|(d, z)| (-d / decay_ns).exp() * 10f64.powf(z / 10.0))
        .collect();
    let total: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / total).collect()
}

/// Step 5 as fractions of P_r.
pub fn draw_cluster_power_fractions(params: &ScenarioParams, stream: &mut RandomStream, taus: &[f64]) -> Vec<f64> {
    let z: Vec<f64> = taus.iter().map(|_| stream.normal(0.0, params.sigma_z)).collect();
    decaying_power_fractions(taus, params.gamma_cluster, &z)
}

// Step 5
pub fn assign_cluster_powers(
    params: &ScenarioParams,
    link: &LinkBudget,
    stream: &mut RandomStream,
    taus: &[f64],
) -> Vec<f64> {
    draw_cluster_power_fractions(params, stream, taus)
        .into_iter()
        .map(|f| f * link.rx_power_mw)
        .collect()
}

// Step 6: subpath powers for one cluster, scaled so they sum to `cluster_power`.
pub fn assign_subpath_powers(
    params: &ScenarioParams,
    stream: &mut RandomStream,
    intra_delays: &[f64],
    cluster_power: f64,
) -> Vec<f64> {
    let u: Vec<f64> = intra_delays.iter().map(|_| stream.normal(0.0, params.sigma_u)).collect();
    decaying_power_fractions(intra_delays, params.gamma_subpath, &u)
        .into_iter()
        .map(|f| f * cluster_power)
        .collect()
}

// Step 7
pub fn draw_subpath_phases(stream: &mut RandomStream, count: usize) -> Vec<f64> {
    (0..count)
        .map(|_| {
            let phase = TAU * stream.next_uniform();
            if phase < TAU {
                phase
            } else {
                0.0
            }
        })
        .collect()
}

// Step 8
pub fn draw_num_spatial_lobes(params: &ScenarioParams, stream: &mut RandomStream) -> (usize, usize) {
    let aod = stream.discrete_uniform(1, i64::from(params.l_aod_max)) as usize;
    let aoa = stream.discrete_uniform(1, i64::from(params.l_aoa_max)) as usize;
    (aod, aoa)
}

pub fn wrap_azimuth(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

pub fn clamp_elevation(deg: f64) -> f64 {
    deg.clamp(-90.0, 90.0)
}

/// Azimuth sector `[lo, hi)` of lobe `index` (0-based) out of `count`.
pub fn lobe_sector(index: usize, count: usize) -> (f64, f64) {
    let width = 360.0 / count as f64;
    (width * index as f64, width * (index + 1) as f64)
}

// Step 9
pub fn draw_lobe_mean_angles(
    params: &ScenarioParams,
    stream: &mut RandomStream,
    count: usize,
    side: Side,
) -> Vec<SpatialLobe> {
    let (mu, sigma) = match side {
        Side::Aod => (params.mu_l_zod, params.sigma_l_zod),
        Side::Aoa => (params.mu_l_zoa, params.sigma_l_zoa),
    };
    (0..count)
        .map(|index| {
            let (lo, hi) = lobe_sector(index, count);
            let mut az = stream.uniform(lo, hi);
            if az >= hi {
                az = hi.next_down();
            }
            let el = clamp_elevation(stream.normal(mu, sigma));
            SpatialLobe {
                side,
                index,
                mean_az_deg: az,
                mean_el_deg: el,
            }
        })
        .collect()
}

/// Lobe assignment and raw angular offsets for one subpath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubpathAngles {
    pub aod_lobe: usize,
    pub aoa_lobe: usize,
    pub aod_az_offset: f64,
    pub aod_el_offset: f64,
    pub aoa_az_offset: f64,
    pub aoa_el_offset: f64,
}

impl SubpathAngles {
    /// Final (az, el) for `side`: azimuth wrapped, elevation clamped.
    pub fn direction(&self, side: Side, lobes: &[SpatialLobe]) -> (f64, f64) {
        let (lobe, daz, del) = match side {
            Side::Aod => (&lobes[self.aod_lobe], self.aod_az_offset, self.aod_el_offset),
            Side::Aoa => (&lobes[self.aoa_lobe], self.aoa_az_offset, self.aoa_el_offset),
        };
        (wrap_azimuth(lobe.mean_az_deg + daz), clamp_elevation(lobe.mean_el_deg + del))
    }
}

// Step 10
pub fn draw_subpath_angle_offsets(
    params: &ScenarioParams,
    stream: &mut RandomStream,
    count: usize,
    num_aod_lobes: usize,
    num_aoa_lobes: usize,
) -> Vec<SubpathAngles> {
    (0..count)
        .map(|_| {
            let aod_lobe = stream.discrete_uniform(0, num_aod_lobes as i64 - 1) as usize;
            let aoa_lobe = stream.discrete_uniform(0, num_aoa_lobes as i64 - 1) as usize;
            SubpathAngles {
                aod_lobe,
                aoa_lobe,
                aod_az_offset: stream.normal(0.0, params.sigma_phi_aod),
                aod_el_offset: stream.normal(0.0, params.sigma_theta_aod),
                aoa_az_offset: stream.normal(0.0, params.sigma_phi_aoa),
                aoa_el_offset: stream.normal(0.0, params.sigma_theta_aoa),
            }
        })
        .collect()
}

/// Draws the T-R distance for a drop.
pub fn draw_distance(spec: DistanceSpec, master_seed: u64, drop_index: u64) -> f64 {
    match spec {
        DistanceSpec::Fixed { distance_m } => distance_m,
        DistanceSpec::Uniform { min_m, max_m } => {
            fork_stream(master_seed, drop_index, labels::DISTANCE).uniform(min_m, max_m)
        }
    }
}

/// Generates drop `drop_index` of a campaign.
pub fn generate_drop(config: &ValidatedConfig, drop_index: u64) -> Result<ChannelDrop, ChannelError> {
    let ValidatedConfig { config, params } = config;
    let seed = config.master_seed;
    let stream = |label: &str| fork_stream(seed, drop_index, label);

    let distance_m = draw_distance(config.distance, seed, drop_index);
    let link = link_budget(config, params, distance_m, &mut stream(labels::SHADOWING))?;

    let num_clusters = draw_num_time_clusters(params, &mut stream(labels::CLUSTER_COUNT));
    let counts = draw_num_subpaths(params, &mut stream(labels::SUBPATH_COUNTS), num_clusters);

    let mut intra_stream = stream(labels::INTRA_DELAYS);
    let intra: Vec<Vec<f64>> = counts
        .iter()
        .map(|&m| draw_intra_cluster_delays(params, &mut intra_stream, m))
        .collect();
    let last_intra: Vec<f64> = intra.iter().map(|r| *r.last().unwrap()).collect();
    let taus = compose_cluster_delays(params, &mut stream(labels::CLUSTER_DELAYS), &last_intra);

    let cluster_fractions = draw_cluster_power_fractions(params, &mut stream(labels::CLUSTER_POWERS), &taus);
    let mut subpath_stream = stream(labels::SUBPATH_POWERS);
    let subpath_fractions: Vec<Vec<f64>> = intra
        .iter()
        .zip(&cluster_fractions)
        .map(|(rho, &frac)| assign_subpath_powers(params, &mut subpath_stream, rho, frac))
        .collect();

    let total_subpaths: usize = counts.iter().sum();
    let phases = draw_subpath_phases(&mut stream(labels::PHASES), total_subpaths);

    let (num_aod, num_aoa) = draw_num_spatial_lobes(params, &mut stream(labels::LOBE_COUNTS));
    let mut lobe_stream = stream(labels::LOBE_ANGLES);
    let aod_lobes = draw_lobe_mean_angles(params, &mut lobe_stream, num_aod, Side::Aod);
    let aoa_lobes = draw_lobe_mean_angles(params, &mut lobe_stream, num_aoa, Side::Aoa);
    let angles = draw_subpath_angle_offsets(
        params,
        &mut stream(labels::ANGLE_OFFSETS),
        total_subpaths,
        num_aod,
        num_aoa,
    );

    let p_r = link.rx_power_mw;
    let propagation_ns = distance_m / SPEED_OF_LIGHT_M_S * 1e9;
    let mut flat = 0usize;
    let clusters = (0..num_clusters)
        .map(|n| {
            let subpaths = intra[n]
                .iter()
                .zip(&subpath_fractions[n])
                .enumerate()
                .map(|(m, (&rho, &fraction))| {
                    let a = angles[flat];
                    let (aod_az_deg, aod_el_deg) = a.direction(Side::Aod, &aod_lobes);
                    let (aoa_az_deg, aoa_el_deg) = a.direction(Side::Aoa, &aoa_lobes);
                    let power_mw = fraction * p_r;
                    let excess_delay_ns = taus[n] + rho;
                    let sp = Subpath {
                        cluster_index: n,
                        subpath_index: m,
                        magnitude: power_mw.sqrt(),
                        power_mw,
                        power_fraction: fraction,
                        phase_rad: phases[flat],
                        intra_delay_ns: rho,
                        excess_delay_ns,
                        absolute_delay_ns: excess_delay_ns + propagation_ns,
                        aod_az_deg,
                        aod_el_deg,
                        aoa_az_deg,
                        aoa_el_deg,
                        aod_lobe_index: a.aod_lobe,
                        aoa_lobe_index: a.aoa_lobe,
                    };
                    flat += 1;
                    sp
                })
                .collect();
            TimeCluster {
                index: n,
                excess_delay_ns: taus[n],
                power_mw: cluster_fractions[n] * p_r,
                power_fraction: cluster_fractions[n],
                subpaths,
            }
        })
        .collect();

    Ok(ChannelDrop {
        scenario: config.scenario,
        master_seed: seed,
        drop_index,
        distance_m,
        link,
        clusters,
        aod_lobes,
        aoa_lobes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{lookup_params, validate_config, Scenario, SimConfig};

    fn validated(s: Scenario, seed: u64) -> ValidatedConfig {
        let mut c = SimConfig::new(s);
        c.master_seed = seed;
        validate_config(c).unwrap()
    }

    #[test]
    fn los_28_cluster_count_is_uniform() {
        let p = lookup_params(Scenario::GHZ28_LOS);
        let mut s = fork_stream(1, 0, "t");
        let n = 1_000_000;
        let mut counts = [0usize; 6];
        for _ in 0..n {
            counts[draw_num_time_clusters(&p, &mut s)] += 1;
        }
        assert_eq!(counts[0], 0);
        for c in &counts[1..] {
            assert!((*c as f64 / n as f64 - 0.2).abs() < 0.005);
        }
    }

    #[test]
    fn nlos_cluster_count_moments() {
        let mut s = fork_stream(2, 0, "t");
        let n = 1_000_000;
        let p140 = lookup_params(Scenario::GHZ140_NLOS);
        let mean = (0..n).map(|_| draw_num_time_clusters(&p140, &mut s) as f64).sum::<f64>() / n as f64;
        assert!((mean - 2.3).abs() < 0.01, "{mean}");
        let p28 = lookup_params(Scenario::GHZ28_NLOS);
        let ones = (0..n).filter(|_| draw_num_time_clusters(&p28, &mut s) == 1).count();
        assert!((ones as f64 / n as f64 - (-3.4f64).exp()).abs() < 0.002);
    }

    #[test]
    fn subpath_count_laws() {
        let mut s = fork_stream(3, 0, "t");
        let p = lookup_params(Scenario::GHZ140_NLOS);
        let m = draw_num_subpaths(&p, &mut s, 1_000_000);
        let ones = m.iter().filter(|&&k| k == 1).count() as f64 / m.len() as f64;
        assert!((ones - (1.0 - (-1.0f64).exp())).abs() < 0.005);

        let mut p0 = p.clone();
        p0.beta_s = 0.0;
        assert!(draw_num_subpaths(&p0, &mut s, 1000).iter().all(|&k| k == 1));

        let p28 = lookup_params(Scenario::GHZ28_NLOS);
        let m = draw_num_subpaths(&p28, &mut s, 1_000_000);
        let mean_extra = m.iter().map(|&k| (k - 1) as f64).sum::<f64>() / m.len() as f64;
        // beta * q / (1 - q), q = exp(-1/mu_s)
        let q = (-1.0f64 / 4.1).exp();
        let analytic = 0.6 * q / (1.0 - q);
        assert!((mean_extra / analytic - 1.0).abs() < 0.01, "{mean_extra} vs {analytic}");
    }

    #[test]
    fn intra_delays_anchor() {
        assert_eq!(anchor_intra_delays(vec![5.0, 2.0, 9.0]), vec![0.0, 3.0, 7.0]);
        let p = lookup_params(Scenario::GHZ28_NLOS);
        let mut s = fork_stream(4, 0, "t");
        assert_eq!(draw_intra_cluster_delays(&p, &mut s, 1), vec![0.0]);
        for m in 1..20 {
            let r = draw_intra_cluster_delays(&p, &mut s, m);
            assert_eq!(r.len(), m);
            assert_eq!(r[0], 0.0);
            assert!(r.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn cluster_delay_construction() {
        assert_eq!(cluster_delays_from_draws(vec![7.0], &[3.0], 6.0), vec![0.0]);
        let taus = cluster_delays_from_draws(vec![30.0, 5.0, 10.0], &[4.0, 2.0, 0.0], 6.0);
        assert_eq!(taus, vec![0.0, 15.0, 48.0]);
    }

    #[test]
    fn void_interval_holds_under_rounding() {
        // prev_end values that do not round-trip through + 6.0 exactly
        for &rho in &[0.1, 0.2, 0.3, 1e3 + 0.1, 123.456, 7.89e-3] {
            let taus = cluster_delays_from_draws(vec![1.0, 1.0 + 1e-15], &[rho], 6.0);
            assert!(taus[1] - (taus[0] + rho) >= 6.0);
        }
    }

    #[test]
    fn cluster_power_decay() {
        let f = decaying_power_fractions(&[0.0, 20.0], 20.1, &[0.0, 0.0]);
        assert!((f[1] / f[0] - (-20.0f64 / 20.1).exp()).abs() < 1e-12);
        let f = decaying_power_fractions(&[0.0, 2.0], 2.0, &[0.0, 0.0]);
        assert!((f[1] / f[0] - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn single_cluster_gets_all_power() {
        let p = lookup_params(Scenario::GHZ28_NLOS);
        let config = validated(Scenario::GHZ28_NLOS, 0);
        let link = link_budget(&config.config, &p, 10.0, &mut fork_stream(0, 0, "s")).unwrap();
        let powers = assign_cluster_powers(&p, &link, &mut fork_stream(0, 0, "c"), &[0.0]);
        assert_eq!(powers, vec![link.rx_power_mw]);
        let sp = assign_subpath_powers(&p, &mut fork_stream(0, 0, "sp"), &[0.0], 0.25);
        assert_eq!(sp, vec![0.25]);
    }

    #[test]
    fn phases_are_isotropic() {
        let mut s = fork_stream(5, 0, "t");
        let ph = draw_subpath_phases(&mut s, 1_000_000);
        assert!(ph.iter().all(|p| (0.0..TAU).contains(p)));
        let n = ph.len() as f64;
        let c = ph.iter().map(|p| p.cos()).sum::<f64>() / n;
        let si = ph.iter().map(|p| p.sin()).sum::<f64>() / n;
        assert!(c.abs() < 0.003);
        assert!((c * c + si * si).sqrt() < 0.003);
    }

    #[test]
    fn lobe_counts() {
        let mut s = fork_stream(6, 0, "t");
        let p = lookup_params(Scenario::GHZ28_NLOS);
        let n = 1_000_000;
        let mut hist = [0usize; 4];
        for _ in 0..n {
            hist[draw_num_spatial_lobes(&p, &mut s).1] += 1;
        }
        for h in &hist[1..] {
            assert!((*h as f64 / n as f64 - 1.0 / 3.0).abs() < 0.005);
        }
        let p140 = lookup_params(Scenario::GHZ140_LOS);
        for _ in 0..1000 {
            let (aod, _) = draw_num_spatial_lobes(&p140, &mut s);
            assert!(aod == 1 || aod == 2);
        }
        let mut p1 = p140.clone();
        p1.l_aod_max = 1;
        p1.l_aoa_max = 1;
        assert_eq!(draw_num_spatial_lobes(&p1, &mut s), (1, 1));
    }

    #[test]
    fn lobe_sectors() {
        let p = lookup_params(Scenario::GHZ28_LOS);
        let mut s = fork_stream(7, 0, "t");
        for _ in 0..10_000 {
            let lobes = draw_lobe_mean_angles(&p, &mut s, 2, Side::Aod);
            assert!((0.0..180.0).contains(&lobes[0].mean_az_deg));
            assert!((180.0..360.0).contains(&lobes[1].mean_az_deg));
            let one = draw_lobe_mean_angles(&p, &mut s, 1, Side::Aoa);
            assert!((0.0..360.0).contains(&one[0].mean_az_deg));
        }
    }

    #[test]
    fn aoa_lobe_elevation_mean_140_nlos() {
        let p = lookup_params(Scenario::GHZ140_NLOS);
        let mut s = fork_stream(8, 0, "t");
        let n = 1_000_000;
        let mean = (0..n)
            .map(|_| draw_lobe_mean_angles(&p, &mut s, 1, Side::Aoa)[0].mean_el_deg)
            .sum::<f64>()
            / n as f64;
        assert!((mean - 4.8).abs() < 0.02, "{mean}");
    }

    #[test]
    fn azimuth_wrap() {
        assert_eq!(wrap_azimuth(350.0 + 20.0), 10.0);
        assert_eq!(wrap_azimuth(-10.0), 350.0);
        assert_eq!(wrap_azimuth(-1e-17), 0.0);
        assert_eq!(wrap_azimuth(720.0), 0.0);
    }

    #[test]
    fn zero_offsets_sit_at_lobe_mean() {
        let mut p = lookup_params(Scenario::GHZ28_NLOS);
        p.sigma_phi_aod = 0.0;
        p.sigma_theta_aod = 0.0;
        p.sigma_phi_aoa = 0.0;
        p.sigma_theta_aoa = 0.0;
        let mut s = fork_stream(9, 0, "t");
        let aod = draw_lobe_mean_angles(&p, &mut s, 2, Side::Aod);
        let aoa = draw_lobe_mean_angles(&p, &mut s, 3, Side::Aoa);
        for a in draw_subpath_angle_offsets(&p, &mut s, 100, 2, 3) {
            let l = &aod[a.aod_lobe];
            assert_eq!(a.direction(Side::Aod, &aod), (l.mean_az_deg, l.mean_el_deg));
            let l = &aoa[a.aoa_lobe];
            assert_eq!(a.direction(Side::Aoa, &aoa), (l.mean_az_deg, l.mean_el_deg));
        }
    }

    #[test]
    fn aoa_azimuth_offset_spread_28_nlos() {
        let p = lookup_params(Scenario::GHZ28_NLOS);
        let mut s = fork_stream(10, 0, "t");
        let offs = draw_subpath_angle_offsets(&p, &mut s, 1_000_000, 2, 3);
        let n = offs.len() as f64;
        let mean = offs.iter().map(|a| a.aoa_az_offset).sum::<f64>() / n;
        let var = offs.iter().map(|a| (a.aoa_az_offset - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var.sqrt() - 25.5).abs() < 0.1, "{}", var.sqrt());
    }

    #[test]
    fn drops_are_deterministic() {
        let c = validated(Scenario::GHZ28_NLOS, 99);
        assert_eq!(generate_drop(&c, 17).unwrap(), generate_drop(&c, 17).unwrap());
        assert_ne!(generate_drop(&c, 17).unwrap(), generate_drop(&c, 18).unwrap());
    }

    #[test]
    fn drop_invariants_140_nlos() {
        let c = validated(Scenario::GHZ140_NLOS, 5);
        for i in 0..1000 {
            let d = generate_drop(&c, i).unwrap();
            assert!(!d.clusters.is_empty());
            let total: f64 = d.clusters.iter().map(|c| c.power_mw).sum();
            assert!((total / d.link.rx_power_mw - 1.0).abs() < 1e-9);
            for cl in &d.clusters {
                let sum: f64 = cl.subpaths.iter().map(|s| s.power_mw).sum();
                assert!((sum / cl.power_mw - 1.0).abs() < 1e-9);
                assert_eq!(cl.subpaths[0].intra_delay_ns, 0.0);
            }
            assert!(d.inter_cluster_gaps_ns().iter().all(|&g| g >= 6.0));
            for s in d.subpaths() {
                assert!((0.0..360.0).contains(&s.aod_az_deg));
                assert!((0.0..360.0).contains(&s.aoa_az_deg));
                assert!((-90.0..=90.0).contains(&s.aod_el_deg));
                assert!((s.magnitude * s.magnitude / s.power_mw - 1.0).abs() < 1e-12);
                assert!((0.0..TAU).contains(&s.phase_rad));
            }
            let subs: f64 = d.total_power_mw();
            assert!((subs / d.link.rx_power_mw - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn absolute_delay_adds_flight_time() {
        let c = validated(Scenario::GHZ28_LOS, 1);
        let d = generate_drop(&c, 0).unwrap();
        let flight = 10.0 / SPEED_OF_LIGHT_M_S * 1e9;
        for s in d.subpaths() {
            assert!((s.absolute_delay_ns - s.excess_delay_ns - flight).abs() < 1e-9);
        }
    }

    #[test]
    fn tx_power_only_scales_powers() {
        let a = validated(Scenario::GHZ28_NLOS, 3);
        let mut cb = a.config.clone();
        cb.tx_power_dbm = 20.0;
        let b = validate_config(cb).unwrap();
        for i in 0..50 {
            let da = generate_drop(&a, i).unwrap();
            let db = generate_drop(&b, i).unwrap();
            for (x, y) in da.subpaths().zip(db.subpaths()) {
                assert!((y.power_mw / x.power_mw / 100.0 - 1.0).abs() < 1e-12);
                assert_eq!(x.power_fraction, y.power_fraction);
                assert_eq!(x.excess_delay_ns, y.excess_delay_ns);
                assert_eq!((x.aoa_az_deg, x.aod_el_deg), (y.aoa_az_deg, y.aod_el_deg));
                assert_eq!(x.phase_rad, y.phase_rad);
            }
        }
    }
}
