//! Power delay profiles, power angular spectra, RMS delay spread, circular
//! angular spread and order-statistic summaries.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{ChannelDrop, Side};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("profile has no power")]
    EmptyProfile,
    #[error("input is empty or carries no power")]
    EmptyInput,
    #[error("bin width must be > 0, got {0}")]
    NonPositiveBinWidth(f64),
    #[error("invalid tap: {0}")]
    InvalidTap(String),
    #[error("angle and power lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tap {
    pub excess_delay_ns: f64,
    pub power_mw: f64,
    /// `(cluster, subpath)` when the tap came from a generated drop.
    pub source: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedPdp {
    pub bin_width_ns: f64,
    /// Bin `k` holds taps with delay in `[k w, (k+1) w)`.
    pub powers_mw: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerDelayProfile {
    /// Sorted by delay.
    pub taps: Vec<Tap>,
    pub binned: Option<BinnedPdp>,
}

impl PowerDelayProfile {
    /// Builds a profile from `(delay, power)` pairs, sorting by delay.
    pub fn from_taps(taps: impl IntoIterator<Item = (f64, f64)>) -> Result<Self, StatsError> {
        let taps = taps
            .into_iter()
            .map(|(excess_delay_ns, power_mw)| Tap {
                excess_delay_ns,
                power_mw,
                source: None,
            })
            .collect();
        Self::from_tap_list(taps)
    }

    fn from_tap_list(mut taps: Vec<Tap>) -> Result<Self, StatsError> {
        for t in &taps {
            if !(t.excess_delay_ns >= 0.0 && t.excess_delay_ns.is_finite()) {
                return Err(StatsError::InvalidTap(format!("delay {}", t.excess_delay_ns)));
            }
            if !(t.power_mw >= 0.0 && t.power_mw.is_finite()) {
                return Err(StatsError::InvalidTap(format!("power {}", t.power_mw)));
            }
        }
        taps.sort_by(|a, b| a.excess_delay_ns.total_cmp(&b.excess_delay_ns));
        Ok(PowerDelayProfile { taps, binned: None })
    }

    /// Adds the binned form.
    pub fn with_bins(mut self, bin_width_ns: f64) -> Result<Self, StatsError> {
        if !(bin_width_ns > 0.0 && bin_width_ns.is_finite()) {
            return Err(StatsError::NonPositiveBinWidth(bin_width_ns));
        }
        let last = self.taps.last().map_or(0.0, |t| t.excess_delay_ns);
        let mut powers_mw = vec![0.0; (last / bin_width_ns).floor() as usize + 1];
        for t in &self.taps {
            let k = ((t.excess_delay_ns / bin_width_ns).floor() as usize).min(powers_mw.len() - 1);
            powers_mw[k] += t.power_mw;
        }
        self.binned = Some(BinnedPdp { bin_width_ns, powers_mw });
        Ok(self)
    }

    pub fn total_power_mw(&self) -> f64 {
        self.taps.iter().map(|t| t.power_mw).sum()
    }

    /// Drops taps more than `db_below_peak` dB under the strongest tap.
    pub fn thresholded(&self, db_below_peak: f64) -> Self {
        let peak = self.taps.iter().map(|t| t.power_mw).fold(0.0, f64::max);
        let floor = peak * 10f64.powf(-db_below_peak.abs() / 10.0);
        PowerDelayProfile {
            taps: self.taps.iter().copied().filter(|t| t.power_mw >= floor).collect(),
            binned: None,
        }
    }
}

/// Omnidirectional PDP of a drop: one tap per subpath, at its excess delay.
pub fn build_pdp(drop: &ChannelDrop, bin_width_ns: f64) -> Result<PowerDelayProfile, StatsError> {
    let taps = drop
        .subpaths()
        .map(|s| Tap {
            excess_delay_ns: s.excess_delay_ns,
            power_mw: s.power_mw,
            source: Some((s.cluster_index, s.subpath_index)),
        })
        .collect();
    PowerDelayProfile::from_tap_list(taps)?.with_bins(bin_width_ns)
}

/// Power-weighted standard deviation of delay over `(delay, power)` pairs.
pub fn delay_spread_of(pairs: impl Iterator<Item = (f64, f64)> + Clone) -> Result<f64, StatsError> {
    let total: f64 = pairs.clone().map(|(_, p)| p).sum();
    if !(total > 0.0) {
        return Err(StatsError::EmptyProfile);
    }
    let mean = pairs.clone().map(|(t, p)| p * t).sum::<f64>() / total;
    let var = pairs.map(|(t, p)| p * (t - mean) * (t - mean)).sum::<f64>() / total;
    Ok(var.max(0.0).sqrt())
}

/// RMS delay spread of a profile, ns, computed on exact tap delays.
pub fn rms_delay_spread(pdp: &PowerDelayProfile) -> Result<f64, StatsError> {
    delay_spread_of(pdp.taps.iter().map(|t| (t.excess_delay_ns, t.power_mw)))
}

/// RMS delay spread of a drop from its power fractions; independent of
/// transmit power and distance bit for bit.
pub fn drop_rms_delay_spread(drop: &ChannelDrop) -> f64 {
    delay_spread_of(drop.subpaths().map(|s| (s.excess_delay_ns, s.power_fraction))).unwrap_or(0.0)
}

pub const PAS_AZ_CELLS: usize = 360;
pub const PAS_EL_CELLS: usize = 181;

/// Power on a 1 degree azimuth x elevation grid. Cell `(az, el)` is centered
/// on integer degrees, az in 0..360 and el in -90..=90.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerAngularSpectrum {
    pub side: Side,
    grid: Vec<f64>,
}

impl PowerAngularSpectrum {
    pub fn new(side: Side) -> Self {
        PowerAngularSpectrum {
            side,
            grid: vec![0.0; PAS_AZ_CELLS * PAS_EL_CELLS],
        }
    }

    fn index(az_cell: usize, el_cell: usize) -> usize {
        el_cell * PAS_AZ_CELLS + az_cell
    }

    /// Nearest cell for a direction.
    pub fn cell_of(az_deg: f64, el_deg: f64) -> (usize, usize) {
        let az = (az_deg.round() as i64).rem_euclid(PAS_AZ_CELLS as i64) as usize;
        let el = (el_deg.round().clamp(-90.0, 90.0) + 90.0) as usize;
        (az, el)
    }

    pub fn deposit(&mut self, az_deg: f64, el_deg: f64, power_mw: f64) {
        let (a, e) = Self::cell_of(az_deg, el_deg);
        self.grid[Self::index(a, e)] += power_mw;
    }

    /// Power in the cell at integer azimuth `az` (0..360) and elevation
    /// `el` (-90..=90).
    pub fn get(&self, az: usize, el: i32) -> f64 {
        self.grid[Self::index(az % PAS_AZ_CELLS, (el + 90) as usize)]
    }

    pub fn set(&mut self, az: usize, el: i32, power_mw: f64) {
        self.grid[Self::index(az % PAS_AZ_CELLS, (el + 90) as usize)] = power_mw;
    }

    pub(crate) fn get_cell(&self, az_cell: usize, el_cell: usize) -> f64 {
        self.grid[Self::index(az_cell, el_cell)]
    }

    pub fn total_power_mw(&self) -> f64 {
        self.grid.iter().sum()
    }

    pub fn scale(&mut self, factor: f64) {
        self.grid.iter_mut().for_each(|p| *p *= factor);
    }

    /// Non-empty cells as `(az_deg, el_deg, power_mw)`.
    pub fn occupied_cells(&self) -> impl Iterator<Item = (usize, i32, f64)> + '_ {
        self.grid
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, p)| (i % PAS_AZ_CELLS, (i / PAS_AZ_CELLS) as i32 - 90, *p))
    }
}

/// Deposits every subpath's power in its nearest cell; no smoothing.
pub fn build_pas(drop: &ChannelDrop, side: Side) -> PowerAngularSpectrum {
    let mut pas = PowerAngularSpectrum::new(side);
    for s in drop.subpaths() {
        pas.deposit(s.azimuth_deg(side), s.elevation_deg(side), s.power_mw);
    }
    pas
}

/// Circular RMS angular spread, degrees:
/// `sqrt(-2 ln |sum p e^{j theta} / sum p|)`.
pub fn circular_angular_spread(angles_deg: &[f64], powers_mw: &[f64]) -> Result<f64, StatsError> {
    if angles_deg.len() != powers_mw.len() {
        return Err(StatsError::LengthMismatch(angles_deg.len(), powers_mw.len()));
    }
    let total: f64 = powers_mw.iter().sum();
    if angles_deg.is_empty() || !(total > 0.0) {
        return Err(StatsError::EmptyInput);
    }
    let (mut re, mut im) = (0.0, 0.0);
    for (a, p) in angles_deg.iter().zip(powers_mw) {
        let (s, c) = a.to_radians().sin_cos();
        re += p * c;
        im += p * s;
    }
    let r = (re.hypot(im) / total).max(1e-12);
    Ok((-2.0 * r.ln()).max(0.0).sqrt().to_degrees())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plane {
    Azimuth,
    Elevation,
}

/// Global RMS angular spread of a drop over delay-integrated power.
pub fn global_rms_as(drop: &ChannelDrop, side: Side, plane: Plane) -> f64 {
    let (angles, powers): (Vec<f64>, Vec<f64>) = drop
        .subpaths()
        .map(|s| {
            let a = match plane {
                Plane::Azimuth => s.azimuth_deg(side),
                Plane::Elevation => s.elevation_deg(side),
            };
            (a, s.power_fraction)
        })
        .unzip();
    circular_angular_spread(&angles, &powers).unwrap_or(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub x: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Lower-middle element for even counts.
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub cdf: Vec<CdfPoint>,
}

/// Sorted sample with step-function CDF `F(x) = #{v <= x} / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(values: &[f64]) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::EmptyInput);
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn median(&self) -> f64 {
        self.sorted[(self.sorted.len() - 1) / 2]
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Median, mean and the empirical CDF at `grid`. An empty grid evaluates
/// the CDF at every distinct sample value.
pub fn summarize(values: &[f64], grid: &[f64]) -> Result<Summary, StatsError> {
    let ecdf = EmpiricalCdf::new(values)?;
    let sorted = ecdf.sorted();
    let xs: Vec<f64> = if grid.is_empty() {
        let mut v = sorted.to_vec();
        v.dedup();
        v
    } else {
        grid.to_vec()
    };
    Ok(Summary {
        count: sorted.len(),
        mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
        median: ecdf.median(),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
        cdf: xs.into_iter().map(|x| CdfPoint { x, p: ecdf.eval(x) }).collect(),
    })
}
