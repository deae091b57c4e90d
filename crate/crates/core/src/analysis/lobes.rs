//! Spatial lobe extraction on 1 degree power angular spectra.
//!
//! Coarse directional measurements are first brought onto the 1 degree grid
//! by [`interpolate_pas`]: linear in azimuth (circular) at each measured
//! elevation, then linear in elevation between measured levels. Lobes are
//! 4-connected groups of cells within `slt_db` of the spectrum peak.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::channel::Side;
use crate::stats::{PowerAngularSpectrum, PAS_AZ_CELLS, PAS_EL_CELLS};

/// Spatial lobe threshold used for indoor office channels, dB below peak.
pub const DEFAULT_SLT_DB: f64 = -10.0;

/// Received power at one antenna pointing direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirectionalSample {
    pub az_deg: f64,
    pub el_deg: f64,
    pub power_mw: f64,
}

fn wrap(az: f64) -> f64 {
    let r = az.rem_euclid(360.0);
    if r >= 360.0 {
        0.0
    } else {
        r
    }
}

/// Linear interpolation of one elevation level onto integer azimuths.
fn interpolate_ring(points: &[(f64, f64)]) -> Vec<f64> {
    if points.len() == 1 {
        return vec![points[0].1; PAS_AZ_CELLS];
    }
    (0..PAS_AZ_CELLS)
        .map(|a| {
            let a = a as f64;
            // last point at or before `a`, circularly
            let next = points.partition_point(|(az, _)| *az <= a);
            let (lo, hi) = match next {
                0 => (points[points.len() - 1], points[0]),
                n if n == points.len() => (points[n - 1], points[0]),
                n => (points[n - 1], points[n]),
            };
            let span = (hi.0 - lo.0).rem_euclid(360.0);
            let offset = (a - lo.0).rem_euclid(360.0);
            if span == 0.0 {
                lo.1
            } else {
                lo.1 + (hi.1 - lo.1) * offset / span
            }
        })
        .collect()
}

/// Interpolates coarse samples onto the 1 degree grid without rescaling.
pub fn interpolate_grid(samples: &[DirectionalSample], side: Side) -> Result<PowerAngularSpectrum, AnalysisError> {
    let mut distinct_az: Vec<f64> = samples.iter().map(|s| wrap(s.az_deg)).collect();
    distinct_az.sort_by(f64::total_cmp);
    distinct_az.dedup();
    if distinct_az.len() < 2 {
        return Err(AnalysisError::InsufficientSamples);
    }

    // level key: elevation in micro-degrees
    let mut levels: BTreeMap<i64, BTreeMap<i64, f64>> = BTreeMap::new();
    for s in samples {
        let el_key = (s.el_deg.clamp(-90.0, 90.0) * 1e6).round() as i64;
        let az_key = (wrap(s.az_deg) * 1e6).round() as i64;
        *levels.entry(el_key).or_default().entry(az_key).or_insert(0.0) += s.power_mw;
    }
    let rings: Vec<(f64, Vec<f64>)> = levels
        .into_iter()
        .map(|(el, ring)| {
            let points: Vec<(f64, f64)> = ring.into_iter().map(|(az, p)| (az as f64 * 1e-6, p)).collect();
            (el as f64 * 1e-6, interpolate_ring(&points))
        })
        .collect();

    let mut pas = PowerAngularSpectrum::new(side);
    if rings.len() == 1 {
        let el = rings[0].0.round() as i32;
        for (az, p) in rings[0].1.iter().enumerate() {
            pas.set(az, el, *p);
        }
        return Ok(pas);
    }
    for el_cell in 0..PAS_EL_CELLS {
        let e = el_cell as f64 - 90.0;
        let upper = rings.partition_point(|(el, _)| *el < e);
        let (lo, hi) = if upper == 0 {
            if (rings[0].0 - e).abs() > 0.5 {
                continue;
            }
            (&rings[0], &rings[0])
        } else if upper == rings.len() {
            if (e - rings[upper - 1].0).abs() > 0.5 {
                continue;
            }
            (&rings[upper - 1], &rings[upper - 1])
        } else {
            (&rings[upper - 1], &rings[upper])
        };
        let w = if hi.0 == lo.0 { 0.0 } else { (e - lo.0) / (hi.0 - lo.0) };
        for az in 0..PAS_AZ_CELLS {
            pas.set(az, e as i32, lo.1[az] + (hi.1[az] - lo.1[az]) * w);
        }
    }
    Ok(pas)
}

/// Interpolates and rescales so the grid total equals the sampled total.
pub fn interpolate_pas(samples: &[DirectionalSample], side: Side) -> Result<PowerAngularSpectrum, AnalysisError> {
    let mut pas = interpolate_grid(samples, side)?;
    let target: f64 = samples.iter().map(|s| s.power_mw).sum();
    let got = pas.total_power_mw();
    if got > 0.0 {
        pas.scale(target / got);
    }
    Ok(pas)
}

/// Emulates a directional sweep over `pas` with a Gaussian beam of the
/// given half-power beamwidth, pointing every `step_deg` in azimuth at each
/// of `elevations_deg`.
pub fn beam_sweep(
    pas: &PowerAngularSpectrum,
    hpbw_deg: f64,
    step_deg: f64,
    elevations_deg: &[f64],
) -> Vec<DirectionalSample> {
    let cells: Vec<(usize, i32, f64)> = pas.occupied_cells().collect();
    let k = 4.0 * std::f64::consts::LN_2 / (hpbw_deg * hpbw_deg);
    let steps = (360.0 / step_deg).round().max(1.0) as usize;
    let mut out = Vec::with_capacity(steps * elevations_deg.len());
    for &el in elevations_deg {
        for i in 0..steps {
            let az = i as f64 * 360.0 / steps as f64;
            let power_mw = cells
                .iter()
                .map(|&(ca, ce, p)| {
                    let daz = (ca as f64 - az + 180.0).rem_euclid(360.0) - 180.0;
                    let del = ce as f64 - el;
                    p * (-k * (daz * daz + del * del)).exp()
                })
                .sum();
            out.push(DirectionalSample { az_deg: az, el_deg: el, power_mw });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lobe {
    /// Member cells as `(az_deg, el_deg)`.
    pub cells: Vec<(usize, i32)>,
    pub peak_az_deg: usize,
    pub peak_el_deg: i32,
    pub peak_power_mw: f64,
    pub power_mw: f64,
    /// Power-weighted circular mean azimuth.
    pub mean_az_deg: f64,
    pub mean_el_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LobeSet {
    /// Strongest first.
    pub lobes: Vec<Lobe>,
    pub slt_db: f64,
    pub threshold_mw: f64,
}

/// Groups cells at or above `peak * 10^(slt_db/10)` into 4-connected lobes.
/// Azimuth wraps around; elevation does not.
pub fn extract_spatial_lobes(pas: &PowerAngularSpectrum, slt_db: f64) -> Result<LobeSet, AnalysisError> {
    let mut peak = 0.0f64;
    for el in 0..PAS_EL_CELLS {
        for az in 0..PAS_AZ_CELLS {
            peak = peak.max(pas.get_cell(az, el));
        }
    }
    if !(peak > 0.0) {
        return Err(AnalysisError::EmptyGrid);
    }
    let threshold_mw = peak * 10f64.powf(slt_db / 10.0);
    let above = |az: usize, el: usize| {
        let p = pas.get_cell(az, el);
        p > 0.0 && p >= threshold_mw
    };

    let mut seen = vec![false; PAS_AZ_CELLS * PAS_EL_CELLS];
    let mut lobes = Vec::new();
    for el0 in 0..PAS_EL_CELLS {
        for az0 in 0..PAS_AZ_CELLS {
            if seen[el0 * PAS_AZ_CELLS + az0] || !above(az0, el0) {
                continue;
            }
            seen[el0 * PAS_AZ_CELLS + az0] = true;
            let mut queue = VecDeque::from([(az0, el0)]);
            let mut cells = Vec::new();
            while let Some((az, el)) = queue.pop_front() {
                cells.push((az, el));
                let mut neighbors = vec![((az + 1) % PAS_AZ_CELLS, el), ((az + PAS_AZ_CELLS - 1) % PAS_AZ_CELLS, el)];
                if el > 0 {
                    neighbors.push((az, el - 1));
                }
                if el + 1 < PAS_EL_CELLS {
                    neighbors.push((az, el + 1));
                }
                for (na, ne) in neighbors {
                    let idx = ne * PAS_AZ_CELLS + na;
                    if !seen[idx] && above(na, ne) {
                        seen[idx] = true;
                        queue.push_back((na, ne));
                    }
                }
            }
            lobes.push(summarize_lobe(pas, cells));
        }
    }
    lobes.sort_by(|a: &Lobe, b: &Lobe| b.power_mw.total_cmp(&a.power_mw));
    Ok(LobeSet {
        lobes,
        slt_db,
        threshold_mw,
    })
}

fn summarize_lobe(pas: &PowerAngularSpectrum, mut cells: Vec<(usize, usize)>) -> Lobe {
    cells.sort_unstable_by_key(|&(az, el)| (el, az));
    let (mut power, mut re, mut im, mut el_sum) = (0.0, 0.0, 0.0, 0.0);
    let mut peak = (0usize, 0usize, f64::NEG_INFINITY);
    for &(az, el) in &cells {
        let p = pas.get_cell(az, el);
        let (s, c) = (az as f64).to_radians().sin_cos();
        power += p;
        re += p * c;
        im += p * s;
        el_sum += p * (el as f64 - 90.0);
        if p > peak.2 {
            peak = (az, el, p);
        }
    }
    Lobe {
        cells: cells.iter().map(|&(az, el)| (az, el as i32 - 90)).collect(),
        peak_az_deg: peak.0,
        peak_el_deg: peak.1 as i32 - 90,
        peak_power_mw: peak.2,
        power_mw: power,
        mean_az_deg: wrap(im.atan2(re).to_degrees()),
        mean_el_deg: el_sum / power,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(side: Side, el: i32, values: &[(usize, f64)]) -> PowerAngularSpectrum {
        let mut pas = PowerAngularSpectrum::new(side);
        for &(az, p) in values {
            pas.set(az, el, p);
        }
        pas
    }

    #[test]
    fn identity_on_one_degree_samples() {
        let samples: Vec<DirectionalSample> = (0..360)
            .map(|a| DirectionalSample {
                az_deg: a as f64,
                el_deg: 0.0,
                power_mw: 1.0 + (a % 7) as f64,
            })
            .collect();
        let pas = interpolate_pas(&samples, Side::Aoa).unwrap();
        for s in &samples {
            assert!((pas.get(s.az_deg as usize, 0) - s.power_mw).abs() < 1e-12);
        }
        assert_eq!(pas.occupied_cells().count(), 360);
    }

    #[test]
    fn linear_midpoint_and_wrap() {
        let samples = [
            DirectionalSample { az_deg: 0.0, el_deg: 0.0, power_mw: 1.0 },
            DirectionalSample { az_deg: 30.0, el_deg: 0.0, power_mw: 0.0 },
        ];
        let raw = interpolate_grid(&samples, Side::Aoa).unwrap();
        assert!((raw.get(15, 0) - 0.5).abs() < 1e-12);
        // from 30 deg (0 mW) around to 360 deg (1 mW)
        assert!((raw.get(195, 0) - 0.5).abs() < 1e-12);
        assert!((raw.get(359, 0) - 329.0 / 330.0).abs() < 1e-12);

        let across = [
            DirectionalSample { az_deg: 350.0, el_deg: 0.0, power_mw: 2.0 },
            DirectionalSample { az_deg: 10.0, el_deg: 0.0, power_mw: 4.0 },
        ];
        let raw = interpolate_grid(&across, Side::Aoa).unwrap();
        let vals: Vec<f64> = (350..370).map(|a| raw.get(a % 360, 0)).collect();
        for w in vals.windows(2) {
            assert!((w[1] - w[0] - 0.1).abs() < 1e-12, "{vals:?}");
        }
    }

    #[test]
    fn renormalization_preserves_total() {
        let samples = [
            DirectionalSample { az_deg: 0.0, el_deg: -8.0, power_mw: 1.0 },
            DirectionalSample { az_deg: 120.0, el_deg: -8.0, power_mw: 3.0 },
            DirectionalSample { az_deg: 0.0, el_deg: 8.0, power_mw: 2.0 },
            DirectionalSample { az_deg: 240.0, el_deg: 8.0, power_mw: 0.5 },
        ];
        let pas = interpolate_pas(&samples, Side::Aod).unwrap();
        assert!((pas.total_power_mw() - 6.5).abs() < 1e-9);
        // nothing outside the measured elevation span
        assert_eq!(pas.get(0, 20), 0.0);
        assert!(pas.get(0, 0) > 0.0);
    }

    #[test]
    fn too_few_azimuths() {
        let samples = [
            DirectionalSample { az_deg: 10.0, el_deg: 0.0, power_mw: 1.0 },
            DirectionalSample { az_deg: 370.0, el_deg: 5.0, power_mw: 1.0 },
        ];
        assert_eq!(interpolate_grid(&samples, Side::Aoa), Err(AnalysisError::InsufficientSamples));
    }

    #[test]
    fn single_cell_is_one_lobe() {
        let pas = row(Side::Aoa, 3, &[(100, 1.0)]);
        let set = extract_spatial_lobes(&pas, DEFAULT_SLT_DB).unwrap();
        assert_eq!(set.lobes.len(), 1);
        assert_eq!((set.lobes[0].peak_az_deg, set.lobes[0].peak_el_deg), (100, 3));
    }

    fn db(x: f64) -> f64 {
        10f64.powf(x / 10.0)
    }

    #[test]
    fn valley_splits_lobes() {
        // 0 dB peak, -15 dB valley, -5 dB secondary peak
        let pas = row(
            Side::Aoa,
            0,
            &[(10, db(-3.0)), (11, db(0.0)), (12, db(-15.0)), (13, db(-5.0)), (14, db(-8.0))],
        );
        let set = extract_spatial_lobes(&pas, -10.0).unwrap();
        assert_eq!(set.lobes.len(), 2);
        assert_eq!(set.lobes[0].cells, vec![(10, 0), (11, 0)]);
        assert_eq!(set.lobes[1].cells, vec![(13, 0), (14, 0)]);
    }

    #[test]
    fn weak_secondary_excluded() {
        let pas = row(Side::Aod, 0, &[(50, db(0.0)), (200, db(-12.0))]);
        let set = extract_spatial_lobes(&pas, -10.0).unwrap();
        assert_eq!(set.lobes.len(), 1);
        for lobe in &set.lobes {
            for &(az, el) in &lobe.cells {
                assert!(pas.get(az, el) >= lobe.peak_power_mw * db(-10.0) - 1e-15);
            }
        }
    }

    #[test]
    fn lobes_connect_across_azimuth_wrap_not_elevation_edge() {
        let pas = row(Side::Aoa, 0, &[(359, 1.0), (0, 1.0)]);
        let set = extract_spatial_lobes(&pas, -10.0).unwrap();
        assert_eq!(set.lobes.len(), 1);
        assert!((set.lobes[0].mean_az_deg - 359.5).abs() < 1e-9);

        let mut pas = PowerAngularSpectrum::new(Side::Aoa);
        pas.set(0, 90, 1.0);
        pas.set(0, -90, 1.0);
        assert_eq!(extract_spatial_lobes(&pas, -10.0).unwrap().lobes.len(), 2);
    }

    #[test]
    fn empty_grid() {
        let pas = PowerAngularSpectrum::new(Side::Aoa);
        assert_eq!(extract_spatial_lobes(&pas, -10.0), Err(AnalysisError::EmptyGrid));
    }

    #[test]
    fn sweep_peaks_at_source() {
        let pas = row(Side::Aoa, 0, &[(90, 1.0)]);
        let sweep = beam_sweep(&pas, 8.0, 8.0, &[0.0]);
        let best = sweep.iter().max_by(|a, b| a.power_mw.total_cmp(&b.power_mw)).unwrap();
        assert!((best.az_deg - 88.0).abs() < 1e-9);
        // half power at half a beamwidth
        let half = beam_sweep(&pas, 8.0, 360.0, &[0.0]);
        assert!(half[0].power_mw < 1e-100);
        let at = beam_sweep(&row(Side::Aoa, 0, &[(4, 1.0)]), 8.0, 360.0, &[0.0]);
        assert!((at[0].power_mw - 0.5).abs() < 1e-12);
    }
}
