//! Close-in (CI) free-space reference path loss with a 1 m reference
//! distance, and the link budget that sets total received power per drop.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::random::RandomStream;
use crate::scenario::{ScenarioParams, SimConfig};

pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathLossError {
    #[error("frequency must be > 0 Hz, got {0}")]
    NonPositiveFrequency(f64),
    #[error("distance {0} m is below the 1 m reference distance")]
    DistanceBelowReference(f64),
}

/// Free-space path loss at 1 m, dB.
pub fn fspl_1m(frequency_hz: f64) -> Result<f64, PathLossError> {
    if !(frequency_hz > 0.0) {
        return Err(PathLossError::NonPositiveFrequency(frequency_hz));
    }
    Ok(20.0 * (4.0 * PI * frequency_hz / SPEED_OF_LIGHT_M_S).log10())
}

/// CI path loss in dB for a given shadow-fading realization.
pub fn path_loss_ci(frequency_hz: f64, distance_m: f64, ple: f64, shadow_db: f64) -> Result<f64, PathLossError> {
    if !(distance_m >= 1.0) {
        return Err(PathLossError::DistanceBelowReference(distance_m));
    }
    Ok(fspl_1m(frequency_hz)? + 10.0 * ple * distance_m.log10() + shadow_db)
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub frequency_hz: f64,
    pub distance_m: f64,
    pub tx_power_dbm: f64,
    pub fspl_1m_db: f64,
    pub path_loss_db: f64,
    pub shadow_fading_db: f64,
    pub rx_power_dbm: f64,
    /// Total received power P_r that cluster powers are normalized to.
    pub rx_power_mw: f64,
}

/// Draws one block shadowing value from `stream` and fills the budget.
///
/// Antenna gains are not included: the channel is omnidirectional.
pub fn link_budget(
    config: &SimConfig,
    params: &ScenarioParams,
    distance_m: f64,
    stream: &mut RandomStream,
) -> Result<LinkBudget, PathLossError> {
    let frequency_hz = config.scenario.frequency_hz();
    let shadow_fading_db = stream.normal(0.0, params.sigma_sf);
    let fspl_1m_db = fspl_1m(frequency_hz)?;
    let path_loss_db = path_loss_ci(frequency_hz, distance_m, params.ple, shadow_fading_db)?;
    let rx_power_dbm = config.tx_power_dbm - path_loss_db;
    Ok(LinkBudget {
        frequency_hz,
        distance_m,
        tx_power_dbm: config.tx_power_dbm,
        fspl_1m_db,
        path_loss_db,
        shadow_fading_db,
        rx_power_dbm,
        rx_power_mw: dbm_to_mw(rx_power_dbm),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::fork_stream;
    use crate::scenario::{lookup_params, Scenario};

    // Independent route: FSPL(1 m) = 20 log10(4 pi / lambda).
    fn fspl_via_wavelength(f: f64) -> f64 {
        let lambda = SPEED_OF_LIGHT_M_S / f;
        20.0 * (4.0 * PI / lambda).log10()
    }

    #[test]
    fn fspl_reference_values() {
        let f28 = fspl_1m(28e9).unwrap();
        let f140 = fspl_1m(140e9).unwrap();
        assert!((f28 - fspl_via_wavelength(28e9)).abs() < 0.01);
        assert!((f140 - fspl_via_wavelength(140e9)).abs() < 0.01);
        // common engineering form: 20 log10(f_MHz) - 27.55 dB at 1 m
        assert!((f28 - (20.0 * 28_000f64.log10() - 27.5522)).abs() < 0.01);
        assert!((f28 - 61.391).abs() < 1e-3, "{f28}");
        assert!((f140 - 75.370).abs() < 1e-3, "{f140}");
    }

    #[test]
    fn fspl_decade_in_frequency_is_20_db() {
        let d = fspl_1m(2.8e11).unwrap() - fspl_1m(2.8e10).unwrap();
        assert!((d - 20.0).abs() < 1e-12);
    }

    #[test]
    fn fspl_rejects_non_positive_frequency() {
        assert_eq!(fspl_1m(0.0), Err(PathLossError::NonPositiveFrequency(0.0)));
        assert!(fspl_1m(-1.0).is_err());
    }

    #[test]
    fn ci_anchor_and_examples() {
        assert_eq!(path_loss_ci(28e9, 1.0, 2.8, 0.0).unwrap(), fspl_1m(28e9).unwrap());
        let pl10 = path_loss_ci(28e9, 10.0, 1.2, 0.0).unwrap();
        assert!((pl10 - 73.38).abs() < 0.02, "{pl10}");
        let pl_max = path_loss_ci(28e9, 45.9, 2.8, 0.0).unwrap();
        assert!((pl_max - 107.9).abs() < 0.1, "{pl_max}");
        assert_eq!(
            path_loss_ci(28e9, 0.5, 2.0, 0.0),
            Err(PathLossError::DistanceBelowReference(0.5))
        );
    }

    #[test]
    fn ten_n_db_per_decade() {
        for &n in &[1.2, 2.0, 2.8, 3.0] {
            let d = path_loss_ci(140e9, 30.0, n, 0.0).unwrap() - path_loss_ci(140e9, 3.0, n, 0.0).unwrap();
            assert!((d - 10.0 * n).abs() < 1e-12);
        }
    }

    #[test]
    fn dbm_mw_round_trip() {
        for &dbm in &[-120.0, -73.38, 0.0, 23.0] {
            let back = mw_to_dbm(dbm_to_mw(dbm));
            assert!((back - dbm).abs() <= 1e-12 * dbm.abs().max(1.0));
        }
        assert!((dbm_to_mw(-73.38) / 10f64.powf(-7.338) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_without_shadowing() {
        let config = SimConfig::new(Scenario::GHZ28_LOS);
        let params = lookup_params(Scenario::GHZ28_LOS);
        let mut s = fork_stream(0, 0, "shadowing");
        let lb = link_budget(&config, &params, 10.0, &mut s).unwrap();
        assert_eq!(lb.shadow_fading_db, 0.0);
        assert_eq!(lb.rx_power_dbm, -lb.path_loss_db);
        assert_eq!(lb.rx_power_mw, dbm_to_mw(lb.rx_power_dbm));
        assert!((lb.path_loss_db - (lb.fspl_1m_db + 12.0)).abs() < 1e-12);
    }

    #[test]
    fn shadowing_is_zero_mean() {
        let config = SimConfig::new(Scenario::GHZ28_NLOS);
        let mut params = lookup_params(Scenario::GHZ28_NLOS);
        params.sigma_sf = 4.0;
        let mut s = fork_stream(42, 0, "shadowing");
        let n = 100_000;
        let pl = path_loss_ci(28e9, 10.0, params.ple, 0.0).unwrap();
        let mean = (0..n)
            .map(|_| link_budget(&config, &params, 10.0, &mut s).unwrap().rx_power_dbm)
            .sum::<f64>()
            / n as f64;
        // 3 sigma of the mean is 0.038 dB
        assert!((mean + pl).abs() < 0.04, "{mean} vs {}", -pl);
    }
}
