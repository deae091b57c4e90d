//! Statistical 3-D channel simulator for indoor office links at 28 GHz and
//! 140 GHz, with the analysis tools to pull its structure back out.
//!
//! A drop is built from time clusters and spatial lobes: cluster and
//! subpath counts, delays and powers come from [`channel`], total received
//! power from the close-in path loss in [`pathloss`]. [`stats`] turns drops
//! into delay and angular spreads, [`analysis`] partitions profiles,
//! extracts lobes and refits the generating laws, and [`campaign`] with
//! [`output`] runs many drops and writes them to disk.
//!
//! ```
//! use indoorsim::channel::generate_drop;
//! use indoorsim::scenario::{validate_config, Scenario, SimConfig};
//! use indoorsim::stats::drop_rms_delay_spread;
//!
//! let mut config = SimConfig::new(Scenario::GHZ140_NLOS);
//! config.master_seed = 7;
//! let config = validate_config(config).unwrap();
//! let drop = generate_drop(&config, 0).unwrap();
//! assert!(drop_rms_delay_spread(&drop) >= 0.0);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod campaign;
pub mod channel;
pub mod cli;
pub mod output;
pub mod pathloss;
pub mod random;
pub mod report;
pub mod scenario;
pub mod stats;
