//! Sweeps a 8 degree beam over one drop's arrival spectrum, interpolates the
//! coarse scan to 1 degree and counts lobes at a -10 dB threshold.

use indoorsim::analysis::{beam_sweep, extract_spatial_lobes, interpolate_pas, DEFAULT_SLT_DB};
use indoorsim::channel::{generate_drop, Side};
use indoorsim::scenario::{validate_config, Scenario, SimConfig};
use indoorsim::stats::build_pas;

fn main() {
    let mut config = SimConfig::new(Scenario::GHZ140_LOS);
    config.master_seed = 11;
    let config = validate_config(config).expect("valid config");

    for i in 0..5 {
        let drop = generate_drop(&config, i).expect("drop");
        let pas = build_pas(&drop, Side::Aoa);
        let elevations: Vec<f64> = (-6..=6).map(|k| k as f64 * 8.0).collect();
        let scan = beam_sweep(&pas, 8.0, 8.0, &elevations);
        let smooth = interpolate_pas(&scan, Side::Aoa).expect("interpolation");
        let found = extract_spatial_lobes(&smooth, DEFAULT_SLT_DB).expect("lobes");

        println!("drop {i}: {} generated AoA lobes, {} found", drop.aoa_lobes.len(), found.lobes.len());
        for l in &found.lobes {
            println!(
                "  peak ({:3}, {:3}) mean az {:6.1}  {:4} cells",
                l.peak_az_deg,
                l.peak_el_deg,
                l.mean_az_deg,
                l.cells.len()
            );
        }
    }
}
