//! Generates one drop and walks its clusters and subpaths.

use indoorsim::channel::generate_drop;
use indoorsim::scenario::{validate_config, DistanceSpec, Scenario, SimConfig};

fn main() {
    let mut config = SimConfig::new(Scenario::GHZ28_NLOS);
    config.distance = DistanceSpec::Fixed { distance_m: 12.0 };
    config.master_seed = 2024;
    // shadow fading is off by default
    config.overrides.push(("sigma_sf".into(), "4".into()));
    let config = validate_config(config).expect("valid config");

    let drop = generate_drop(&config, 0).expect("drop");
    let link = &drop.link;
    println!(
        "{} at {:.1} m: PL {:.2} dB (shadowing {:+.2} dB), Pr {:.2} dBm",
        drop.scenario, drop.distance_m, link.path_loss_db, link.shadow_fading_db, link.rx_power_dbm
    );
    println!("{} AoD lobes, {} AoA lobes", drop.aod_lobes.len(), drop.aoa_lobes.len());
    for c in &drop.clusters {
        println!(
            "cluster {} at {:.2} ns, {:.1}% of power, {} subpaths",
            c.index,
            c.excess_delay_ns,
            100.0 * c.power_fraction,
            c.subpaths.len()
        );
        for sp in &c.subpaths {
            println!(
                "  +{:6.2} ns  {:8.5}  AoD ({:6.1}, {:5.1})  AoA ({:6.1}, {:5.1})",
                sp.intra_delay_ns, sp.power_fraction, sp.aod_az_deg, sp.aod_el_deg, sp.aoa_az_deg, sp.aoa_el_deg
            );
        }
    }
}
