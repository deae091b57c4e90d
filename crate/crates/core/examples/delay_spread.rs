//! Delay and angular spreads of a small campaign, per scenario.

use indoorsim::campaign::run_campaign;
use indoorsim::scenario::{validate_config, Scenario, SimConfig};

fn main() {
    println!("{:<12} {:>10} {:>10} {:>10}", "scenario", "DS [ns]", "AoD [deg]", "AoA [deg]");
    for s in Scenario::ALL {
        let mut config = SimConfig::new(s);
        config.num_drops = 2_000;
        let config = validate_config(config).expect("valid config");
        let result = run_campaign(&config, None).expect("campaign").result;
        let m = |name| result.median(name).unwrap();
        println!(
            "{:<12} {:>10.2} {:>10.2} {:>10.2}",
            s.to_string(),
            m("rms_ds_ns"),
            m("aod_az_spread_deg"),
            m("aoa_az_spread_deg")
        );
    }
}
