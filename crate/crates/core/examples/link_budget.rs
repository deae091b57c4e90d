//! Close-in path loss against distance for both bands.

use indoorsim::pathloss::{fspl_1m, path_loss_ci};
use indoorsim::scenario::{lookup_params, Scenario};

fn main() {
    println!("{:<12} {:>10} {:>8} {:>8} {:>8}", "scenario", "FSPL(1m)", "5 m", "20 m", "40 m");
    for s in Scenario::ALL {
        let f = s.frequency_hz();
        let ple = lookup_params(s).ple;
        let at = |d: f64| path_loss_ci(f, d, ple, 0.0).unwrap();
        println!(
            "{:<12} {:>10.2} {:>8.2} {:>8.2} {:>8.2}",
            s.to_string(),
            fspl_1m(f).unwrap(),
            at(5.0),
            at(20.0),
            at(40.0)
        );
    }
}
