//! Generates drops, re-extracts clusters with a 6 ns MTI and fits the laws
//! back.

use indoorsim::analysis::{closed_loop_fit, Family};
use indoorsim::campaign::generate_drops;
use indoorsim::scenario::{lookup_params, validate_config, ClusterDelayDist, Scenario, SimConfig};

fn main() {
    for s in Scenario::ALL {
        let mut config = SimConfig::new(s);
        config.num_drops = 10_000;
        let config = validate_config(config).expect("valid config");
        let drops = generate_drops(&config, None).expect("drops");

        let family = match lookup_params(s).cluster_delay {
            ClusterDelayDist::Exponential { .. } => Family::Exponential,
            ClusterDelayDist::Lognormal { .. } => Family::Lognormal,
        };
        let fit = closed_loop_fit(&drops, 6.0, family).expect("fit");
        println!("{s}");
        println!("  clusters       {:?}", fit.cluster_count.distribution);
        println!("  subpaths       {:?}", fit.subpath_count.distribution);
        println!("  intra delay    {:?}", fit.intra_delay.distribution);
        if let Some(d) = &fit.inter_cluster_delay {
            println!("  cluster delay  {:?}", d.distribution);
        }
        println!(
            "  partition      {}/{} recovered, {:.1}% skipped",
            fit.partition.recovered,
            fit.partition.checked,
            100.0 * fit.partition.skipped_fraction()
        );
    }
}
