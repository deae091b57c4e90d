//! Runs a campaign, writes every output file and reads them back.

use indoorsim::campaign::run_campaign;
use indoorsim::output::{emit_outputs, read_cdf_csv, read_drops_jsonl, read_pdp_csv, read_summary_json};
use indoorsim::scenario::{validate_config, DistanceSpec, OutputFormat, Scenario, SimConfig};

fn main() {
    let dir = std::env::temp_dir().join("indoorsim-example");
    let mut config = SimConfig::new(Scenario::GHZ140_NLOS);
    config.num_drops = 200;
    config.distance = DistanceSpec::Uniform { min_m: 5.0, max_m: 40.0 };
    let config = validate_config(config).expect("valid config");

    let campaign = run_campaign(&config, None).expect("campaign");
    let files = emit_outputs(&campaign.result, &campaign.drops, &config, &dir, OutputFormat::All).expect("write");
    for f in &files {
        println!("wrote {}", f.display());
    }

    let summary = read_summary_json(&dir.join("summary.json")).expect("summary");
    println!("seed {} config {}", summary.master_seed, summary.config_hash);
    let drops = read_drops_jsonl(&dir.join("drops.jsonl")).expect("drops");
    assert_eq!(drops, campaign.drops);
    println!("{} drops round-tripped exactly", drops.len());
    println!("{} PDP taps", read_pdp_csv(&dir.join("pdp.csv")).expect("pdp").len());
    println!("{} CDF points", read_cdf_csv(&dir.join("cdf.csv")).expect("cdf").len());
}
