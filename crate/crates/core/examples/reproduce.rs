//! Median RMS delay spreads against published values. Pass a drop count to
//! trade accuracy for time, e.g. `cargo run --release --example reproduce 2000`.

use indoorsim::report::{reproduce_with, REPRODUCE_DROPS, REPRODUCE_SEED};

fn main() {
    let drops = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("drop count"))
        .unwrap_or(REPRODUCE_DROPS);
    let report = reproduce_with(drops, REPRODUCE_SEED).expect("reproduction");
    print!("{}", report.render());
    if !report.all_pass() {
        std::process::exit(1);
    }
}
