//! Prints the built-in scenario table, then one row with an override.

use indoorsim::scenario::{lookup_params, render_parameter_table, Scenario};

fn main() {
    print!("{}", render_parameter_table());

    let mut p = lookup_params(Scenario::GHZ140_NLOS);
    p.set("lambda_c", "2.5").expect("valid override");
    println!("\n140 GHz NLOS with lambda_c = 2.5:");
    for (k, v) in p.key_values() {
        println!("  {k} = {v}");
    }
}
