//! The same portfolios under different rank exponents.
//!
//!     cargo run --example exponent_policies

use lq::{lq, ExponentPolicy, Portfolio, TaxonomyTree};

fn main() {
    let tree = TaxonomyTree::from_json(lq::SAMPLE_TAXONOMY).unwrap();
    let portfolios = [
        ("three Western", Portfolio::fluent(["Serbian", "Slovene", "Croatian"])),
        ("Slavic + English", Portfolio::fluent(["Serbian", "English"])),
        ("all five", Portfolio::fluent(["Serbian", "Slovene", "Croatian", "English", "Chinese"])),
    ];
    let policies: Vec<ExponentPolicy> =
        ["sqrt", "identity", "pow:0.25", "pow:2"].iter().map(|s| s.parse().unwrap()).collect();

    print!("{:<18}", "");
    for p in &policies {
        print!("{:>10}", p.to_string());
    }
    println!();
    for (label, portfolio) in &portfolios {
        print!("{label:<18}");
        for p in &policies {
            print!("{:>10.4}", lq(&tree, portfolio, p).unwrap().score);
        }
        println!();
    }

    match "pow:-1".parse::<ExponentPolicy>() {
        Ok(p) => println!("unexpectedly accepted {p}"),
        Err(e) => println!("\nrejected: {e}"),
    }
}
