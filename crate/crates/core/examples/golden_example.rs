//! Scores the five-language portfolio from the bundled sample taxonomy and
//! prints the value at every node.
//!
//!     cargo run --example golden_example

use lq::{lq, ExponentPolicy, Portfolio, TaxonomyTree};

fn main() {
    let tree = TaxonomyTree::from_json(lq::SAMPLE_TAXONOMY).expect("sample taxonomy");
    let portfolio = Portfolio::fluent(["Serbian", "Slovene", "Croatian", "Chinese"]).with("English", 0.5);

    let breakdown = lq(&tree, &portfolio, &ExponentPolicy::SqrtRank).expect("known languages");
    println!("{:<22} {:>5} {:>8}", "node", "depth", "lambda");
    for row in breakdown.rows(&tree) {
        let indent = "  ".repeat(row.depth as usize);
        println!("{:<22} {:>5} {:>8.4}", format!("{indent}{}", row.node), row.depth, row.lambda);
    }
    println!("LQ = {:.4}", breakdown.score);
}
