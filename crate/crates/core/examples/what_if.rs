//! What-if analysis and next-language suggestions for a learner.
//!
//!     cargo run --example what_if

use lq::measure::what_if;
use lq::{suggest_next, ExponentPolicy, Portfolio, TaxonomyTree};

fn main() {
    let tree = TaxonomyTree::from_json(lq::SAMPLE_TAXONOMY).unwrap();
    let policy = ExponentPolicy::SqrtRank;
    let learner = Portfolio::fluent(["Serbian", "Slovene"]);

    for (language, proficiency) in [("Croatian", 1.0), ("English", 1.0), ("English", 0.3), ("Chinese", 1.0)] {
        let (base, new) = what_if(&tree, &learner, language, proficiency, &policy).unwrap();
        println!("+ {language:<8} at {proficiency:.1}: {base:.4} -> {new:.4} (gain {:.4})", new - base);
    }

    println!("\nbest next languages:");
    for s in suggest_next(&tree, &learner, 3, &policy).unwrap() {
        println!("  {:<8} {:+.4}", s.language, s.gain);
    }
}
