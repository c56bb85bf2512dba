//! Randomized axiom checks on the sample tree and on a generated tree, plus a
//! deliberately broken exponent that the checker catches.
//!
//!     cargo run --release --example axiom_check

use lq::axioms::check_axioms_with;
use lq::taxonomy::RandomTreeSpec;
use lq::{check_axioms, AxiomReport, ExponentPolicy, TaxonomyTree};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn print(label: &str, report: &AxiomReport) {
    println!("{label} ({} trials, seed {})", report.trials, report.seed);
    for o in &report.outcomes {
        let status = if o.passed() { "pass" } else { "FAIL" };
        println!("  {:<4} {:<28} {status} ({} checks)", o.axiom.tag(), o.axiom.title(), o.checks);
        if let Some(cx) = &o.counterexample {
            println!("       {}: {:.4} vs {:.4}", cx.relation, cx.lhs, cx.rhs);
            for p in &cx.portfolios {
                println!("       {p}");
            }
        }
    }
}

fn main() {
    let sample = TaxonomyTree::from_json(lq::SAMPLE_TAXONOMY).unwrap();
    print("sample, sqrt", &check_axioms(&sample, &ExponentPolicy::SqrtRank, 1000, 42).unwrap());

    // first seeded tree with a few dozen languages
    let random = (0..)
        .map(|seed| TaxonomyTree::random(&mut ChaCha8Rng::seed_from_u64(seed), &RandomTreeSpec::default()))
        .find(|t| t.leaves().count() >= 30)
        .unwrap();
    println!("\nrandom tree: {} nodes, {} languages, depth {}", random.len(), random.leaves().count(), random.max_depth());
    print("random, identity", &check_axioms(&random, &ExponentPolicy::IdentityRank, 1000, 42).unwrap());

    // order below 1 at the leaf layer turns the norm into a quasi-norm
    let broken = |r: u32| if r >= 3 { 0.5 } else { 1.0 };
    println!();
    print("sample, broken exponent", &check_axioms_with(&sample, &broken, 1000, 42));
}
