//! Union of two portfolios and the subadditivity it obeys.
//!
//!     cargo run --example portfolio_union

use lq::{lq, ExponentPolicy, Portfolio, TaxonomyTree};

fn main() {
    let tree = TaxonomyTree::from_json(lq::SAMPLE_TAXONOMY).unwrap();
    let policy = ExponentPolicy::SqrtRank;
    let score = |p: &Portfolio| lq(&tree, p, &policy).unwrap().score;

    let pi = Portfolio::fluent(["Chinese", "Serbian"]);
    let phi = Portfolio::fluent(["English", "Slovene"]).with("Serbian", 0.4);
    // proficiencies combine by taking the higher one
    let psi = pi.union(&phi).unwrap();

    println!("Pi       {pi}  -> {:.4}", score(&pi));
    println!("Phi      {phi}  -> {:.4}", score(&phi));
    println!("Pi | Phi {psi}  -> {:.4}", score(&psi));
    println!("sum of parts     -> {:.4}", score(&pi) + score(&phi));
    assert!(score(&psi) <= score(&pi) + score(&phi) + 1e-9);

    let subtree = tree.induce_subtree(&psi).unwrap();
    let nodes: Vec<&str> = subtree.included_nodes.iter().map(|&id| tree.name(id)).collect();
    println!("induced subtree: {}", nodes.join(", "));
}
