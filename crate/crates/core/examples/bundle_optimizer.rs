//! Picks the bundle of languages a population should learn together, first on
//! a small problem solved exhaustively and then on a larger one solved greedily.
//!
//!     cargo run --release --example bundle_optimizer

use lq::optimize::{optimize_bundle, Objective};
use lq::taxonomy::RandomTreeSpec;
use lq::{BundleProblem, ExponentPolicy, Portfolio, TaxonomyTree};
use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let tree = TaxonomyTree::from_json(lq::SAMPLE_TAXONOMY).unwrap();
    let text = include_str!("../data/bundle.problem");
    let mut problem = BundleProblem::from_json(text).unwrap();
    for objective in [Objective::Marginal, Objective::Aggregate] {
        problem.objective = objective;
        let s = optimize_bundle(&tree, &problem).unwrap();
        println!("{objective:?}: {:?} cost {:.4} per member {:?} ({:?})", s.bundle, s.total_cost, s.per_member_cost, s.method);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let big = TaxonomyTree::random(&mut rng, &RandomTreeSpec { max_leaves: 120, ..Default::default() });
    let names: Vec<String> = big.leaves().map(|l| l.name.clone()).collect();
    let population = (0..20)
        .map(|_| Portfolio::fluent(names.choose_multiple(&mut rng, 3).cloned()))
        .collect();
    let problem = BundleProblem {
        population,
        candidates: names.iter().take(40).cloned().collect(),
        bundle_size: 5,
        policy: ExponentPolicy::SqrtRank,
        objective: Objective::Marginal,
    };
    let s = optimize_bundle(&big, &problem).unwrap();
    println!("\n{} candidates, k = 5: {:?} cost {:.4} ({:?})", problem.candidates.len(), s.bundle, s.total_cost, s.method);
}
