//! Effective number of languages (LQ) of a weighted language portfolio.
//!
//! Languages live as leaves of a classification tree rooted at a synthetic
//! "Tower of Babel" node. A portfolio's score is built bottom-up: each node
//! combines its children's values with a Minkowski norm whose order grows with
//! the layer rank, so related languages overlap and unrelated families add up.
//!
//! ```
//! use lq::{lq, ExponentPolicy, Portfolio, TaxonomyTree};
//!
//! let tree = TaxonomyTree::from_json(lq::SAMPLE_TAXONOMY).unwrap();
//! let portfolio = Portfolio::fluent(["Serbian", "Chinese"]);
//! let score = lq(&tree, &portfolio, &ExponentPolicy::SqrtRank).unwrap().score;
//! assert!((score - 2.0).abs() < 1e-9);
//! ```
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod api;
pub mod axioms;
pub mod cli;
pub mod matrix;
pub mod measure;
pub mod optimize;
pub mod taxonomy;

pub use axioms::{check_axioms, Axiom, AxiomReport};
pub use matrix::{matrix_lq, PairCorrelation};
pub use measure::{
    lq, lq_recursive, marginal_gain, suggest_next, ExponentPolicy, LqBreakdown, MeasureError,
};
pub use optimize::{optimize_bundle, BundleProblem, BundleSolution};
pub use taxonomy::{Portfolio, PortfolioSubtree, TaxonomyError, TaxonomyTree};

/// The bundled five-language sample taxonomy.
pub const SAMPLE_TAXONOMY: &str = include_str!("../data/sample.tax");

/// Rounds to the four decimals scores are reported with.
pub fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}
