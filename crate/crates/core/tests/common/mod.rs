#![allow(dead_code)]

use std::collections::BTreeMap;

use lq::taxonomy::{RandomTreeSpec, TaxonomyDocument};
use lq::{Portfolio, TaxonomyTree};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn sample() -> TaxonomyTree {
    TaxonomyTree::from_json(lq::SAMPLE_TAXONOMY).unwrap()
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

pub fn data_path(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// Straight evaluation of the layered norm on the nested document: no node
/// ids, no induced subtree, no scaling. Returns per-node values by name.
pub fn oracle(
    doc: &TaxonomyDocument,
    weights: &BTreeMap<String, f64>,
    f: &dyn Fn(u32) -> f64,
) -> (f64, BTreeMap<String, f64>) {
    fn eval(
        doc: &TaxonomyDocument,
        depth: u32,
        weights: &BTreeMap<String, f64>,
        f: &dyn Fn(u32) -> f64,
        out: &mut BTreeMap<String, f64>,
    ) -> Option<f64> {
        let value = if doc.children.is_empty() {
            weights.get(&doc.name).copied().filter(|&w| w > 0.0)?
        } else {
            let p = f(depth + 1);
            let parts: Vec<f64> =
                doc.children.iter().filter_map(|c| eval(c, depth + 1, weights, f, out)).collect();
            if parts.is_empty() {
                return None;
            }
            parts.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p)
        };
        out.insert(doc.name.clone(), value);
        Some(value)
    }
    let mut out = BTreeMap::new();
    let score = eval(doc, 0, weights, f, &mut out).unwrap_or(0.0);
    (score, out)
}

pub fn sqrt_rank(r: u32) -> f64 {
    f64::from(r).sqrt()
}

pub fn identity_rank(r: u32) -> f64 {
    f64::from(r)
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

pub fn random_tree(seed: u64) -> TaxonomyTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spec = RandomTreeSpec {
        max_depth: rng.random_range(1..=6),
        max_leaves: rng.random_range(1..=200),
        max_children: rng.random_range(1..=6),
        leaf_probability: rng.random_range(0.0..0.5),
    };
    TaxonomyTree::random(&mut rng, &spec)
}

/// Random weighted portfolio; `fluent` forces every proficiency to 1.
pub fn random_portfolio<R: Rng>(rng: &mut R, tree: &TaxonomyTree, fluent: bool) -> Portfolio {
    let leaves: Vec<&str> = tree.leaves().map(|l| l.name.as_str()).collect();
    let n = rng.random_range(0..=leaves.len().min(15));
    leaves
        .choose_multiple(rng, n)
        .map(|&name| (name, if fluent { 1.0 } else { rng.random_range(0.0..=1.0) }))
        .collect()
}

/// Starts the service on an ephemeral port; returns its base URL and a
/// sender that stops it.
pub async fn spawn_service() -> (String, tokio::sync::oneshot::Sender<()>) {
    use std::sync::Arc;
    let state = lq::api::AppState { tree: sample(), default_policy: lq::ExponentPolicy::SqrtRank };
    let app = lq::api::app(Arc::new(state), &[]).unwrap();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let (tx, rx) = tokio::sync::oneshot::channel();
    tokio::spawn(lq::api::serve_on(listener, app, async {
        let _ = rx.await;
    }));
    (format!("http://{addr}"), tx)
}
