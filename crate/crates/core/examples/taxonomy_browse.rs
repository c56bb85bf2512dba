//! Loads a taxonomy, lists its languages with their paths, and builds a small
//! tree in code.
//!
//!     cargo run --example taxonomy_browse [path/to/taxonomy.tax]

use lq::taxonomy::TaxonomyBuilder;
use lq::TaxonomyTree;

fn main() {
    let tree = match std::env::args().nth(1) {
        Some(path) => {
            let file = std::fs::File::open(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
            TaxonomyTree::load(file).unwrap_or_else(|e| panic!("{path}: {e}"))
        }
        None => TaxonomyTree::from_json(lq::SAMPLE_TAXONOMY).unwrap(),
    };
    println!("{} nodes, max depth {}", tree.len(), tree.max_depth());
    for entry in tree.list_languages(None) {
        println!("  {:<10} {}", entry.name, entry.path.join(" > "));
    }
    let serbian = tree.lookup("Serbian");
    if let Some(id) = serbian {
        let family = tree.family(id).map(|f| tree.name(f)).unwrap_or("-");
        println!("Serbian belongs to the {family} family");
    }

    let mut b = TaxonomyBuilder::new();
    b.node("root", None)
        .node("Romance", Some("root"))
        .node("Italian", Some("Romance"))
        .node("Spanish", Some("Romance"))
        .node("Basque", Some("root"));
    let small = b.build().unwrap();
    println!("\nbuilt in code:\n{}", serde_json::to_string_pretty(&small.to_document()).unwrap());

    let mut cyclic = TaxonomyBuilder::new();
    cyclic.node("root", None).node("a", Some("b")).node("b", Some("a"));
    println!("cycle rejected: {}", cyclic.build().unwrap_err());
}
