//! Language classification trees and the portfolios evaluated over them.
//!
//! A [`TaxonomyTree`] is rooted at a synthetic "Tower of Babel" node at depth
//! 0. Its children are language families (depth 1), followed by groups,
//! subgroups and so on down to the languages themselves, which are exactly
//! the leaves. Leaves may sit at different depths.
//!
//! A [`Portfolio`] maps language names to proficiencies in `[0, 1]`. Against a
//! tree it induces a [`PortfolioSubtree`]: the root, every weighted leaf, and
//! every node on the paths between them.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::Read;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("malformed taxonomy document: {0}")]
    Parse(String),
    #[error("taxonomy document is empty")]
    Empty,
    #[error("node name must not be empty")]
    EmptyName,
    #[error("duplicate node name `{0}`")]
    DuplicateName(String),
    #[error("taxonomy has more than one root: `{0}` and `{1}`")]
    MultipleRoots(String, String),
    #[error("taxonomy has no root")]
    NoRoot,
    #[error("parent `{parent}` of node `{child}` does not exist")]
    UnknownParent { child: String, parent: String },
    #[error("cycle detected through node `{0}`")]
    Cycle(String),
    #[error("unknown language `{0}`")]
    UnknownLanguage(String),
    #[error("`{0}` is a language group, not a language")]
    NotALanguage(String),
    #[error("proficiency {proficiency} of `{language}` is outside [0, 1]")]
    ProficiencyOutOfRange { language: String, proficiency: f64 },
    #[error("portfolio was validated against a different taxonomy")]
    TaxonomyMismatch,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub(crate) u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Content fingerprint of a loaded tree. Two trees with the same structure
/// and names share a fingerprint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeId(pub u64);

#[derive(Debug, Clone)]
pub struct TaxonomyNode {
    pub id: NodeId,
    pub name: String,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Number of edges to the root; the layer rank.
    pub depth: u32,
}

impl TaxonomyNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// The on-disk taxonomy format: `{"name": ..., "children": [...]}`, nested.
/// Absent or empty `children` marks a language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyDocument {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TaxonomyDocument>,
}

impl TaxonomyDocument {
    pub fn leaf(name: impl Into<String>) -> Self {
        TaxonomyDocument { name: name.into(), children: Vec::new() }
    }

    pub fn node(name: impl Into<String>, children: Vec<TaxonomyDocument>) -> Self {
        TaxonomyDocument { name: name.into(), children }
    }
}

/// An immutable, validated language classification tree.
#[derive(Debug, Clone)]
pub struct TaxonomyTree {
    id: TreeId,
    root: NodeId,
    nodes: Vec<TaxonomyNode>,
    name_index: HashMap<String, NodeId>,
    max_depth: u32,
}

/// Collects `(name, parent)` records and assembles them into a tree,
/// rejecting duplicate names, orphans, cycles and multiple roots.
///
/// Children keep their insertion order.
#[derive(Debug, Default)]
pub struct TaxonomyBuilder {
    records: Vec<(String, Option<String>)>,
}

impl TaxonomyBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, name: impl Into<String>, parent: Option<&str>) -> &mut Self {
        self.records.push((name.into(), parent.map(str::to_owned)));
        self
    }

    pub fn build(self) -> Result<TaxonomyTree, TaxonomyError> {
        if self.records.is_empty() {
            return Err(TaxonomyError::Empty);
        }
        let mut name_index = HashMap::with_capacity(self.records.len());
        for (i, (name, _)) in self.records.iter().enumerate() {
            if name.trim().is_empty() {
                return Err(TaxonomyError::EmptyName);
            }
            if name_index.insert(name.clone(), NodeId(i as u32)).is_some() {
                return Err(TaxonomyError::DuplicateName(name.clone()));
            }
        }

        let mut root = None;
        let mut nodes: Vec<TaxonomyNode> = self
            .records
            .iter()
            .enumerate()
            .map(|(i, (name, _))| TaxonomyNode {
                id: NodeId(i as u32),
                name: name.clone(),
                parent: None,
                children: Vec::new(),
                depth: 0,
            })
            .collect();
        for (i, (name, parent)) in self.records.iter().enumerate() {
            match parent {
                None => match root {
                    None => root = Some(NodeId(i as u32)),
                    Some(NodeId(r)) => {
                        return Err(TaxonomyError::MultipleRoots(
                            self.records[r as usize].0.clone(),
                            name.clone(),
                        ))
                    }
                },
                Some(p) => {
                    let pid = *name_index.get(p).ok_or_else(|| TaxonomyError::UnknownParent {
                        child: name.clone(),
                        parent: p.clone(),
                    })?;
                    nodes[i].parent = Some(pid);
                    nodes[pid.index()].children.push(NodeId(i as u32));
                }
            }
        }
        let root = root.ok_or(TaxonomyError::NoRoot)?;

        // Depths by traversal from the root; anything not reached hangs off a cycle.
        let mut reached = vec![false; nodes.len()];
        let mut stack = vec![root];
        reached[root.index()] = true;
        let mut max_depth = 0;
        while let Some(id) = stack.pop() {
            let depth = nodes[id.index()].depth;
            max_depth = max_depth.max(depth);
            for k in 0..nodes[id.index()].children.len() {
                let child = nodes[id.index()].children[k];
                reached[child.index()] = true;
                nodes[child.index()].depth = depth + 1;
                stack.push(child);
            }
        }
        if let Some(i) = reached.iter().position(|r| !r) {
            return Err(TaxonomyError::Cycle(nodes[i].name.clone()));
        }

        let mut tree = TaxonomyTree { id: TreeId(0), root, nodes, name_index, max_depth };
        tree.id = tree.fingerprint();
        Ok(tree)
    }
}

impl TaxonomyTree {
    /// Reads and validates a taxonomy document.
    pub fn load<R: Read>(mut source: R) -> Result<Self, TaxonomyError> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, TaxonomyError> {
        if text.trim().is_empty() {
            return Err(TaxonomyError::Empty);
        }
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| TaxonomyError::Parse(e.to_string()))?;
        if let serde_json::Value::Array(roots) = &value {
            return match roots.as_slice() {
                [] => Err(TaxonomyError::Empty),
                [_] => Err(TaxonomyError::Parse("expected a single root object".into())),
                [a, b, ..] => Err(TaxonomyError::MultipleRoots(
                    a.get("name").and_then(|v| v.as_str()).unwrap_or("?").to_owned(),
                    b.get("name").and_then(|v| v.as_str()).unwrap_or("?").to_owned(),
                )),
            };
        }
        let doc: TaxonomyDocument =
            serde_json::from_value(value).map_err(|e| TaxonomyError::Parse(e.to_string()))?;
        Self::from_document(&doc)
    }

    pub fn from_document(doc: &TaxonomyDocument) -> Result<Self, TaxonomyError> {
        let mut builder = TaxonomyBuilder::new();
        // Pre-order with an explicit stack so sibling order survives.
        let mut stack: Vec<(&TaxonomyDocument, Option<&str>)> = vec![(doc, None)];
        while let Some((node, parent)) = stack.pop() {
            builder.node(node.name.as_str(), parent);
            for child in node.children.iter().rev() {
                stack.push((child, Some(node.name.as_str())));
            }
        }
        builder.build()
    }

    pub fn to_document(&self) -> TaxonomyDocument {
        fn build(tree: &TaxonomyTree, id: NodeId) -> TaxonomyDocument {
            let node = tree.node(id);
            TaxonomyDocument {
                name: node.name.clone(),
                children: node.children.iter().map(|&c| build(tree, c)).collect(),
            }
        }
        build(self, self.root)
    }

    /// A random tree for property checks: root `ToB`, nodes named `n<k>`,
    /// depth at most `spec.max_depth`, at most `spec.max_leaves` leaves.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, spec: &RandomTreeSpec) -> Self {
        let max_leaves = spec.max_leaves.max(1);
        let mut builder = TaxonomyBuilder::new();
        builder.node("ToB", None);
        let mut counter = 0usize;
        // (name, depth) of nodes not yet expanded
        let mut pending: std::collections::VecDeque<(String, u32)> =
            std::collections::VecDeque::from([("ToB".to_owned(), 0)]);
        let mut leaves = 0usize;
        while let Some((name, depth)) = pending.pop_front() {
            let can_expand = depth < spec.max_depth;
            let expand = can_expand && (depth == 0 || rng.random::<f64>() >= spec.leaf_probability);
            if !expand {
                leaves += 1;
                continue;
            }
            let room = max_leaves - leaves - pending.len();
            let wanted = rng.random_range(1..=spec.max_children.max(1));
            let count = wanted.min(room).max(1);
            for _ in 0..count {
                counter += 1;
                let child = format!("n{counter}");
                builder.node(child.clone(), Some(&name));
                pending.push_back((child, depth + 1));
            }
        }
        builder.build().expect("generated tree is valid by construction")
    }

    fn fingerprint(&self) -> TreeId {
        let mut hasher = DefaultHasher::new();
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            let node = self.node(id);
            node.name.hash(&mut hasher);
            node.children.len().hash(&mut hasher);
            stack.extend(node.children.iter().rev().copied());
        }
        TreeId(hasher.finish())
    }

    pub fn id(&self) -> TreeId {
        self.id
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &TaxonomyNode {
        &self.nodes[id.index()]
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = &TaxonomyNode> {
        self.nodes.iter()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn lookup(&self, name: &str) -> Option<NodeId> {
        self.name_index.get(name).copied()
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.nodes[id.index()].name
    }

    pub fn leaves(&self) -> impl Iterator<Item = &TaxonomyNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    /// Resolves a language name, failing unless it names a leaf.
    pub fn language(&self, name: &str) -> Result<NodeId, TaxonomyError> {
        let id = self.lookup(name).ok_or_else(|| TaxonomyError::UnknownLanguage(name.to_owned()))?;
        if !self.node(id).is_leaf() {
            return Err(TaxonomyError::NotALanguage(name.to_owned()));
        }
        Ok(id)
    }

    /// Ancestors of `id` from the root down to `id` itself.
    pub fn path(&self, id: NodeId) -> Vec<NodeId> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(p) = self.node(cur).parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// The depth-1 ancestor (language family) of `id`, or `None` for the root.
    pub fn family(&self, id: NodeId) -> Option<NodeId> {
        let mut cur = id;
        loop {
            let node = self.node(cur);
            match node.parent {
                None => return None,
                Some(_) if node.depth == 1 => return Some(cur),
                Some(p) => cur = p,
            }
        }
    }

    /// Languages whose name starts with `query` (case-insensitive), sorted by
    /// name, each with its root-to-leaf path of names.
    pub fn list_languages(&self, query: Option<&str>) -> Vec<LanguageEntry> {
        let prefix = query.map(str::to_lowercase).unwrap_or_default();
        let mut out: Vec<LanguageEntry> = self
            .leaves()
            .filter(|n| n.name.to_lowercase().starts_with(&prefix))
            .map(|n| LanguageEntry {
                name: n.name.clone(),
                path: self.path(n.id).into_iter().map(|id| self.name(id).to_owned()).collect(),
            })
            .collect();
        out.sort_by(|a, b| a.name.cmp(&b.name));
        out
    }

    /// Checks `portfolio` against this tree and returns a copy bound to it.
    pub fn validate(&self, portfolio: &Portfolio) -> Result<Portfolio, TaxonomyError> {
        if portfolio.bound.is_some_and(|b| b != self.id) {
            return Err(TaxonomyError::TaxonomyMismatch);
        }
        for (name, &proficiency) in &portfolio.languages {
            self.language(name)?;
            if !(0.0..=1.0).contains(&proficiency) {
                return Err(TaxonomyError::ProficiencyOutOfRange {
                    language: name.clone(),
                    proficiency,
                });
            }
        }
        Ok(Portfolio { languages: portfolio.languages.clone(), bound: Some(self.id) })
    }

    /// The root-anchored subtree spanned by the portfolio's languages.
    /// Zero-proficiency entries are dropped.
    pub fn induce_subtree(&self, portfolio: &Portfolio) -> Result<PortfolioSubtree, TaxonomyError> {
        self.validate(portfolio)?;
        let mut included = BTreeSet::from([self.root]);
        let mut leaf_weights = BTreeMap::new();
        for (name, &proficiency) in &portfolio.languages {
            if proficiency == 0.0 {
                continue;
            }
            let leaf = self.language(name)?;
            leaf_weights.insert(leaf, proficiency);
            let mut cur = Some(leaf);
            while let Some(id) = cur {
                if !included.insert(id) {
                    break;
                }
                cur = self.node(id).parent;
            }
        }
        Ok(PortfolioSubtree { tree_ref: self.id, included_nodes: included, leaf_weights })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RandomTreeSpec {
    pub max_depth: u32,
    pub max_leaves: usize,
    pub max_children: usize,
    /// Chance that a non-root node above `max_depth` stops as a language.
    pub leaf_probability: f64,
}

impl Default for RandomTreeSpec {
    fn default() -> Self {
        RandomTreeSpec { max_depth: 6, max_leaves: 200, max_children: 4, leaf_probability: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageEntry {
    pub name: String,
    pub path: Vec<String>,
}

/// Languages mapped to proficiencies in `[0, 1]`; file format
/// `{"languages": {"<name>": <proficiency>, ...}}`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Portfolio {
    pub languages: BTreeMap<String, f64>,
    #[serde(skip)]
    bound: Option<TreeId>,
}

impl PartialEq for Portfolio {
    fn eq(&self, other: &Self) -> bool {
        self.languages == other.languages
    }
}

impl Portfolio {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_json(text: &str) -> Result<Self, TaxonomyError> {
        serde_json::from_str(text).map_err(|e| TaxonomyError::Parse(e.to_string()))
    }

    /// Every language at proficiency 1.
    pub fn fluent<I, S>(languages: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        languages.into_iter().map(|l| (l, 1.0)).collect()
    }

    pub fn with(mut self, language: impl Into<String>, proficiency: f64) -> Self {
        self.languages.insert(language.into(), proficiency);
        self
    }

    pub fn get(&self, language: &str) -> Option<f64> {
        self.languages.get(language).copied()
    }

    pub fn len(&self) -> usize {
        self.languages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.languages.is_empty()
    }

    /// The taxonomy this portfolio was last validated against, if any.
    pub fn bound_to(&self) -> Option<TreeId> {
        self.bound
    }

    /// Pools two portfolios; a language present in both keeps the higher
    /// proficiency.
    pub fn union(&self, other: &Portfolio) -> Result<Portfolio, TaxonomyError> {
        let bound = match (self.bound, other.bound) {
            (Some(a), Some(b)) if a != b => return Err(TaxonomyError::TaxonomyMismatch),
            (a, b) => a.or(b),
        };
        let mut languages = self.languages.clone();
        for (name, &p) in &other.languages {
            languages.entry(name.clone()).and_modify(|q| *q = q.max(p)).or_insert(p);
        }
        Ok(Portfolio { languages, bound })
    }
}

impl<S: Into<String>> FromIterator<(S, f64)> for Portfolio {
    fn from_iter<T: IntoIterator<Item = (S, f64)>>(iter: T) -> Self {
        Portfolio {
            languages: iter.into_iter().map(|(k, v)| (k.into(), v)).collect(),
            bound: None,
        }
    }
}

impl fmt::Display for Portfolio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (name, p)) in self.languages.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}: {p}")?;
        }
        f.write_str("}")
    }
}

/// The portion of a tree covered by a portfolio. Closed under parents.
#[derive(Debug, Clone, PartialEq)]
pub struct PortfolioSubtree {
    pub tree_ref: TreeId,
    pub included_nodes: BTreeSet<NodeId>,
    pub leaf_weights: BTreeMap<NodeId, f64>,
}

impl PortfolioSubtree {
    pub fn contains(&self, id: NodeId) -> bool {
        self.included_nodes.contains(&id)
    }
}
