//! Bottom-up LQ aggregation.
//!
//! Every language of the induced subtree starts at its proficiency. Moving up
//! one layer at a time, a node `v` combines its included children `c`, which
//! sit at depth `r = depth(v) + 1`, with the Minkowski norm of order `f(r)`:
//!
//! ```text
//! λ_v = (Σ_c λ_c^f(r))^(1/f(r))
//! ```
//!
//! `f(1) = 1`, so language families add up linearly at the root. The value at
//! the root is the score.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::taxonomy::{NodeId, Portfolio, PortfolioSubtree, TaxonomyError, TaxonomyTree};

/// Deepest tree the recursive evaluator will walk.
pub const MAX_RECURSION_DEPTH: u32 = 10_000;

/// Relative tolerance used for every equality on scores.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error(transparent)]
    Taxonomy(#[from] TaxonomyError),
    #[error("invalid exponent policy: {0}")]
    InvalidPolicy(String),
    #[error("tree depth {0} exceeds the recursion limit of {MAX_RECURSION_DEPTH}")]
    TooDeep(u32),
}

/// Order of the norm applied to children at a given layer rank.
pub trait Exponent {
    fn exponent(&self, rank: u32) -> f64;
}

impl<F: Fn(u32) -> f64> Exponent for F {
    fn exponent(&self, rank: u32) -> f64 {
        self(rank)
    }
}

/// Rank-dependent norm order `f(r)`. All variants satisfy `f(1) = 1` and are
/// non-decreasing in `r`, so every aggregation step is a norm of order ≥ 1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum ExponentPolicy {
    /// `f(r) = √r`
    #[default]
    SqrtRank,
    /// `f(r) = r`
    IdentityRank,
    /// `f(r) = r^a`, `a > 0`
    PowerRank(f64),
}

impl ExponentPolicy {
    pub fn validate(&self) -> Result<(), MeasureError> {
        match *self {
            ExponentPolicy::PowerRank(a) if !(a.is_finite() && a > 0.0) => {
                Err(MeasureError::InvalidPolicy(format!("power exponent must be > 0, got {a}")))
            }
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, rank: u32) -> f64 {
        let r = f64::from(rank);
        match *self {
            ExponentPolicy::SqrtRank => r.sqrt(),
            ExponentPolicy::IdentityRank => r,
            ExponentPolicy::PowerRank(a) => r.powf(a),
        }
    }
}

impl Exponent for ExponentPolicy {
    fn exponent(&self, rank: u32) -> f64 {
        self.evaluate(rank)
    }
}

impl fmt::Display for ExponentPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExponentPolicy::SqrtRank => f.write_str("sqrt"),
            ExponentPolicy::IdentityRank => f.write_str("identity"),
            ExponentPolicy::PowerRank(a) => write!(f, "pow:{a}"),
        }
    }
}

impl FromStr for ExponentPolicy {
    type Err = MeasureError;

    /// Accepts `sqrt`, `identity` or `pow:<a>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let policy = match s.trim() {
            "sqrt" | "sqrt_rank" => ExponentPolicy::SqrtRank,
            "identity" | "identity_rank" => ExponentPolicy::IdentityRank,
            other => {
                let a = other
                    .strip_prefix("pow:")
                    .and_then(|a| a.parse::<f64>().ok())
                    .ok_or_else(|| MeasureError::InvalidPolicy(format!("unknown policy `{other}`")))?;
                ExponentPolicy::PowerRank(a)
            }
        };
        policy.validate()?;
        Ok(policy)
    }
}

impl TryFrom<String> for ExponentPolicy {
    type Error = MeasureError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ExponentPolicy> for String {
    fn from(p: ExponentPolicy) -> String {
        p.to_string()
    }
}

/// Per-node λ values of one evaluation, keyed by node, plus the root score.
#[derive(Debug, Clone, PartialEq)]
pub struct LqBreakdown {
    pub node_values: BTreeMap<NodeId, f64>,
    pub score: f64,
    pub policy: ExponentPolicy,
}

/// One line of a rendered breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRow {
    pub node: String,
    pub depth: u32,
    pub lambda: f64,
}

impl LqBreakdown {
    pub fn value(&self, tree: &TaxonomyTree, name: &str) -> Option<f64> {
        self.node_values.get(&tree.lookup(name)?).copied()
    }

    /// Depth-first from the root with siblings sorted by name.
    pub fn rows(&self, tree: &TaxonomyTree) -> Vec<BreakdownRow> {
        let mut rows = Vec::with_capacity(self.node_values.len());
        let mut stack = vec![tree.root()];
        while let Some(id) = stack.pop() {
            let Some(&lambda) = self.node_values.get(&id) else { continue };
            let node = tree.node(id);
            rows.push(BreakdownRow { node: node.name.clone(), depth: node.depth, lambda });
            let mut children: Vec<NodeId> =
                node.children.iter().copied().filter(|c| self.node_values.contains_key(c)).collect();
            children.sort_by(|a, b| tree.name(*b).cmp(tree.name(*a)));
            stack.extend(children);
        }
        rows
    }
}

/// `(Σ x^p)^(1/p)` for non-negative `x` and `p > 0`; `p = 1` is a plain sum.
/// Values are scaled by their maximum so large orders do not overflow.
pub(crate) fn minkowski_norm(values: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        return values.iter().sum();
    }
    let max = values.iter().copied().fold(0.0_f64, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let sum: f64 = values.iter().map(|&x| (x / max).powf(p)).sum();
    max * sum.powf(1.0 / p)
}

/// Compares two scores with [`TOLERANCE`] relative to their magnitude (at least 1).
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// `a <= b` up to [`TOLERANCE`].
pub fn approx_le(a: f64, b: f64) -> bool {
    a <= b + TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// LQ score of a portfolio, computed layer by layer from the deepest rank up.
pub fn lq(
    tree: &TaxonomyTree,
    portfolio: &Portfolio,
    policy: &ExponentPolicy,
) -> Result<LqBreakdown, MeasureError> {
    policy.validate()?;
    let subtree = tree.induce_subtree(portfolio)?;
    let (node_values, score) = aggregate_layers(tree, &subtree, policy);
    Ok(LqBreakdown { node_values, score, policy: *policy })
}

/// Same contract as [`lq`], computed by depth-first recursion from the root.
pub fn lq_recursive(
    tree: &TaxonomyTree,
    portfolio: &Portfolio,
    policy: &ExponentPolicy,
) -> Result<LqBreakdown, MeasureError> {
    policy.validate()?;
    let subtree = tree.induce_subtree(portfolio)?;
    let (node_values, score) = aggregate_recursive(tree, &subtree, policy)?;
    Ok(LqBreakdown { node_values, score, policy: *policy })
}

/// Iterative aggregation for any exponent, without policy validation.
pub fn aggregate_layers<E: Exponent + ?Sized>(
    tree: &TaxonomyTree,
    subtree: &PortfolioSubtree,
    exponent: &E,
) -> (BTreeMap<NodeId, f64>, f64) {
    let mut layers: Vec<Vec<NodeId>> = vec![Vec::new(); tree.max_depth() as usize + 1];
    for &id in &subtree.included_nodes {
        layers[tree.node(id).depth as usize].push(id);
    }
    let mut values = vec![f64::NAN; tree.len()];
    let mut scratch = Vec::new();
    for (depth, layer) in layers.iter().enumerate().rev() {
        let order = exponent.exponent(depth as u32 + 1);
        for &id in layer {
            values[id.index()] = match subtree.leaf_weights.get(&id) {
                Some(&w) => w,
                None => {
                    scratch.clear();
                    scratch.extend(
                        tree.node(id)
                            .children
                            .iter()
                            .filter(|c| subtree.contains(**c))
                            .map(|c| values[c.index()]),
                    );
                    minkowski_norm(&scratch, order)
                }
            };
        }
    }
    let node_values: BTreeMap<NodeId, f64> =
        subtree.included_nodes.iter().map(|&id| (id, values[id.index()])).collect();
    let score = node_values[&tree.root()];
    (node_values, score)
}

/// Recursive aggregation for any exponent, without policy validation.
pub fn aggregate_recursive<E: Exponent + ?Sized>(
    tree: &TaxonomyTree,
    subtree: &PortfolioSubtree,
    exponent: &E,
) -> Result<(BTreeMap<NodeId, f64>, f64), MeasureError> {
    if tree.max_depth() > MAX_RECURSION_DEPTH {
        return Err(MeasureError::TooDeep(tree.max_depth()));
    }

    fn visit<E: Exponent + ?Sized>(
        tree: &TaxonomyTree,
        subtree: &PortfolioSubtree,
        exponent: &E,
        id: NodeId,
        out: &mut BTreeMap<NodeId, f64>,
    ) -> f64 {
        let value = match subtree.leaf_weights.get(&id) {
            Some(&w) => w,
            None => {
                let node = tree.node(id);
                let children: Vec<f64> = node
                    .children
                    .iter()
                    .filter(|c| subtree.contains(**c))
                    .map(|&c| visit(tree, subtree, exponent, c, out))
                    .collect();
                minkowski_norm(&children, exponent.exponent(node.depth + 1))
            }
        };
        out.insert(id, value);
        value
    }

    let mut node_values = BTreeMap::new();
    let score = visit(tree, subtree, exponent, tree.root(), &mut node_values);
    Ok((node_values, score))
}

/// Score of `portfolio` under an arbitrary exponent. Used to probe the
/// axioms with exponents outside [`ExponentPolicy`].
pub fn score_with<E: Exponent + ?Sized>(
    tree: &TaxonomyTree,
    portfolio: &Portfolio,
    exponent: &E,
) -> Result<f64, MeasureError> {
    let subtree = tree.induce_subtree(portfolio)?;
    Ok(aggregate_layers(tree, &subtree, exponent).1)
}

/// How much the score rises when `language` is added at `proficiency`.
/// A language already held at that level or better gains nothing.
pub fn marginal_gain(
    tree: &TaxonomyTree,
    portfolio: &Portfolio,
    language: &str,
    proficiency: f64,
    policy: &ExponentPolicy,
) -> Result<f64, MeasureError> {
    let (base, new) = what_if(tree, portfolio, language, proficiency, policy)?;
    Ok(new - base)
}

/// Scores before and after adding `language` at `proficiency`.
pub fn what_if(
    tree: &TaxonomyTree,
    portfolio: &Portfolio,
    language: &str,
    proficiency: f64,
    policy: &ExponentPolicy,
) -> Result<(f64, f64), MeasureError> {
    tree.language(language)?;
    let base = lq(tree, portfolio, policy)?.score;
    let extended = portfolio.union(&Portfolio::new().with(language, proficiency))?;
    let new = lq(tree, &extended, policy)?.score;
    Ok((base, new))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub language: String,
    pub gain: f64,
}

/// The `top_k` languages not yet in the portfolio whose fluent addition
/// raises the score most. Ties go to the alphabetically first name.
pub fn suggest_next(
    tree: &TaxonomyTree,
    portfolio: &Portfolio,
    top_k: usize,
    policy: &ExponentPolicy,
) -> Result<Vec<Suggestion>, MeasureError> {
    let base = lq(tree, portfolio, policy)?.score;
    let mut out = Vec::new();
    for leaf in tree.leaves() {
        if portfolio.get(&leaf.name).is_some_and(|p| p > 0.0) {
            continue;
        }
        let extended = portfolio.union(&Portfolio::new().with(leaf.name.clone(), 1.0))?;
        let gain = lq(tree, &extended, policy)?.score - base;
        out.push(Suggestion { language: leaf.name.clone(), gain });
    }
    out.sort_by(|a, b| b.gain.total_cmp(&a.gain).then_with(|| a.language.cmp(&b.language)));
    out.truncate(top_k);
    Ok(out)
}
