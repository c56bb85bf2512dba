//! Working-language bundle selection.
//!
//! Given a population of portfolios and a set of candidate languages, pick
//! `k` candidates that the population can adopt most cheaply. A member's cost
//! for bundle `B` is, by default, the score increase from learning all of `B`
//! fluently: `lq(Π ∪ B) − lq(Π)`. The raw objective `lq(Π ∪ B)` is available
//! through [`Objective::Aggregate`].
//!
//! Problems with at most [`EXHAUSTIVE_LIMIT`] bundles are solved exactly;
//! larger ones fall back to greedy forward selection.

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::{lq, ExponentPolicy, MeasureError, TOLERANCE};
use crate::taxonomy::{Portfolio, TaxonomyTree};

pub const EXHAUSTIVE_LIMIT: u128 = 100_000;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("population is empty")]
    EmptyPopulation,
    #[error("bundle size must be positive")]
    ZeroBundle,
    #[error("bundle size {k} exceeds the {candidates} candidates")]
    BundleTooLarge { k: usize, candidates: usize },
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `lq(Π ∪ B) − lq(Π)` per member.
    #[default]
    Marginal,
    /// `lq(Π ∪ B)` per member.
    Aggregate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    Greedy,
}

/// File format: `{"population": [...], "candidates": [...], "k": <int>}`,
/// with optional `policy` and `objective`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleProblem {
    pub population: Vec<Portfolio>,
    pub candidates: Vec<String>,
    #[serde(rename = "k")]
    pub bundle_size: usize,
    #[serde(default)]
    pub policy: ExponentPolicy,
    #[serde(default)]
    pub objective: Objective,
}

impl BundleProblem {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleSolution {
    pub bundle: Vec<String>,
    pub total_cost: f64,
    pub per_member_cost: Vec<f64>,
    pub method: Method,
}

/// Member costs of one bundle against a prepared population.
pub struct CostModel<'a> {
    tree: &'a TaxonomyTree,
    population: Vec<Portfolio>,
    base_scores: Vec<f64>,
    policy: ExponentPolicy,
    objective: Objective,
}

impl<'a> CostModel<'a> {
    pub fn new(tree: &'a TaxonomyTree, problem: &BundleProblem) -> Result<Self, MeasureError> {
        let population = problem
            .population
            .iter()
            .map(|p| tree.validate(p))
            .collect::<Result<Vec<_>, _>>()?;
        let base_scores = population
            .iter()
            .map(|p| lq(tree, p, &problem.policy).map(|b| b.score))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CostModel { tree, population, base_scores, policy: problem.policy, objective: problem.objective })
    }

    pub fn member_costs(&self, bundle: &[&str]) -> Result<Vec<f64>, MeasureError> {
        let learned = Portfolio::fluent(bundle.iter().copied());
        self.population
            .iter()
            .zip(&self.base_scores)
            .map(|(member, &base)| {
                let after = lq(self.tree, &member.union(&learned)?, &self.policy)?.score;
                Ok(match self.objective {
                    Objective::Marginal => (after - base).max(0.0),
                    Objective::Aggregate => after,
                })
            })
            .collect()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k) as u128;
    let n = n as u128;
    (0..k).fold(1u128, |acc, i| {
        // exact at every step; saturate once past any limit we care about
        (acc.saturating_mul(n - i) / (i + 1)).min(u128::MAX / 2)
    })
}

/// Strictly better by more than the score tolerance.
fn improves(candidate: f64, incumbent: f64) -> bool {
    candidate < incumbent - TOLERANCE * incumbent.abs().max(1.0)
}

/// Checks the problem and returns its sorted, de-duplicated candidates.
fn prepare<'p>(tree: &TaxonomyTree, problem: &'p BundleProblem) -> Result<Vec<&'p str>, OptimizeError> {
    if problem.population.is_empty() {
        return Err(OptimizeError::EmptyPopulation);
    }
    problem.policy.validate()?;
    let candidates: Vec<&str> =
        problem.candidates.iter().map(String::as_str).sorted().dedup().collect();
    for c in &candidates {
        tree.language(c).map_err(MeasureError::from)?;
    }
    match problem.bundle_size {
        0 => Err(OptimizeError::ZeroBundle),
        k if k > candidates.len() => {
            Err(OptimizeError::BundleTooLarge { k, candidates: candidates.len() })
        }
        _ => Ok(candidates),
    }
}

pub fn optimize_bundle(
    tree: &TaxonomyTree,
    problem: &BundleProblem,
) -> Result<BundleSolution, OptimizeError> {
    let candidates = prepare(tree, problem)?;
    let model = CostModel::new(tree, problem)?;
    let k = problem.bundle_size;
    if binomial(candidates.len(), k) <= EXHAUSTIVE_LIMIT {
        exhaustive(&model, &candidates, k)
    } else {
        greedy(&model, &candidates, k)
    }
}

/// Greedy forward selection regardless of problem size.
pub fn optimize_bundle_greedy(
    tree: &TaxonomyTree,
    problem: &BundleProblem,
) -> Result<BundleSolution, OptimizeError> {
    let candidates = prepare(tree, problem)?;
    greedy(&CostModel::new(tree, problem)?, &candidates, problem.bundle_size)
}

fn exhaustive(model: &CostModel<'_>, candidates: &[&str], k: usize) -> Result<BundleSolution, OptimizeError> {
    // Lexicographic order, so keeping the first of equal costs breaks ties by bundle.
    let bundles: Vec<Vec<&str>> = candidates.iter().copied().combinations(k).collect();
    let costs: Vec<Vec<f64>> = bundles
        .par_iter()
        .map(|b| model.member_costs(b))
        .collect::<Result<_, _>>()?;
    let mut best = 0;
    let mut best_total: f64 = costs[0].iter().sum();
    for (i, c) in costs.iter().enumerate().skip(1) {
        let total: f64 = c.iter().sum();
        if improves(total, best_total) {
            best = i;
            best_total = total;
        }
    }
    Ok(BundleSolution {
        bundle: bundles[best].iter().map(|s| s.to_string()).collect(),
        total_cost: best_total,
        per_member_cost: costs[best].clone(),
        method: Method::Exhaustive,
    })
}

fn greedy(model: &CostModel<'_>, candidates: &[&str], k: usize) -> Result<BundleSolution, OptimizeError> {
    let mut chosen: Vec<&str> = Vec::with_capacity(k);
    let mut chosen_costs = Vec::new();
    for _ in 0..k {
        let options: Vec<(&str, Vec<f64>)> = candidates
            .par_iter()
            .filter(|c| !chosen.contains(c))
            .map(|&c| {
                let mut trial = chosen.clone();
                trial.push(c);
                model.member_costs(&trial).map(|costs| (c, costs))
            })
            .collect::<Result<_, _>>()?;
        let mut pick = 0;
        let mut pick_total: f64 = options[0].1.iter().sum();
        for (i, (_, c)) in options.iter().enumerate().skip(1) {
            let total: f64 = c.iter().sum();
            if improves(total, pick_total) {
                pick = i;
                pick_total = total;
            }
        }
        let (name, costs) = options.into_iter().nth(pick).unwrap();
        chosen.push(name);
        chosen_costs = costs;
    }
    chosen.sort_unstable();
    Ok(BundleSolution {
        bundle: chosen.iter().map(|s| s.to_string()).collect(),
        total_cost: chosen_costs.iter().sum(),
        per_member_cost: chosen_costs,
        method: Method::Greedy,
    })
}
