//! Randomized verification of the coherence axioms.
//!
//! The checker samples portfolio pairs from a seeded generator and tests each
//! property on them, recording the first violation it finds. Failures are
//! data: a report with a counterexample, never an error.
//!
//! | tag | property |
//! |-----|----------|
//! | E   | a single fluent language scores 1 |
//! | S   | `lq(Π ∪ Φ) ≤ lq(Π) + lq(Φ)` |
//! | ND  | re-adding a held language at the same level changes nothing |
//! | I   | a language from an unrepresented family adds exactly its own score |
//! | PH  | `lq({l@c}) = c · lq({l@1})` |
//! | SW  | adding a fluent language adds between 0 and 1 |
//! | MON | raising one proficiency never lowers the score |
//! | RNG | `N` fluent languages score in `[1, N]`, weighted ones in `[0, N]` |

use std::fmt;

use rand::seq::{IndexedRandom, IteratorRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::measure::{approx_eq, approx_le, score_with, Exponent, ExponentPolicy, MeasureError};
use crate::taxonomy::{Portfolio, TaxonomyTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axiom {
    Equivalence,
    Subadditivity,
    NoDoubleCounting,
    Independence,
    PositiveHomogeneity,
    Sandwich,
    Monotonicity,
    Range,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::Equivalence,
        Axiom::Subadditivity,
        Axiom::NoDoubleCounting,
        Axiom::Independence,
        Axiom::PositiveHomogeneity,
        Axiom::Sandwich,
        Axiom::Monotonicity,
        Axiom::Range,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Axiom::Equivalence => "E",
            Axiom::Subadditivity => "S",
            Axiom::NoDoubleCounting => "ND",
            Axiom::Independence => "I",
            Axiom::PositiveHomogeneity => "PH",
            Axiom::Sandwich => "SW",
            Axiom::Monotonicity => "MON",
            Axiom::Range => "RNG",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Axiom::Equivalence => "equivalence",
            Axiom::Subadditivity => "subadditivity",
            Axiom::NoDoubleCounting => "no double-counting",
            Axiom::Independence => "independence",
            Axiom::PositiveHomogeneity => "positive homogeneity",
            Axiom::Sandwich => "sandwich inequality",
            Axiom::Monotonicity => "monotonicity",
            Axiom::Range => "range",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub portfolios: Vec<Portfolio>,
    /// Human-readable statement of the failed relation.
    pub relation: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    pub checks: usize,
    pub counterexample: Option<Counterexample>,
}

impl AxiomOutcome {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub trials: usize,
    pub seed: u64,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(AxiomOutcome::passed)
    }

    pub fn outcome(&self, axiom: Axiom) -> &AxiomOutcome {
        self.outcomes.iter().find(|o| o.axiom == axiom).expect("every axiom is reported")
    }

    pub fn first_failure(&self) -> Option<&AxiomOutcome> {
        self.outcomes.iter().find(|o| !o.passed())
    }
}

/// Runs `trials` randomized rounds of every property against `tree`.
pub fn check_axioms(
    tree: &TaxonomyTree,
    policy: &ExponentPolicy,
    trials: usize,
    seed: u64,
) -> Result<AxiomReport, MeasureError> {
    policy.validate()?;
    Ok(check_axioms_with(tree, policy, trials, seed))
}

/// [`check_axioms`] for an arbitrary, unvalidated exponent.
pub fn check_axioms_with<E: Exponent + ?Sized>(
    tree: &TaxonomyTree,
    exponent: &E,
    trials: usize,
    seed: u64,
) -> AxiomReport {
    let mut checker = Checker::new(tree, exponent);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for leaf in tree.leaves() {
        checker.equivalence(&leaf.name);
    }
    for _ in 0..trials.max(1) {
        let pi = sample_portfolio(&mut rng, tree);
        let phi = sample_portfolio(&mut rng, tree);
        checker.trial(&mut rng, &pi, &phi);
    }

    AxiomReport { trials: trials.max(1), seed, outcomes: checker.outcomes }
}

/// A random subset of the tree's languages. Roughly half the draws are all
/// fluent; the rest mix fluent entries with random levels in `(0, 1]`.
pub fn sample_portfolio<R: Rng + ?Sized>(rng: &mut R, tree: &TaxonomyTree) -> Portfolio {
    let leaves: Vec<&str> = tree.leaves().map(|l| l.name.as_str()).collect();
    let size = rng.random_range(0..=leaves.len().min(12));
    let fluent = rng.random_bool(0.5);
    leaves
        .choose_multiple(rng, size)
        .map(|&name| {
            let p = if fluent || rng.random_bool(0.3) { 1.0 } else { 1.0 - rng.random::<f64>() };
            (name, p)
        })
        .collect()
}

struct Checker<'a, E: ?Sized> {
    tree: &'a TaxonomyTree,
    exponent: &'a E,
    outcomes: Vec<AxiomOutcome>,
}

impl<'a, E: Exponent + ?Sized> Checker<'a, E> {
    fn new(tree: &'a TaxonomyTree, exponent: &'a E) -> Self {
        let outcomes = Axiom::ALL
            .iter()
            .map(|&axiom| AxiomOutcome { axiom, checks: 0, counterexample: None })
            .collect();
        Checker { tree, exponent, outcomes }
    }

    fn score(&self, p: &Portfolio) -> f64 {
        score_with(self.tree, p, self.exponent).expect("sampled portfolios are valid")
    }

    fn record(&mut self, axiom: Axiom, holds: bool, failure: impl FnOnce() -> Counterexample) {
        let outcome = &mut self.outcomes[Axiom::ALL.iter().position(|a| *a == axiom).unwrap()];
        outcome.checks += 1;
        if !holds && outcome.counterexample.is_none() {
            outcome.counterexample = Some(failure());
        }
    }

    fn equivalence(&mut self, language: &str) {
        let p = Portfolio::fluent([language]);
        let s = self.score(&p);
        self.record(Axiom::Equivalence, approx_eq(s, 1.0), || Counterexample {
            relation: format!("lq({{{language}}}) = 1"),
            portfolios: vec![p.clone()],
            lhs: s,
            rhs: 1.0,
        });
    }

    fn trial<R: Rng + ?Sized>(&mut self, rng: &mut R, pi: &Portfolio, phi: &Portfolio) {
        let tree = self.tree;
        let language = tree.leaves().choose(rng).expect("trees have leaves").name.clone();
        self.equivalence(&language);

        // S
        let union = pi.union(phi).expect("unbound portfolios");
        let (l_union, l_pi, l_phi) = (self.score(&union), self.score(pi), self.score(phi));
        self.record(Axiom::Subadditivity, approx_le(l_union, l_pi + l_phi), || Counterexample {
            relation: "lq(Π ∪ Φ) <= lq(Π) + lq(Φ)".into(),
            portfolios: vec![pi.clone(), phi.clone()],
            lhs: l_union,
            rhs: l_pi + l_phi,
        });

        // ND
        if let Some((held, &level)) = pi.languages.iter().choose(rng) {
            let again = pi.union(&Portfolio::new().with(held.clone(), level)).unwrap();
            let l_again = self.score(&again);
            self.record(Axiom::NoDoubleCounting, approx_eq(l_again, l_pi), || Counterexample {
                relation: format!("lq(Π ∪ {{{held}@{level}}}) = lq(Π)"),
                portfolios: vec![pi.clone()],
                lhs: l_again,
                rhs: l_pi,
            });
        }

        // I
        let families: Vec<_> = pi
            .languages
            .iter()
            .filter(|(_, &p)| p > 0.0)
            .filter_map(|(name, _)| tree.family(tree.lookup(name)?))
            .collect();
        let outsider = tree
            .leaves()
            .filter(|l| tree.family(l.id).is_some_and(|f| !families.contains(&f)))
            .choose(rng);
        if let Some(leaf) = outsider {
            let level = if rng.random_bool(0.5) { 1.0 } else { rng.random::<f64>() };
            let single = Portfolio::new().with(leaf.name.clone(), level);
            let joined = pi.union(&single).unwrap();
            let (l_joined, l_single) = (self.score(&joined), self.score(&single));
            self.record(Axiom::Independence, approx_eq(l_joined, l_pi + l_single), || {
                Counterexample {
                    relation: format!("lq(Π ∪ {{{}@{level}}}) = lq(Π) + lq({{{}@{level}}})", leaf.name, leaf.name),
                    portfolios: vec![pi.clone()],
                    lhs: l_joined,
                    rhs: l_pi + l_single,
                }
            });
        }

        // PH
        let level = rng.random::<f64>();
        let weighted = Portfolio::new().with(language.clone(), level);
        let (l_weighted, l_fluent) =
            (self.score(&weighted), self.score(&Portfolio::fluent([language.as_str()])));
        self.record(Axiom::PositiveHomogeneity, approx_eq(l_weighted, level * l_fluent), || {
            Counterexample {
                relation: format!("lq({{{language}@{level}}}) = {level} · lq({{{language}}})"),
                portfolios: vec![weighted.clone()],
                lhs: l_weighted,
                rhs: level * l_fluent,
            }
        });

        // SW, on the fluent version of Π
        let fluent_pi = Portfolio::fluent(pi.languages.keys().cloned());
        let l_fluent_pi = self.score(&fluent_pi);
        let grown = fluent_pi.union(&Portfolio::fluent([language.as_str()])).unwrap();
        let l_grown = self.score(&grown);
        let sandwiched = approx_le(l_fluent_pi, l_grown) && approx_le(l_grown, l_fluent_pi + 1.0);
        self.record(Axiom::Sandwich, sandwiched, || Counterexample {
            relation: format!("lq(Π) <= lq(Π ∪ {{{language}}}) <= lq(Π) + 1"),
            portfolios: vec![fluent_pi.clone()],
            lhs: l_grown,
            rhs: l_fluent_pi,
        });

        // MON
        if let Some((name, &level)) = pi.languages.iter().choose(rng) {
            let raised_level = level + (1.0 - level) * rng.random::<f64>();
            let mut raised = pi.clone();
            raised.languages.insert(name.clone(), raised_level);
            let l_raised = self.score(&raised);
            self.record(Axiom::Monotonicity, approx_le(l_pi, l_raised), || Counterexample {
                relation: format!("lq(Π) <= lq(Π with {name}@{raised_level})"),
                portfolios: vec![pi.clone(), raised.clone()],
                lhs: l_pi,
                rhs: l_raised,
            });
        }

        // RNG
        for (p, l, fluent) in [(pi, l_pi, false), (&fluent_pi, l_fluent_pi, true)] {
            let n = p.languages.values().filter(|&&w| w > 0.0).count() as f64;
            let lower = if fluent && n > 0.0 { 1.0 } else { 0.0 };
            let in_range = approx_le(lower, l) && approx_le(l, n);
            self.record(Axiom::Range, in_range, || Counterexample {
                relation: format!("{lower} <= lq(Π) <= {n}"),
                portfolios: vec![p.clone()],
                lhs: l,
                rhs: n,
            });
        }
    }
}
