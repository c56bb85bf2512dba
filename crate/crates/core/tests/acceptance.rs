//! Acceptance criteria. Runs as a plain binary under `cargo test` and prints
//! one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use itertools::Itertools;
use lq::axioms::{check_axioms, Axiom};
use lq::matrix::{matrix_lq, PairCorrelation};
use lq::optimize::{optimize_bundle, BundleProblem, Method, Objective};
use lq::taxonomy::TaxonomyBuilder;
use lq::{lq, lq_recursive, ExponentPolicy, Portfolio};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Costed = (Vec<String>, f64);
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

const GOLDEN_TOL: f64 = 0.01;
const EXACT_TOL: f64 = 1e-9;

fn golden_example() -> Outcome {
    let tree = sample();
    let p = Portfolio::from_json(&fixture("five_languages.pf")).unwrap();
    let b = lq(&tree, &p, &ExponentPolicy::SqrtRank).map_err(|e| e.to_string())?;
    let western = b.value(&tree, "Western").unwrap();
    let ie = b.value(&tree, "Indo-European").unwrap();
    ensure!((western - 1.63).abs() <= GOLDEN_TOL, "Western = {western}");
    ensure!((ie - 1.84).abs() <= GOLDEN_TOL, "Indo-European = {ie}");
    ensure!((b.score - 2.84).abs() <= GOLDEN_TOL, "LQ = {}", b.score);

    let mut times: Vec<Duration> = (0..101)
        .map(|_| {
            let start = Instant::now();
            let _ = std::hint::black_box(lq(&tree, &p, &ExponentPolicy::SqrtRank));
            start.elapsed()
        })
        .collect();
    times.sort();
    let median = times[50];
    ensure!(median < Duration::from_millis(1), "median runtime {median:?}");
    Ok(format!("Western {western:.4}, Indo-European {ie:.4}, LQ {:.4}, median {median:?}", b.score))
}

fn closed_form() -> Outcome {
    let mut checked = 0;
    for r in 2..=6u32 {
        for k in 1..=5usize {
            let mut b = TaxonomyBuilder::new();
            b.node("d0", None);
            for d in 1..r {
                b.node(format!("d{d}"), Some(&format!("d{}", d - 1)));
            }
            let parent = format!("d{}", r - 1);
            let leaves: Vec<String> = (0..k).map(|i| format!("lang{i}")).collect();
            for l in &leaves {
                b.node(l.clone(), Some(&parent));
            }
            let tree = b.build().unwrap();
            for policy in [ExponentPolicy::SqrtRank, ExponentPolicy::IdentityRank] {
                let br = lq(&tree, &Portfolio::fluent(leaves.iter().cloned()), &policy).unwrap();
                let got = br.value(&tree, &parent).unwrap();
                let expected = (k as f64).powf(1.0 / policy.evaluate(r));
                ensure!(rel_close(got, expected, EXACT_TOL), "k={k} r={r} {policy}: {got} vs {expected}");
                checked += 1;
            }
        }
    }
    let tree = sample();
    let western = lq(&tree, &Portfolio::fluent(["Serbian", "Slovene", "Croatian"]), &ExponentPolicy::SqrtRank)
        .unwrap()
        .value(&tree, "Western")
        .unwrap();
    ensure!(rel_close(western, 3f64.powf((1.0f64 / 5.0).sqrt()), EXACT_TOL), "Western {western}");
    ensure!((western - 1.63).abs() <= GOLDEN_TOL, "Western {western}");
    Ok(format!("{checked} (k, r, policy) cases"))
}

fn axiom_suite() -> Outcome {
    let start = Instant::now();
    let mut checks: BTreeMap<&str, usize> = BTreeMap::new();
    let mut trees = 0;
    for tree_seed in 0..8u64 {
        let tree = random_tree(1000 + tree_seed);
        ensure!(tree.max_depth() <= 6 && tree.leaves().count() <= 200, "tree {tree_seed} out of bounds");
        for (policy, seed) in [(ExponentPolicy::SqrtRank, 42 + tree_seed), (ExponentPolicy::IdentityRank, 7 + tree_seed)] {
            let report = check_axioms(&tree, &policy, 1000, seed).unwrap();
            if let Some(failed) = report.first_failure() {
                return Err(format!("tree {tree_seed}, {policy}: {} failed: {:?}", failed.axiom, failed.counterexample));
            }
            for o in &report.outcomes {
                *checks.entry(o.axiom.tag()).or_default() += o.checks;
            }
        }
        trees += 1;
    }
    for axiom in Axiom::ALL {
        ensure!(checks[axiom.tag()] >= 1000, "{axiom} only checked {} times", checks[axiom.tag()]);
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    let summary = checks.iter().map(|(k, v)| format!("{k}:{v}")).join(" ");
    Ok(format!("{trees} random trees x 2 policies x 1000 pairs; {summary}; {elapsed:.2?}"))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let policies = [ExponentPolicy::SqrtRank, ExponentPolicy::IdentityRank, ExponentPolicy::PowerRank(1.5)];
    let mut nodes = 0;
    for i in 0..1000u64 {
        let tree = random_tree(i);
        let p = random_portfolio(&mut rng, &tree, i % 2 == 0);
        let policy = policies[i as usize % policies.len()];
        let a = lq(&tree, &p, &policy).unwrap();
        let b = lq_recursive(&tree, &p, &policy).unwrap();
        ensure!(a.node_values.len() == b.node_values.len(), "instance {i}: node sets differ");
        for (id, v) in &a.node_values {
            let w = b.node_values[id];
            ensure!(rel_close(*v, w, EXACT_TOL), "instance {i}: {} {v} vs {w}", tree.name(*id));
            nodes += 1;
        }
    }
    Ok(format!("1000 instances, {nodes} node values"))
}

fn matrix_measure() -> Outcome {
    for r in [0.5, 1.0, 2.0] {
        let at = |rho: f64| matrix_lq(&PairCorrelation::new(rho, r).unwrap()).unwrap();
        ensure!(at(0.0) == 2.0, "rho=0, r={r}: {}", at(0.0));
        ensure!(at(1.0) == 1.0, "rho=1, r={r}: {}", at(1.0));
        let grid: Vec<f64> = (0..=100).map(|i| at(f64::from(i) / 100.0)).collect();
        ensure!(grid.windows(2).all(|w| w[1] < w[0]), "not decreasing for r={r}");
        ensure!(grid.iter().all(|v| (1.0..=2.0).contains(v)), "out of [1, 2] for r={r}");
    }
    Ok("endpoints exact; strictly decreasing on 101 points for r = 0.5, 1, 2".into())
}

fn optimizer() -> Outcome {
    let tree = sample();
    let leaves: Vec<String> = tree.leaves().map(|l| l.name.clone()).collect();
    let populations = vec![
        vec![Portfolio::fluent(["Serbian"])],
        vec![Portfolio::fluent(["Serbian"]), Portfolio::fluent(["Chinese"])],
        vec![
            Portfolio::from_json(&fixture("five_languages.pf")).unwrap(),
            Portfolio::new().with("English", 0.7),
            Portfolio::fluent(["Croatian", "Chinese"]),
        ],
        vec![Portfolio::new(), Portfolio::new().with("Slovene", 0.2).with("Chinese", 0.9)],
    ];
    let doc = tree.to_document();
    let score = |p: &Portfolio| oracle(&doc, &p.languages, &sqrt_rank).0;

    let start = Instant::now();
    let mut problems = 0;
    for population in &populations {
        for n in 1..=4 {
            for candidates in leaves.iter().cloned().combinations(n) {
                for k in 1..=n.min(2) {
                    for objective in [Objective::Marginal, Objective::Aggregate] {
                        let problem = BundleProblem {
                            population: population.clone(),
                            candidates: candidates.clone(),
                            bundle_size: k,
                            policy: ExponentPolicy::SqrtRank,
                            objective,
                        };
                        let solution = optimize_bundle(&tree, &problem).map_err(|e| e.to_string())?;
                        ensure!(solution.method == Method::Exhaustive, "not exhaustive");

                        // every bundle's cost, independently
                        let mut sorted = candidates.clone();
                        sorted.sort();
                        let costs: Vec<Costed> = sorted
                            .iter()
                            .cloned()
                            .combinations(k)
                            .map(|bundle| {
                                let learned = Portfolio::fluent(bundle.iter().cloned());
                                let total = population
                                    .iter()
                                    .map(|m| {
                                        let after = score(&m.union(&learned).unwrap());
                                        match objective {
                                            Objective::Marginal => after - score(m),
                                            Objective::Aggregate => after,
                                        }
                                    })
                                    .sum();
                                (bundle, total)
                            })
                            .collect();
                        let min = costs.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
                        let first_min = &costs.iter().find(|c| rel_close(c.1, min, EXACT_TOL)).unwrap().0;
                        ensure!(
                            rel_close(solution.total_cost, min, EXACT_TOL),
                            "{candidates:?} k={k}: {} vs {min}",
                            solution.total_cost
                        );
                        ensure!(&solution.bundle == first_min, "{candidates:?} k={k}: {:?} vs {first_min:?}", solution.bundle);
                        problems += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("{problems} problems match enumeration; {elapsed:.2?}"))
}

fn cli_golden() -> Outcome {
    let data = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let run = |args: &[&str]| Command::new(env!("CARGO_BIN_EXE_lq")).args(args).current_dir(data).output().unwrap();
    for name in ["five_languages", "mixed_union", "serbian"] {
        let pf = format!("{name}.pf");
        let args = ["compute", "--taxonomy", "sample.tax", "--portfolio", &pf, "--breakdown"];
        let (a, b) = (run(&args), run(&args));
        ensure!(a.status.success(), "{name}: exit {:?}", a.status.code());
        ensure!(a.stdout == b.stdout, "{name}: output differs between runs");
        let golden = std::fs::read(format!("{}/tests/golden/{name}.txt", env!("CARGO_MANIFEST_DIR"))).unwrap();
        ensure!(a.stdout == golden, "{name}: differs from golden file");
    }
    let check = run(&["check-axioms", "--taxonomy", "sample.tax", "--seed", "42"]);
    ensure!(check.status.code() == Some(0), "check-axioms exit {:?}", check.status.code());
    Ok("3 golden breakdowns byte-identical; check-axioms --seed 42 exits 0".into())
}

fn service() -> Outcome {
    let rt = tokio::runtime::Runtime::new().unwrap();
    rt.block_on(async {
        let (base, stop) = spawn_service().await;
        let client = reqwest::Client::new();
        let post = |body: serde_json::Value| {
            let req = client.post(format!("{base}/lq")).json(&body);
            async move {
                let resp = req.send().await.map_err(|e| e.to_string())?;
                let status = resp.status().as_u16();
                let body: serde_json::Value = resp.json().await.map_err(|e| e.to_string())?;
                Ok::<_, String>((status, body))
            }
        };
        let golden: serde_json::Value = serde_json::from_str(&fixture("five_languages.pf")).unwrap();
        let (status, body) = post(serde_json::json!({ "portfolio": golden })).await?;
        let score = body["score"].as_f64().unwrap_or(f64::NAN);
        ensure!(status == 200 && (score - 2.84).abs() <= GOLDEN_TOL, "golden: {status} {body}");

        let (status, body) = post(serde_json::json!({ "portfolio": {"languages": {"Esperanto": 1}} })).await?;
        ensure!(status == 422 && body["error"]["name"] == "Esperanto", "unknown: {status} {body}");

        let (status, body) = post(serde_json::json!({ "portfolio": {"languages": {}} })).await?;
        ensure!(status == 200 && body["score"] == 0.0, "empty: {status} {body}");

        let _ = stop.send(());
        Ok(format!("golden {score}, unknown language 422, empty portfolio 0 on {base}"))
    })
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("golden example", golden_example),
        ("closed-form sibling scores", closed_form),
        ("axiom suite", axiom_suite),
        ("iterative/recursive equivalence", oracle_equivalence),
        ("matrix measure", matrix_measure),
        ("optimizer vs enumeration", optimizer),
        ("CLI golden files", cli_golden),
        ("service conformance", service),
    ];
    let mut failed = 0;
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        match criterion() {
            Ok(detail) => println!("[PASS] AC{} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("[FAIL] AC{} {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

