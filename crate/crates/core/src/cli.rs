//! The `lq` command line.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 when `check-axioms`
//! finds a counterexample.

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::api::{self, ApiConfig};
use crate::axioms::check_axioms;
use crate::matrix::{matrix_lq, PairCorrelation};
use crate::measure::{self, ExponentPolicy};
use crate::optimize::{optimize_bundle, BundleProblem, Objective};
use crate::taxonomy::{Portfolio, TaxonomyTree};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_COUNTEREXAMPLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "lq", version, about = "Effective number of languages in a portfolio")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a portfolio.
    Compute {
        #[arg(long)]
        taxonomy: PathBuf,
        #[arg(long)]
        portfolio: PathBuf,
        #[arg(long, default_value = "sqrt")]
        policy: ExponentPolicy,
        /// Print every node's value.
        #[arg(long)]
        breakdown: bool,
    },
    /// Search for counterexamples to the coherence axioms.
    CheckAxioms {
        #[arg(long)]
        taxonomy: PathBuf,
        #[arg(long, default_value = "sqrt")]
        policy: ExponentPolicy,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Score change from adding one language.
    Whatif {
        #[arg(long)]
        taxonomy: PathBuf,
        #[arg(long)]
        portfolio: PathBuf,
        #[arg(long)]
        add: String,
        #[arg(long, default_value_t = 1.0)]
        proficiency: f64,
        #[arg(long, default_value = "sqrt")]
        policy: ExponentPolicy,
    },
    /// Languages whose fluent addition gains the most.
    Suggest {
        #[arg(long)]
        taxonomy: PathBuf,
        #[arg(long)]
        portfolio: PathBuf,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
        top: u64,
        #[arg(long, default_value = "sqrt")]
        policy: ExponentPolicy,
    },
    /// Two-language correlation measure 2 - rho^r.
    Matrix {
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
    },
    /// Choose a working-language bundle for a population.
    Optimize {
        #[arg(long)]
        taxonomy: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        /// Overrides the policy in the problem file.
        #[arg(long)]
        policy: Option<ExponentPolicy>,
        /// Minimize the raw score after adoption instead of the increase.
        #[arg(long)]
        aggregate: bool,
    },
    /// List languages, optionally by name prefix.
    Languages {
        #[arg(long)]
        taxonomy: PathBuf,
        #[arg(long)]
        query: Option<String>,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        taxonomy: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "sqrt")]
        policy: ExponentPolicy,
        /// Browser origin allowed to call the service; repeatable.
        #[arg(long = "allow-origin")]
        allow_origin: Vec<String>,
    },
}

type CliResult = Result<i32, String>;

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_tree(path: &Path) -> Result<TaxonomyTree, String> {
    let file = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
    TaxonomyTree::load(BufReader::new(file)).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_portfolio(path: &Path) -> Result<Portfolio, String> {
    Portfolio::from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

/// Parses `args` (including the program name) and runs the command, writing
/// results to `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(message) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_INVALID
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> CliResult {
    let io = |e: std::io::Error| e.to_string();
    match command {
        Command::Compute { taxonomy, portfolio, policy, breakdown } => {
            let tree = load_tree(&taxonomy)?;
            let portfolio = load_portfolio(&portfolio)?;
            let result = measure::lq(&tree, &portfolio, &policy).map_err(|e| e.to_string())?;
            if breakdown {
                write_breakdown(out, &result.rows(&tree)).map_err(io)?;
            }
            writeln!(out, "LQ = {:.4}", result.score).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::CheckAxioms { taxonomy, policy, trials, seed } => {
            let tree = load_tree(&taxonomy)?;
            if trials == 0 {
                return Err("--trials must be at least 1".into());
            }
            let report = check_axioms(&tree, &policy, trials, seed).map_err(|e| e.to_string())?;
            for o in &report.outcomes {
                let verdict = if o.passed() { "pass" } else { "FAIL" };
                writeln!(out, "{:<4} {:<22} {verdict}  ({} checks)", o.axiom.tag(), o.axiom.title(), o.checks)
                    .map_err(io)?;
                if let Some(cx) = &o.counterexample {
                    let portfolios: Vec<String> = cx.portfolios.iter().map(ToString::to_string).collect();
                    writeln!(out, "     {}: {} vs {} for {}", cx.relation, cx.lhs, cx.rhs, portfolios.join(" and "))
                        .map_err(io)?;
                }
            }
            Ok(if report.all_passed() { EXIT_OK } else { EXIT_COUNTEREXAMPLE })
        }
        Command::Whatif { taxonomy, portfolio, add, proficiency, policy } => {
            let tree = load_tree(&taxonomy)?;
            let portfolio = load_portfolio(&portfolio)?;
            let (base, new) = measure::what_if(&tree, &portfolio, &add, proficiency, &policy)
                .map_err(|e| e.to_string())?;
            writeln!(out, "base = {base:.4}\nnew  = {new:.4}\ngain = {:.4}", new - base).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Suggest { taxonomy, portfolio, top, policy } => {
            let tree = load_tree(&taxonomy)?;
            let portfolio = load_portfolio(&portfolio)?;
            let suggestions = measure::suggest_next(&tree, &portfolio, top as usize, &policy)
                .map_err(|e| e.to_string())?;
            for s in suggestions {
                writeln!(out, "{:<24} +{:.4}", s.language, s.gain).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Matrix { rho, r } => {
            let corr = PairCorrelation::new(rho, r).map_err(|e| e.to_string())?;
            writeln!(out, "{:.4}", matrix_lq(&corr).map_err(|e| e.to_string())?).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Optimize { taxonomy, problem, policy, aggregate } => {
            let tree = load_tree(&taxonomy)?;
            let mut problem = BundleProblem::from_json(&read(&problem)?)
                .map_err(|e| format!("{}: {e}", problem.display()))?;
            if let Some(policy) = policy {
                problem.policy = policy;
            }
            if aggregate {
                problem.objective = Objective::Aggregate;
            }
            let solution = optimize_bundle(&tree, &problem).map_err(|e| e.to_string())?;
            writeln!(out, "bundle: {}", solution.bundle.join(", ")).map_err(io)?;
            writeln!(out, "method: {}", serde_json::to_value(solution.method).unwrap().as_str().unwrap())
                .map_err(io)?;
            for (i, c) in solution.per_member_cost.iter().enumerate() {
                writeln!(out, "member {:>3}: {c:.4}", i + 1).map_err(io)?;
            }
            writeln!(out, "total cost = {:.4}", solution.total_cost).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Languages { taxonomy, query } => {
            let tree = load_tree(&taxonomy)?;
            for entry in tree.list_languages(query.as_deref()) {
                writeln!(out, "{:<24} {}", entry.name, entry.path.join(" > ")).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Serve { taxonomy, port, policy, allow_origin } => {
            let config = ApiConfig {
                listen_port: port,
                taxonomy_path: taxonomy,
                default_policy: policy,
                allowed_origins: allow_origin,
            };
            let runtime = tokio::runtime::Runtime::new().map_err(io)?;
            runtime.block_on(api::serve(config)).map_err(|e| e.to_string())?;
            Ok(EXIT_OK)
        }
    }
}

/// One row per node, indented by depth, values to four decimals.
pub fn write_breakdown(out: &mut dyn Write, rows: &[measure::BreakdownRow]) -> std::io::Result<()> {
    let label = |r: &measure::BreakdownRow| format!("{}{}", "  ".repeat(r.depth as usize), r.node);
    let width = rows.iter().map(|r| label(r).chars().count()).max().unwrap_or(0).max(4) + 2;
    writeln!(out, "{:<width$}{:>5}{:>10}", "node", "depth", "lambda")?;
    for row in rows {
        // pad by chars, not bytes, so non-ASCII names line up
        let l = label(row);
        let pad = width - l.chars().count();
        writeln!(out, "{l}{}{:>5}{:>10.4}", " ".repeat(pad), row.depth, row.lambda)?;
    }
    Ok(())
}
