mod bench;
mod input;

use std::collections::BTreeSet;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use trapmark::cegar::{
    enumerate_reprogramming, solve_reprogramming, solve_synthesis, CegarStats, RefinementVariant,
    ReprogrammingOptions, Status, SynthesisOptions,
};
use trapmark::encoding::{SynthesisMode, DEFAULT_CLAUSE_BUDGET};
use trapmark::oracle::{brute_mts, brute_reprogramming, brute_ts};
use trapmark::qdimacs::export_qdimacs;
use trapmark::trapspace::{enumerate_mts, ts_of, ts_trace};
use trapmark::{BooleanNetwork, Configuration, PartialAssignment};

use input::{name_list, read_graph, read_marker, read_network};

const EXIT_UNSAT: u8 = 10;
const EXIT_TIMEOUT: u8 = 20;
const EXIT_USAGE: u8 = 1;
const EXIT_DISAGREE: u8 = 3;

/// Minimal trap spaces, marker reprogramming and synthesis of locally
/// monotone Boolean networks.
///
/// Results are JSON on stdout, diagnostics JSON on stderr. Exit codes:
/// 0 answer produced (SAT), 10 UNSAT, 20 timeout, 1 usage or parse error,
/// 3 oracle disagreement.
#[derive(Parser)]
#[command(name = "trapmark", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smallest trap space containing a configuration.
    Ts {
        network: PathBuf,
        /// Configuration as a 0/1 string in component order.
        config: String,
        /// Also print every saturation sweep.
        #[arg(long)]
        trace: bool,
    },
    /// Minimal trap spaces, as subcube strings with `-` for free components.
    Mts {
        network: PathBuf,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Perturbations of at most k components after which every minimal
    /// trap space matches the marker.
    Reprogram {
        network: PathBuf,
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        solve: SolveArgs,
        /// Stop at the first solution of smallest size (default).
        #[arg(long, conflicts_with = "enumerate")]
        first: bool,
        /// All subset-minimal solutions, by increasing size.
        #[arg(long)]
        enumerate: bool,
    },
    /// Local functions over an influence graph such that every minimal trap
    /// space matches the marker.
    Synthesize {
        /// Lines `source -> target +|-`; a bare name declares a node.
        graph: PathBuf,
        /// Marker as a JSON object `{"name": 0|1}` or a file holding one.
        #[arg(long)]
        marker: String,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Maximum number of DNF clauses per local function.
        #[arg(long, default_value_t = DEFAULT_CLAUSE_BUDGET)]
        clauses: usize,
        #[command(flatten)]
        solve: SolveArgs,
    },
    /// Writes the reprogramming problem as a quantified Boolean formula.
    ExportQdimacs {
        network: PathBuf,
        #[command(flatten)]
        problem: Problem,
        /// Output file; stdout when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compares the SAT-based procedures against exhaustive enumeration on a
    /// small network.
    OracleCheck {
        network: PathBuf,
        /// With `--k`, also compares reprogramming for every variant.
        #[arg(long, requires = "k")]
        marker: Option<String>,
        #[arg(long, requires = "marker")]
        k: Option<usize>,
        #[arg(long)]
        allow_marker_nodes: bool,
    },
    /// Runs a manifest of reprogramming instances; see the README for its
    /// format.
    Bench {
        manifest: PathBuf,
        /// Also write the rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Worker threads; defaults to one per core.
        #[arg(long, env = "TRAPMARK_WORKERS")]
        workers: Option<usize>,
    },
}

#[derive(Args)]
struct Problem {
    /// Marker as a JSON object `{"name": 0|1}` or a file holding one.
    #[arg(long)]
    marker: String,
    /// Maximum number of perturbed components.
    #[arg(long)]
    k: usize,
    /// Comma-separated components that may not be perturbed.
    #[arg(long)]
    uncontrollable: Option<String>,
    /// Allow perturbing components the marker mentions; denied by default.
    #[arg(long)]
    allow_marker_nodes: bool,
}

#[derive(Args)]
struct SolveArgs {
    /// Refinement: 0 blocks the candidate, 1 adds the counter-example's
    /// trap-space condition, 2 also requires the marker there.
    #[arg(long, default_value = "2", value_parser = parse_variant)]
    variant: RefinementVariant,
    /// Wall-clock limit in seconds; none by default.
    #[arg(long)]
    timeout: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Subset,
}

fn parse_variant(s: &str) -> Result<RefinementVariant, String> {
    s.parse().map_err(|e: trapmark::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            emit_error(&e.to_string());
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            emit_error(&format!("{e:#}"));
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn emit_error(message: &str) {
    let _ = writeln!(std::io::stderr(), "{}", json!({ "error": message.trim_end() }));
}

fn print_json(value: &impl Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn status_code(status: Status) -> u8 {
    match status {
        Status::Sat => 0,
        Status::Unsat => EXIT_UNSAT,
        Status::Timeout => EXIT_TIMEOUT,
    }
}

fn timeout(seconds: Option<f64>) -> Result<Option<Duration>> {
    seconds
        .map(|s| Duration::try_from_secs_f64(s).context("invalid timeout"))
        .transpose()
}

fn reprogramming_options(f: &BooleanNetwork, problem: &Problem, solve: Option<&SolveArgs>) -> Result<ReprogrammingOptions> {
    let uncontrollable: BTreeSet<usize> = name_list(problem.uncontrollable.as_deref(), f.names())?
        .into_iter()
        .collect();
    let mut options = ReprogrammingOptions {
        uncontrollable,
        forbid_marker_nodes: !problem.allow_marker_nodes,
        ..ReprogrammingOptions::default()
    };
    if let Some(solve) = solve {
        options.variant = solve.variant;
        options.timeout = timeout(solve.timeout)?;
    }
    Ok(options)
}

#[derive(Serialize)]
struct Report<'a> {
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    solutions: Option<Vec<Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    network: Option<String>,
    #[serde(flatten)]
    stats: &'a CegarStats,
    counter_example_configurations: Vec<String>,
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Ts { network, config, trace } => {
            let f = read_network(&network)?;
            let x: Configuration = config.parse().context("parsing configuration")?;
            if x.len() != f.len() {
                bail!("configuration has {} values, network has {} components", x.len(), f.len());
            }
            let mut out = json!({ "ts": ts_of(&f, &x).to_string() });
            if trace {
                let steps: Vec<String> = ts_trace(&f, &x).iter().map(ToString::to_string).collect();
                out["trace"] = json!(steps);
            }
            print_json(&out)?;
            Ok(0)
        }
        Command::Mts { network, limit } => {
            let f = read_network(&network)?;
            let mut mts: Vec<String> = enumerate_mts(&f, limit)?.iter().map(ToString::to_string).collect();
            mts.sort();
            print_json(&mts)?;
            Ok(0)
        }
        Command::Reprogram {
            network,
            problem,
            solve,
            first: _,
            enumerate,
        } => {
            let f = read_network(&network)?;
            let marker = read_marker(&problem.marker, f.names(), None)?;
            let options = reprogramming_options(&f, &problem, Some(&solve))?;
            let outcome = if enumerate {
                enumerate_reprogramming(&f, &marker, problem.k, &options)?
            } else {
                solve_reprogramming(&f, &marker, problem.k, &options)?
            };
            let solutions = outcome.solutions.iter().map(|p| p.to_json_value(f.names())).collect();
            print_json(&Report {
                status: outcome.status,
                solutions: Some(solutions),
                network: None,
                stats: &outcome.stats,
                counter_example_configurations: outcome.counter_examples.iter().map(ToString::to_string).collect(),
            })?;
            Ok(status_code(outcome.status))
        }
        Command::Synthesize {
            graph,
            marker,
            mode,
            clauses,
            solve,
        } => {
            let g = read_graph(&graph)?;
            let marker = read_marker(&marker, g.names(), None)?;
            let options = SynthesisOptions {
                mode: match mode {
                    Mode::Exact => SynthesisMode::Exact,
                    Mode::Subset => SynthesisMode::Subset,
                },
                clause_budget: clauses,
                variant: solve.variant,
                timeout: timeout(solve.timeout)?,
                ..SynthesisOptions::default()
            };
            let outcome = solve_synthesis(&g, &marker, &options)?;
            print_json(&Report {
                status: outcome.status,
                solutions: None,
                network: outcome.network.as_ref().map(BooleanNetwork::to_bnet),
                stats: &outcome.stats,
                counter_example_configurations: outcome.counter_examples.iter().map(ToString::to_string).collect(),
            })?;
            Ok(status_code(outcome.status))
        }
        Command::ExportQdimacs { network, problem, output } => {
            let f = read_network(&network)?;
            let marker = read_marker(&problem.marker, f.names(), None)?;
            let options = reprogramming_options(&f, &problem, None)?;
            let export = export_qdimacs(&f, &marker, problem.k, &options)?;
            match output {
                Some(path) => {
                    std::fs::write(&path, &export.text).with_context(|| format!("writing {}", path.display()))?;
                    print_json(&json!({
                        "output": path.display().to_string(),
                        "variables": export.formula.num_vars,
                        "clauses": export.formula.clauses.len(),
                        "budget": export.budget,
                        "core_variables": export.budget.core(),
                    }))?;
                }
                None => print!("{}", export.text),
            }
            Ok(0)
        }
        Command::OracleCheck {
            network,
            marker,
            k,
            allow_marker_nodes,
        } => {
            let f = read_network(&network)?;
            let marker = marker
                .map(|m| read_marker(&m, f.names(), None))
                .transpose()?;
            oracle_check(&f, marker.as_ref().zip(k), allow_marker_nodes)
        }
        Command::Bench {
            manifest,
            csv,
            json,
            workers,
        } => {
            let entries = bench::load_manifest(&manifest)?;
            let base = manifest.parent().unwrap_or(Path::new("."));
            let rows = bench::run(&entries, base, workers)?;
            if let Some(path) = csv {
                bench::write_csv(&path, &rows)?;
            }
            match json {
                Some(path) => std::fs::write(&path, serde_json::to_string_pretty(&rows)?)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print_json(&rows)?,
            }
            Ok(0)
        }
    }
}

fn oracle_check(f: &BooleanNetwork, problem: Option<(&PartialAssignment, usize)>, allow_marker_nodes: bool) -> Result<u8> {
    let mut checks = serde_json::Map::new();

    let mut ts_agree = true;
    for x in Configuration::all(f.len()) {
        if ts_of(f, &x) != brute_ts(f, &x)? {
            ts_agree = false;
            break;
        }
    }
    checks.insert("ts".into(), json!(ts_agree));

    let sorted = |mut v: Vec<String>| {
        v.sort();
        v
    };
    let sat = sorted(enumerate_mts(f, None)?.iter().map(ToString::to_string).collect());
    let brute = sorted(brute_mts(f)?.iter().map(ToString::to_string).collect());
    checks.insert("mts".into(), json!(sat == brute));

    if let Some((marker, k)) = problem {
        let options = ReprogrammingOptions {
            forbid_marker_nodes: !allow_marker_nodes,
            ..ReprogrammingOptions::default()
        };
        let mut expected = brute_reprogramming(f, marker, k, &options)?;
        expected.sort();
        for v in RefinementVariant::ALL {
            let mut got = enumerate_reprogramming(f, marker, k, &ReprogrammingOptions { variant: v, ..options.clone() })?.solutions;
            got.sort();
            checks.insert(format!("reprogram_v{v}"), json!(got == expected));
        }
    }

    let agree = checks.values().all(|v| v == &json!(true));
    print_json(&json!({ "agree": agree, "checks": checks }))?;
    Ok(if agree { 0 } else { EXIT_DISAGREE })
}
