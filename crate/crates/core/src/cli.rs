//! Command-line front end. Every run prints a provenance header (version,
//! seed, hash of the resolved command) ahead of its result.

use std::ffi::OsString;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::estimator::with_threads;
use crate::graph_desc::{parse_graph, GraphDesc};
use crate::mst::{
    find_pair, mc_mst_moments, ordering_oracle, pnc_verdict, PncMethod, EXACT_EDGE_CAP,
};
use crate::polytope::alpha_membership_check;
use crate::pwit::{alpha_fn, mc_root_degree, ThetaEntry};
use crate::spectral::LaplacianSystem;
use crate::ust::{exact_mean_sq_degree, identity_check_exact, sharpness_csv, sharpness_sweep, vertex_second_moments};
use crate::verify::{run_all, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "spanlab", version, about = "Spanning-tree degree and correlation experiments")]
pub struct Cli {
    /// Master seed for every random draw.
    #[arg(long, global = true, env = "SPANLAB_SEED", default_value_t = 7)]
    pub seed: u64,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Uniform spanning tree quantities.
    #[command(subcommand)]
    Ust(UstCommand),
    /// Minimum spanning tree under random weights.
    #[command(subcommand)]
    Mst(MstCommand),
    /// Root degree of the limiting minimal spanning forest.
    #[command(subcommand)]
    Pwit(PwitCommand),
    /// Glued-block construction approaching the bound.
    #[command(subcommand)]
    Sharpness(SharpnessCommand),
    /// Forest polytope membership.
    #[command(subcommand)]
    Polytope(PolytopeCommand),
    /// Regression suite.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Args, Serialize)]
pub struct GraphArg {
    /// complete:n, bipartite:n, cycle:n, path:n, regular:n:d:seed, sharpness:d, petersen, lps, file:path
    #[arg(long)]
    pub graph: String,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UstCommand {
    /// Exact mean squared degree and the regular-graph bound.
    Moments(GraphArg),
    /// Transfer-current pair probability.
    Pair {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        e: usize,
        #[arg(long)]
        f: usize,
    },
    /// Pair-sum identities against the second moment.
    IdentityCheck(GraphArg),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MstCommand {
    /// Ordering oracle: exact up to 12 edges, stratified up to 16.
    Exact {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, num_args = 2, value_names = ["E", "F"])]
        pair: Option<Vec<usize>>,
        /// Orderings per stratum for 13 to 16 edges.
        #[arg(long, default_value_t = 20_000)]
        per_stratum: u64,
    },
    /// Monte Carlo estimators and p-NC verdicts.
    Mc {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, num_args = 2, value_names = ["E", "F"])]
        pair: Option<Vec<usize>>,
    },
    /// The parallel-bundle counterexample, exactly.
    Lps,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PwitCommand {
    /// Monte Carlo E[N^2] next to its quadrature and series values.
    Moment {
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// theta, q, theta', alpha and beta at one lambda.
    Theta {
        #[arg(long)]
        lambda: f64,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SharpnessCommand {
    /// One row per odd d in [dmin, dmax].
    Sweep {
        #[arg(long, default_value_t = 5)]
        dmin: usize,
        #[arg(long, default_value_t = 41)]
        dmax: usize,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolytopeCommand {
    /// Is Reff(e) - 2/(d+1) in the forest polytope?
    AlphaCheck(GraphArg),
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyCommand {
    /// Every acceptance criterion; exit code 0 iff all pass.
    All {
        #[arg(long)]
        pwit_samples: Option<u64>,
        #[arg(long)]
        mst_samples: Option<u64>,
    },
}

#[derive(Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config_hash: String,
}

/// SHA-256 of the resolved command and seed. The thread count is left out
/// because it does not affect results.
pub fn config_hash(cli: &Cli) -> String {
    let canonical = json!({ "seed": cli.seed, "command": &cli.command, "format": cli.format });
    let digest = Sha256::digest(canonical.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

struct Output {
    body: Body,
    code: i32,
}

enum Body {
    Json(Value),
    Csv(String),
    Lines(Vec<String>),
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn graph_of(g: &GraphArg) -> crate::Result<(String, crate::Graph)> {
    let desc: GraphDesc = g.graph.parse()?;
    Ok((desc.to_string(), desc.build()?))
}

fn pair_of(p: &Option<Vec<usize>>) -> Option<(usize, usize)> {
    p.as_ref().map(|v| (v[0], v[1]))
}

fn run_command(cli: &Cli) -> crate::Result<Output> {
    let ok = |v: Value| Ok(Output { body: Body::Json(v), code: EXIT_OK });
    match &cli.command {
        Command::Ust(UstCommand::Moments(g)) => {
            let (label, graph) = graph_of(g)?;
            if graph.regular_degree().is_some() && graph.is_simple() {
                ok(to_value(&exact_mean_sq_degree(&graph, &label)?))
            } else {
                let sys = LaplacianSystem::new(&graph)?;
                let per_vertex = vertex_second_moments(&sys);
                let mean = per_vertex.iter().sum::<f64>() / graph.n() as f64;
                ok(json!({ "graph": label, "n": graph.n(), "regular": false,
                    "direct_mean_sq_degree": mean, "per_vertex": per_vertex }))
            }
        }
        Command::Ust(UstCommand::Pair { graph, e, f }) => {
            let (label, g) = graph_of(graph)?;
            let sys = LaplacianSystem::new(&g)?;
            let (pe, pf) = (sys.edge_probability_ust(*e)?, sys.edge_probability_ust(*f)?);
            let pair = sys.pair_probability_ust(*e, *f)?;
            ok(json!({ "graph": label, "pair": [e, f], "p_pair": pair, "p_e": pe, "p_f": pf,
                "margin": pair - pe * pf, "transfer_current": sys.transfer_current(*e, *f)? }))
        }
        Command::Ust(UstCommand::IdentityCheck(g)) => {
            let (label, graph) = graph_of(g)?;
            let r = identity_check_exact(&LaplacianSystem::new(&graph)?)?;
            ok(json!({ "graph": label, "residuals": to_value(&r), "max_abs": r.max_abs() }))
        }
        Command::Mst(MstCommand::Exact { graph, pair, per_stratum }) => {
            let (label, g) = graph_of(graph)?;
            let pairs: Vec<(usize, usize)> = pair_of(pair).into_iter().collect();
            let r = ordering_oracle(&g, &pairs, *per_stratum, cli.seed)?;
            let mut v = to_value(&r);
            v["graph"] = json!(label);
            if let Some(c) = &r.counts {
                v["edge_probability_exact"] =
                    json!((0..g.m()).map(|e| c.edge_probability(e).to_string()).collect::<Vec<_>>());
                v["sum_sq_degree_exact"] = json!(c.sum_sq_degree().to_string());
            }
            if let Some((e, f)) = pair_of(pair) {
                if g.m() <= EXACT_EDGE_CAP && e != f {
                    v["verdict"] = to_value(&pnc_verdict(&g, &label, e, f, PncMethod::Exact, 0, 0)?);
                }
            }
            ok(v)
        }
        Command::Mst(MstCommand::Mc { graph, samples, pair }) => {
            let (label, g) = graph_of(graph)?;
            let pairs: Vec<(usize, usize)> = match pair_of(pair) {
                Some(p) => vec![p],
                None => [true, false].iter().filter_map(|&a| find_pair(&g, a)).collect(),
            };
            let mut tracked: Vec<usize> = pairs.iter().flat_map(|&(e, f)| [e, f]).collect();
            tracked.sort_unstable();
            tracked.dedup();
            let moments = mc_mst_moments(&g, *samples, cli.seed, &tracked)?;
            let verdicts = pairs
                .iter()
                .map(|&(e, f)| pnc_verdict(&g, &label, e, f, PncMethod::Mc, *samples, cli.seed))
                .collect::<crate::Result<Vec<_>>>()?;
            ok(json!({ "graph": label, "moments": to_value(&moments), "verdicts": to_value(&verdicts) }))
        }
        Command::Mst(MstCommand::Lps) => {
            let gadget = crate::graph::lps_gadget();
            let (e, f) = (gadget.bundles[0][0], gadget.bundles[1][0]);
            let v = pnc_verdict(&gadget.graph, "lps", e, f, PncMethod::Exact, 0, 0)?;
            let violated = v.status == crate::mst::PncStatus::Violated;
            Ok(Output {
                body: Body::Json(json!({ "bundles": gadget.bundles, "verdict": to_value(&v) })),
                code: if violated { EXIT_OK } else { EXIT_FAIL },
            })
        }
        Command::Pwit(PwitCommand::Moment { samples }) => ok(to_value(&mc_root_degree(*samples, cli.seed)?)),
        Command::Pwit(PwitCommand::Theta { lambda }) => {
            let e = ThetaEntry::new(*lambda)?;
            ok(json!({ "entry": to_value(&e), "residual": e.residual(),
                "alpha_quadrature": alpha_fn(*lambda)? }))
        }
        Command::Sharpness(SharpnessCommand::Sweep { dmin, dmax }) => {
            let ds: Vec<usize> = (*dmin..=*dmax).filter(|d| d % 2 == 1 && *d >= 5).collect();
            if ds.is_empty() {
                return Err(Error::Precondition("no odd d >= 5 in range".into()));
            }
            let rows = sharpness_sweep(&ds)?;
            match cli.format {
                Format::Json => ok(to_value(&rows)),
                _ => Ok(Output { body: Body::Csv(sharpness_csv(&rows)), code: EXIT_OK }),
            }
        }
        Command::Polytope(PolytopeCommand::AlphaCheck(g)) => {
            let (label, graph) = graph_of(g)?;
            let r = alpha_membership_check(&graph, cli.seed)?;
            let code = if r.passed { EXIT_OK } else { EXIT_FAIL };
            let mut v = to_value(&r);
            v["graph"] = json!(label);
            Ok(Output { body: Body::Json(v), code })
        }
        Command::Verify(VerifyCommand::All { pwit_samples, mst_samples }) => {
            let d = VerifyConfig::default();
            let cfg = VerifyConfig {
                seed: cli.seed,
                threads: cli.threads,
                pwit_samples: pwit_samples.unwrap_or(d.pwit_samples),
                mst_samples: mst_samples.unwrap_or(d.mst_samples),
            };
            let results = run_all(&cfg);
            let code = if results.iter().all(|r| r.passed) { EXIT_OK } else { EXIT_FAIL };
            let body = if cli.format == Format::Text {
                Body::Lines(
                    results
                        .iter()
                        .map(|r| {
                            let tag = if r.passed { "PASS" } else { "FAIL" };
                            format!("criterion {:>2} {tag} [{}] {}", r.id, r.name, r.detail)
                        })
                        .collect(),
                )
            } else {
                // wall-clock times would break byte-identical reruns
                Body::Json(json!(results
                    .iter()
                    .map(|r| json!({ "id": r.id, "name": r.name, "passed": r.passed, "detail": r.detail }))
                    .collect::<Vec<_>>()))
            };
            Ok(Output { body, code })
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::CapExceeded(_) => EXIT_CAP,
        Error::Numerical(_) | Error::Io(_) => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

/// Parses `args`, runs the command and prints the result; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let prov = Provenance {
        tool: "spanlab",
        version: env!("CARGO_PKG_VERSION"),
        seed: cli.seed,
        config_hash: config_hash(&cli),
    };
    let out = match with_threads(cli.threads, || run_command(&cli)).and_then(|r| r) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    match out.body {
        Body::Json(v) => {
            let doc = json!({ "provenance": to_value(&prov), "result": v });
            let s = if cli.format == Format::Text {
                serde_json::to_string_pretty(&doc)
            } else {
                serde_json::to_string(&doc)
            };
            println!("{}", s.expect("serializable"));
        }
        Body::Csv(s) => {
            println!("# {} {} seed={} config={}", prov.tool, prov.version, prov.seed, prov.config_hash);
            print!("{s}");
        }
        Body::Lines(lines) => {
            println!("# {} {} seed={} config={}", prov.tool, prov.version, prov.seed, prov.config_hash);
            for l in lines {
                println!("{l}");
            }
        }
    }
    out.code
}

/// Graph description parsing shortcut used by the examples.
pub fn graph(desc: &str) -> crate::Result<crate::Graph> {
    parse_graph(desc)
}
