use std::fs;
use std::io::{self, BufReader, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use flowcrit::criticality::{
    is_3_flow_critical, reduction_orders, verify_structure, z3_reduce,
    CriticalityCertificate,
};
use flowcrit::density::{check_rho_dichotomy, density_report, rho_min};
use flowcrit::families::{
    assemble_density_family, complete, complete_bipartite, cycle, k3plus, plan_density_family,
    wheel,
};
use flowcrit::flow::{has_mod3_orientation, is_z3_connected};
use flowcrit::forests::{decompose_into_forests, spanning_tree_packing, ForestDecomposition, TreePacking};
use flowcrit::format::{parse_graph, to_edge_list, GraphFormat};
use flowcrit::scan::{scan, RecordFormat, ScanOptions};
use flowcrit::{Error, MultiGraph};

#[derive(Parser)]
#[command(name = "flowcrit", version, about = "Exact 3-flow, Z3-connectivity and 3-flow-criticality checks")]
struct Cli {
    /// Input graph format.
    #[arg(long, global = true, value_enum, default_value = "edgelist")]
    format: GraphFormat,
    /// Exit with status 1 unless the verdict equals this.
    #[arg(long, global = true)]
    expect: Option<String>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Compact JSON for decisions, JSON lines for scans, JSON graphs for
    /// constructions.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Modulo-3 orientation (nowhere-zero 3-flow).
    Flow { input: Option<PathBuf> },
    /// Z3-connectivity.
    Z3 { input: Option<PathBuf> },
    /// 3-flow-criticality with per-edge witnesses.
    Critical {
        input: Option<PathBuf>,
        /// Check this certificate instead of searching.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Z3-reduction trace.
    Reduce {
        input: Option<PathBuf>,
        /// Also try every contraction order (at most 6 vertices).
        #[arg(long)]
        all_orders: bool,
    },
    /// Minimum partition potential and the reduction dichotomy.
    Rho { input: Option<PathBuf> },
    /// Structure checks every critical graph passes.
    Structure { input: Option<PathBuf> },
    /// Edge-density bounds for a critical graph.
    Bounds { input: Option<PathBuf> },
    /// Split the edges into k forests.
    Forests { k: usize, input: Option<PathBuf> },
    /// Pack k edge-disjoint spanning trees.
    Treepack { k: usize, input: Option<PathBuf> },
    /// Emit a graph from a named family.
    Construct {
        #[command(subcommand)]
        family: Family,
    },
    /// Parameters for a critical family of density close to q/p.
    Plan { p: u64, q: u64, floor: u64 },
    /// Scan a stream of graph6 lines.
    Scan {
        input: Option<PathBuf>,
        /// Keep only 3-edge-connected graphs.
        #[arg(long)]
        three_edge_connected: bool,
        /// Add per-graph timings (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Subcommand)]
enum Family {
    Complete { n: usize },
    Cycle { k: usize },
    Wheel { k: usize },
    Bipartite { a: usize, b: usize },
    /// K_{3,n-3} plus one edge inside the part of size 3.
    K3plus { n: usize },
    /// Two-sum of a seed graph (edge list) with K+_{3,t-3} following a plan.
    Density {
        p: u64,
        q: u64,
        floor: u64,
        seed: PathBuf,
    },
}

enum Failure {
    Input(String),
    Cap(String),
    Bug(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::CapExceeded { .. } => Failure::Cap(e.to_string()),
            Error::ProvenBoundViolated { .. } => Failure::Bug(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<Option<String>, Failure>;

fn read_input(path: &Option<PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) => fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

struct Ctx {
    format: GraphFormat,
    compact: bool,
}

impl Ctx {
    fn graph(&self, path: &Option<PathBuf>) -> Result<MultiGraph, Failure> {
        Ok(parse_graph(&read_input(path)?, self.format)?)
    }

    fn print<T: Serialize>(&self, value: &T) -> Result<(), Failure> {
        let text = if self.compact {
            serde_json::to_string(value)
        } else {
            serde_json::to_string_pretty(value)
        }
        .map_err(|e| Failure::Bug(e.to_string()))?;
        println!("{text}");
        Ok(())
    }

    fn decide<T: Serialize>(&self, verdict: &str, value: &T) -> Outcome {
        self.print(value)?;
        Ok(Some(verdict.to_string()))
    }
}

fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx {
        format: cli.format,
        compact: cli.json,
    };
    match &cli.command {
        Command::Flow { input } => {
            let d = has_mod3_orientation(&ctx.graph(input)?)?;
            ctx.decide(if d.admits { "flow" } else { "no-flow" }, &d)
        }
        Command::Z3 { input } => {
            let d = is_z3_connected(&ctx.graph(input)?)?;
            ctx.decide(if d.connected { "connected" } else { "not-connected" }, &d)
        }
        Command::Critical { input, certificate } => {
            let g = ctx.graph(input)?;
            let cert = match certificate {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    let cert: CriticalityCertificate = serde_json::from_str(&text)
                        .map_err(|e| Failure::Input(format!("certificate: {e}")))?;
                    cert.verify(&g)
                        .map_err(|e| Failure::Input(format!("certificate rejected: {e}")))?;
                    cert
                }
                None => is_3_flow_critical(&g)?,
            };
            let verdict = if cert.is_critical() { "critical" } else { "not-critical" };
            ctx.decide(verdict, &cert)
        }
        Command::Reduce { input, all_orders } => {
            let g = ctx.graph(input)?;
            let trace = z3_reduce(&g)?;
            let verdict = if trace.steps.is_empty() { "reduced" } else { "not-reduced" };
            if *all_orders {
                let orders = reduction_orders(&g)?;
                ctx.decide(verdict, &json!({ "trace": trace, "all_orders": orders }))
            } else {
                ctx.decide(verdict, &trace)
            }
        }
        Command::Rho { input } => {
            let g = ctx.graph(input)?;
            let rho = rho_min(&g)?;
            let dichotomy = if g.is_connected() && g.n() <= flowcrit::flow::Z3_MAX_VERTICES {
                Some(check_rho_dichotomy(&g)?)
            } else {
                None
            };
            let verdict = if rho.value >= 0 { "nonnegative" } else { "negative" };
            ctx.decide(verdict, &json!({ "rho": rho, "dichotomy": dichotomy }))
        }
        Command::Structure { input } => {
            let r = verify_structure(&ctx.graph(input)?)?;
            ctx.decide(if r.all_hold { "holds" } else { "fails" }, &r)
        }
        Command::Bounds { input } => {
            let g = ctx.graph(input)?;
            let cert = is_3_flow_critical(&g)?;
            if !cert.is_critical() {
                return Err(Failure::Input(
                    "bounds apply to 3-flow-critical graphs only".into(),
                ));
            }
            let r = density_report(&g, &cert)?;
            ctx.decide(if r.flags.is_empty() { "ok" } else { "flagged" }, &r)
        }
        Command::Forests { k, input } => {
            let d = decompose_into_forests(&ctx.graph(input)?, *k)?;
            let verdict = match d {
                ForestDecomposition::Forests { .. } => "decomposes",
                ForestDecomposition::TooDense { .. } => "too-dense",
            };
            ctx.decide(verdict, &d)
        }
        Command::Treepack { k, input } => {
            let d = spanning_tree_packing(&ctx.graph(input)?, *k)?;
            let verdict = match d {
                TreePacking::Trees { .. } => "packs",
                TreePacking::TooSparse { .. } => "too-sparse",
            };
            ctx.decide(verdict, &d)
        }
        Command::Construct { family } => {
            let g = match family {
                Family::Complete { n } => {
                    if *n > flowcrit::graph::MAX_VERTICES {
                        return Err(Error::CapExceeded {
                            what: "vertex count",
                            limit: flowcrit::graph::MAX_VERTICES,
                            actual: *n,
                        }
                        .into());
                    }
                    complete(*n)
                }
                Family::Cycle { k } => cycle(*k)?,
                Family::Wheel { k } => wheel(*k)?,
                Family::Bipartite { a, b } => complete_bipartite(*a, *b)?,
                Family::K3plus { n } => k3plus(*n)?,
                Family::Density { p, q, floor, seed } => {
                    let plan = plan_density_family(*p, *q, *floor)?;
                    let text = fs::read_to_string(seed)
                        .map_err(|e| Failure::Input(format!("{}: {e}", seed.display())))?;
                    let seed = parse_graph(&text, ctx.format)?;
                    let fam = assemble_density_family(&plan, &seed)?;
                    eprintln!("seed: {:?}", fam.seed);
                    fam.graph
                }
            };
            if cli.json {
                ctx.print(&g)?;
            } else {
                print!("{}", to_edge_list(&g));
            }
            Ok(None)
        }
        Command::Plan { p, q, floor } => {
            ctx.print(&plan_density_family(*p, *q, *floor)?)?;
            Ok(None)
        }
        Command::Scan {
            input,
            three_edge_connected,
            timing,
        } => {
            let opts = ScanOptions {
                three_edge_connected: *three_edge_connected,
                timing: *timing,
                jobs: cli.jobs,
            };
            let format = if cli.json { RecordFormat::JsonLines } else { RecordFormat::Csv };
            let stdout = io::stdout();
            let mut out = io::BufWriter::new(stdout.lock());
            let summary = match input {
                Some(p) => {
                    let f = fs::File::open(p)
                        .map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
                    scan(BufReader::new(f), &mut out, format, &opts)?
                }
                None => scan(io::stdin().lock(), &mut out, format, &opts)?,
            };
            out.flush()?;
            let text = serde_json::to_string(&summary).map_err(|e| Failure::Bug(e.to_string()))?;
            eprintln!("{text}");
            if !summary.structure_failures.is_empty() || summary.errors > 0 {
                return Err(Failure::Bug("scan found structure failures or internal errors".into()));
            }
            Ok(None)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        // The scanner builds its own pool; this covers the per-edge searches.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match run(&cli) {
        Ok(verdict) => match (&cli.expect, verdict) {
            (Some(want), Some(got)) if *want != got => {
                eprintln!("expected {want}, got {got}");
                ExitCode::from(1)
            }
            (Some(want), None) => {
                eprintln!("--expect {want} has no verdict to compare with here");
                ExitCode::from(2)
            }
            _ => ExitCode::SUCCESS,
        },
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Bug(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(4)
        }
    }
}
