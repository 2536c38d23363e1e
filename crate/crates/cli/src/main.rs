use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use ssered::gadget::{build_gadget, GadgetMode, GadgetParams, OmegaBeta};
use ssered::graph::GraphJson;
use ssered::harness::{
    gen_planted, planted_biclique, random_hypergraph, random_regular, run_pipeline, Config, Pipeline, PlantedSseSpec,
    Report,
};
use ssered::oracles::{
    solve_dalks, solve_mbb, solve_meb, solve_min_kcut, solve_muchb, sse_decide, BipartiteJson, HypergraphJson,
    SseVerdict,
};
use ssered::rational::{self, Rational};
use ssered::reductions::{self, reduce_muchb_to_biclique};
use ssered::ug::{build_ug, UgBuildMode};
use ssered::{BipartiteGraph, Budget, Error, ExplicitHypergraph, SseInstance, WeightedGraph};

#[derive(Parser)]
#[command(
    name = "ssered",
    version,
    about = "Exact small-set-expansion reductions and their audits"
)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Enumeration budget (states per oracle call).
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance.
    Generate {
        #[command(subcommand)]
        kind: Generate,
    },
    /// Apply a reduction to an instance file.
    Reduce {
        #[command(subcommand)]
        to: Reduce,
    },
    /// Solve an instance exactly with a brute-force oracle.
    Solve {
        #[command(subcommand)]
        problem: Solve,
    },
    /// Run a pipeline from a config and emit its report.
    Verify(RunArgs),
    /// Run the decode pipeline.
    Decode(RunArgs),
    /// Run the amplification pipeline.
    Amplify(RunArgs),
    /// Re-evaluate a saved report and convert it to CSV.
    Report {
        /// Report JSON written by verify, decode or amplify.
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum Generate {
    /// Regular graph with a planted set of exact expansion.
    Planted {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_rational)]
        delta: Rational,
        #[arg(long, value_parser = parse_rational)]
        phi: Rational,
        #[arg(long, value_parser = parse_rational, default_value = "1")]
        degree: Rational,
    },
    /// Sum of random permutation graphs.
    Regular {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        perms: usize,
    },
    /// Random unit-measure hypergraph.
    Hypergraph {
        #[arg(long)]
        vertices: usize,
        #[arg(long)]
        edges: usize,
    },
    /// Bipartite graph with a planted biclique plus random edges.
    Bipartite {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        planted: usize,
        #[arg(long, value_parser = parse_rational, default_value = "1/4")]
        noise: Rational,
    },
}

#[derive(Args)]
struct Promise {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_parser = parse_rational)]
    delta: Rational,
    #[arg(long, value_parser = parse_rational, default_value = "1/4")]
    eta: Rational,
    #[arg(long, value_parser = parse_rational, default_value = "2")]
    m: Rational,
}

#[derive(Args)]
struct GadgetArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    ell: usize,
    #[arg(long, value_parser = parse_rational, default_value = "1/8")]
    eps_t: Rational,
    #[arg(long, value_parser = parse_rational, default_value = "1/10")]
    eps_v: Rational,
    #[arg(long, value_parser = parse_rational, default_value = "1/2")]
    beta: Rational,
}

#[derive(Clone, Copy, ValueEnum)]
enum DalksGadget {
    SelfLoop,
    TwoVertex,
}

#[derive(Subcommand)]
enum Reduce {
    /// SSE to min k-cut with k = δn + 1.
    Kcut(Promise),
    /// SSE to densest at-least-k subgraph.
    Dalks {
        #[command(flatten)]
        promise: Promise,
        #[arg(long, value_enum, default_value = "two-vertex")]
        gadget: DalksGadget,
    },
    /// SSE to unique games on V^R.
    Ug {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_parser = parse_rational, default_value = "1/10")]
        eps_v: Rational,
    },
    /// SSE to the uncut-bisection hypergraph gadget.
    Gadget {
        #[command(flatten)]
        args: GadgetArgs,
        /// Sample this many hyperedges instead of enumerating.
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Uncut hypergraph bisection to balanced biclique.
    Biclique {
        #[arg(long)]
        hypergraph: PathBuf,
    },
}

#[derive(Subcommand)]
enum Solve {
    /// Minimum-weight partition into exactly k nonempty blocks.
    Kcut {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Densest subgraph with at least k vertices.
    Dalks {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Decide which side of the SSE promise a graph falls on.
    Sse(Promise),
    /// Bisection maximizing the smaller of the two uncut weights.
    Muchb {
        #[arg(long)]
        hypergraph: PathBuf,
    },
    /// Maximum edge biclique.
    Meb {
        #[arg(long)]
        bipartite: PathBuf,
    },
    /// Maximum balanced biclique.
    Mbb {
        #[arg(long)]
        bipartite: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML or JSON config; defaults are used when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pipeline to run (verify only; overrides the config).
    #[arg(long)]
    pipeline: Option<String>,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    rational::parse(s).map_err(|e| e.to_string())
}

/// A graph file is either a bare graph or the output of `generate planted`.
#[derive(Deserialize)]
#[serde(untagged)]
enum GraphFile {
    Planted { graph: GraphJson },
    Plain(GraphJson),
}

#[derive(Serialize)]
struct PlantedOut {
    graph: GraphJson,
    set: Vec<usize>,
    spec: PlantedSseSpec,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Error> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

fn read_graph(path: &Path) -> Result<WeightedGraph, Error> {
    match read_json(path)? {
        GraphFile::Planted { graph } | GraphFile::Plain(graph) => WeightedGraph::from_json(&graph),
    }
}

fn read_hypergraph(path: &Path) -> Result<ExplicitHypergraph, Error> {
    ExplicitHypergraph::from_json(&read_json::<HypergraphJson>(path)?)
}

fn read_bipartite(path: &Path) -> Result<BipartiteGraph, Error> {
    BipartiteGraph::from_json(&read_json::<BipartiteJson>(path)?)
}

/// Writes to stdout, treating a closed pipe as success.
fn stdout(text: &str) -> Result<(), Error> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => stdout(&format!("{text}\n"))?,
    }
    Ok(())
}

fn emit_json(out: Option<&Path>, value: &impl Serialize) -> Result<(), Error> {
    emit(out, &serde_json::to_string_pretty(value)?)
}

fn fmt(r: &Rational) -> String {
    rational::format(r)
}

struct Ctx {
    seed: u64,
    budget: Budget,
    out: Option<PathBuf>,
}

impl Ctx {
    fn out(&self) -> Option<&Path> {
        self.out.as_deref()
    }
}

fn generate(ctx: &Ctx, kind: Generate) -> Result<(), Error> {
    match kind {
        Generate::Planted { n, delta, phi, degree } => {
            let spec = PlantedSseSpec {
                n,
                delta,
                phi,
                degree,
                seed: ctx.seed,
            };
            let (g, s) = gen_planted(&spec)?;
            emit_json(
                ctx.out(),
                &PlantedOut {
                    graph: g.to_json(),
                    set: s.to_vec(),
                    spec,
                },
            )
        }
        Generate::Regular { n, perms } => emit_json(ctx.out(), &random_regular(n, perms, ctx.seed)?.to_json()),
        Generate::Hypergraph { vertices, edges } => {
            emit_json(ctx.out(), &random_hypergraph(vertices, edges, ctx.seed)?.to_json())
        }
        Generate::Bipartite { n, planted, noise } => {
            emit_json(ctx.out(), &planted_biclique(n, planted, &noise, ctx.seed)?.to_json())
        }
    }
}

fn promise(p: &Promise) -> Result<SseInstance, Error> {
    SseInstance::new(read_graph(&p.graph)?, p.delta.clone(), p.eta.clone(), p.m.clone())
}

fn gadget_params(a: &GadgetArgs) -> Result<GadgetParams, Error> {
    GadgetParams::new(
        a.r,
        a.k,
        a.ell,
        a.eps_t.clone(),
        a.eps_v.clone(),
        OmegaBeta::new(a.beta.clone())?,
    )
}

fn reduce(ctx: &Ctx, to: Reduce) -> Result<(), Error> {
    match to {
        Reduce::Kcut(p) => {
            let r = reductions::reduce_sse_to_kcut(&promise(&p)?);
            emit_json(ctx.out(), &json!({ "graph": r.graph.to_json(), "k": r.k }))
        }
        Reduce::Dalks { promise: p, gadget } => {
            let mode = match gadget {
                DalksGadget::SelfLoop => reductions::GadgetMode::SelfLoop,
                DalksGadget::TwoVertex => reductions::GadgetMode::TwoVertex,
            };
            let r = reductions::reduce_sse_to_dalks(&promise(&p)?, mode)?;
            emit_json(
                ctx.out(),
                &json!({ "graph": r.graph.to_json(), "k": r.k, "gadget": r.gadget }),
            )
        }
        Reduce::Ug { graph, r, k, eps_v } => {
            let g = read_graph(&graph)?;
            let u = build_ug(&g, r, k, &eps_v, UgBuildMode::Exact, ctx.budget)?;
            emit_json(ctx.out(), &u.to_json())
        }
        Reduce::Gadget { args, samples } => {
            let g = read_graph(&args.graph)?;
            let mode = match samples {
                Some(count) => GadgetMode::Sample { seed: ctx.seed, count },
                None => GadgetMode::Exact,
            };
            let h = build_gadget(&g, &gadget_params(&args)?, mode, ctx.budget)?;
            emit_json(ctx.out(), &h.to_explicit(ctx.budget)?.to_json())
        }
        Reduce::Biclique { hypergraph } => {
            let g = reduce_muchb_to_biclique(&read_hypergraph(&hypergraph)?)?;
            emit_json(ctx.out(), &g.to_json())
        }
    }
}

fn solve(ctx: &Ctx, problem: Solve) -> Result<(), Error> {
    let b = ctx.budget;
    match problem {
        Solve::Kcut { graph, k } => {
            let (p, cost) = solve_min_kcut(&read_graph(&graph)?, k, b)?;
            emit_json(ctx.out(), &json!({ "blocks": p.blocks(), "cost": fmt(&cost) }))
        }
        Solve::Dalks { graph, k } => {
            let s = solve_dalks(&read_graph(&graph)?, k, b)?;
            emit_json(ctx.out(), &json!({ "set": s.set.to_vec(), "density": fmt(&s.density) }))
        }
        Solve::Sse(p) => {
            let (verdict, set, expansion) = match sse_decide(&promise(&p)?, b)? {
                SseVerdict::Completeness { witness, expansion } => ("completeness", witness, expansion),
                SseVerdict::Soundness { min_set, min_expansion } => ("soundness", min_set, min_expansion),
                SseVerdict::Neither { min_set, min_expansion } => ("neither", min_set, min_expansion),
            };
            emit_json(
                ctx.out(),
                &json!({ "verdict": verdict, "set": set.to_vec(), "expansion": fmt(&expansion) }),
            )
        }
        Solve::Muchb { hypergraph } => {
            let s = solve_muchb(&read_hypergraph(&hypergraph)?, b)?;
            emit_json(
                ctx.out(),
                &json!({
                    "t0": s.bisection.t0.to_vec(),
                    "t1": s.bisection.t1.to_vec(),
                    "uncut": [fmt(&s.uncut.0), fmt(&s.uncut.1)],
                }),
            )
        }
        Solve::Meb { bipartite } => {
            let bc = solve_meb(&read_bipartite(&bipartite)?, b)?;
            emit_json(
                ctx.out(),
                &json!({ "left": bc.left, "right": bc.right, "edges": bc.edges() }),
            )
        }
        Solve::Mbb { bipartite } => {
            let (size, bc) = solve_mbb(&read_bipartite(&bipartite)?, b)?;
            emit_json(ctx.out(), &json!({ "left": bc.left, "right": bc.right, "size": size }))
        }
    }
}

/// Loads the config, applies flag overrides and runs the pipeline.
fn run(
    cli_seed: Option<u64>,
    cli_budget: Option<u64>,
    args: &RunArgs,
    forced: Option<Pipeline>,
) -> Result<Report, Error> {
    let mut config = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::new(forced.unwrap_or(Pipeline::Kcut)),
    };
    if let Some(p) = forced {
        config.pipeline = p;
    }
    if let Some(p) = &args.pipeline {
        if forced.is_some() {
            return Err(Error::Config("--pipeline only applies to verify".into()));
        }
        config.pipeline = p.parse()?;
    }
    if let Some(s) = cli_seed {
        config.seed = s;
    }
    if let Some(b) = cli_budget {
        config.budget = b;
    }
    run_pipeline(&config)
}

/// Writes `<out>` as JSON and `<out>.csv` beside it, or the CSV to stdout.
fn emit_report(out: Option<&Path>, report: &Report) -> Result<(), Error> {
    match out {
        Some(p) => {
            std::fs::write(p, report.to_json()?)?;
            std::fs::write(p.with_extension("csv"), report.to_csv()?)?;
        }
        None => stdout(&report.to_csv()?)?,
    }
    let failed: Vec<&str> = report.failures().map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        eprintln!(
            "{}: {} rows, all asserted rows pass",
            report.pipeline,
            report.rows.len()
        );
    } else {
        eprintln!("{}: failed rows: {}", report.pipeline, failed.join(", "));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx {
        seed: cli.seed.unwrap_or(0),
        budget: cli.budget.map(|b| Budget::new(b as u128)).unwrap_or_default(),
        out: cli.out.clone(),
    };
    let result = match cli.command {
        Command::Generate { kind } => generate(&ctx, kind).map(|_| true),
        Command::Reduce { to } => reduce(&ctx, to).map(|_| true),
        Command::Solve { problem } => solve(&ctx, problem).map(|_| true),
        Command::Verify(args) => {
            run(cli.seed, cli.budget, &args, None).and_then(|r| emit_report(ctx.out(), &r).map(|_| r.all_pass()))
        }
        Command::Decode(args) => run(cli.seed, cli.budget, &args, Some(Pipeline::Decode))
            .and_then(|r| emit_report(ctx.out(), &r).map(|_| r.all_pass())),
        Command::Amplify(args) => run(cli.seed, cli.budget, &args, Some(Pipeline::Amplify))
            .and_then(|r| emit_report(ctx.out(), &r).map(|_| r.all_pass())),
        Command::Report { input } => std::fs::read_to_string(&input)
            .map_err(Error::from)
            .and_then(|s| Report::from_json(&s))
            .and_then(|r| {
                r.recheck()?;
                emit(ctx.out(), r.to_csv()?.trim_end())?;
                Ok(r.all_pass())
            }),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
