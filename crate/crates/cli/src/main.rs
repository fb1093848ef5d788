//! `sumgames`: command-line front end.
//!
//! Exit codes: 0 when the answer is yes / the check passed, 1 when it is no
//! / a counterexample or finding was produced, 2 on usage or input errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use sumgames::figure1;
use sumgames::graph::{parse_arena, parse_graph};
use sumgames::harness::{run_campaign, CampaignConfig};
use sumgames::morphism::{compute_n, parse_assignment, phi_fixpoint, phi_paper, verify_morphism, MorphismError};
use sumgames::objective::{reduce_finocc, satisfies};
use sumgames::solver::{solve_with, Method, Seeding, SolveOptions};
use sumgames::universal::{build_fragment, check_monotonicity};
use sumgames::{is_edge, order_gt, FragmentBounds, GameArena, Graph, OrdTuple};

#[derive(Parser)]
#[command(
    name = "sumgames",
    version,
    about = "Games, universal graphs and certificates for the sum-to-infinity objective"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Does every cycle of the graph have weight >= 1?
    Satisfies {
        graph: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// n(v) = -(least weight of a non-empty path from v)
    Nvalues {
        graph: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Map a satisfying graph into the universal graph
    Phi {
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = PhiMethod::Paper)]
        method: PhiMethod,
        #[command(flatten)]
        bounds: BoundArgs,
        /// include the per-edge report
        #[arg(long)]
        report: bool,
    },
    /// Check a vertex-to-tuple assignment edge by edge
    VerifyMorphism {
        graph: PathBuf,
        assignment: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// The built-in worked example with its expected values
    Figure1 {
        #[arg(long)]
        dot: bool,
        /// recompute n and the rank tuples and compare with the expected values
        #[arg(long)]
        check: bool,
    },
    /// Compare two tuples in the order of the universal graph
    Order { left: String, right: String },
    /// Is `u -w-> u'` an edge of the universal graph?
    #[command(allow_negative_numbers = true)]
    Edge { from: String, weight: i64, to: String },
    /// Materialize a finite window of the universal graph
    Fragment {
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, conflicts_with = "json")]
        dot: bool,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive monotonicity check of a window
    Monotone {
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Difference word of a sequence of naturals
    Reduce {
        #[arg(long, allow_hyphen_values = true)]
        input: String,
    },
    /// Solve a game
    Solve {
        arena: PathBuf,
        #[arg(long, value_enum, default_value_t = SolveMethod::Energy)]
        method: SolveMethod,
        #[arg(long, conflicts_with = "dot")]
        json: bool,
        #[arg(long)]
        dot: bool,
        #[arg(long, value_enum, default_value_t = SeedingArg::Auto)]
        seeding: SeedingArg,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Certify positional determinacy over a family of small arenas
    Harness(HarnessArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PhiMethod {
    Paper,
    Fixpoint,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethod {
    Brute,
    Energy,
    Umeasure,
}

impl From<SolveMethod> for Method {
    fn from(m: SolveMethod) -> Method {
        match m {
            SolveMethod::Brute => Method::Brute,
            SolveMethod::Energy => Method::Energy,
            SolveMethod::Umeasure => Method::UMeasure,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedingArg {
    Auto,
    Never,
    Always,
}

impl From<SeedingArg> for Seeding {
    fn from(s: SeedingArg) -> Seeding {
        match s {
            SeedingArg::Auto => Seeding::Auto,
            SeedingArg::Never => Seeding::Never,
            SeedingArg::Always => Seeding::Always,
        }
    }
}

#[derive(Args)]
struct BoundArgs {
    /// window length (default from the graph)
    #[arg(long, requires = "max_coord")]
    max_len: Option<usize>,
    #[arg(long, requires = "max_len")]
    max_coord: Option<u32>,
}

impl BoundArgs {
    fn bounds(&self) -> Option<FragmentBounds> {
        Some(FragmentBounds::new(self.max_len?, self.max_coord?))
    }
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long)]
    max_len: usize,
    #[arg(long)]
    max_coord: u32,
    /// `lo..hi` or a comma separated list
    #[arg(long, allow_hyphen_values = true)]
    weights: String,
}

#[derive(Args)]
struct HarnessArgs {
    #[arg(long)]
    max_vertices: usize,
    #[arg(long, allow_hyphen_values = true)]
    weights: String,
    #[arg(long)]
    max_out_degree: usize,
    #[arg(long, conflicts_with = "random", required_unless_present = "random")]
    exhaustive: bool,
    #[arg(long)]
    random: bool,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// run this solver with cycles >= 0 accepted (mutation check)
    #[arg(long, value_enum)]
    weaken: Option<SolveMethod>,
    #[arg(long)]
    max_findings: Option<usize>,
    /// directory receiving one arena file per finding
    #[arg(long)]
    replay_dir: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = SeedingArg::Auto)]
    seeding: SeedingArg,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph> {
    parse_graph(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn load_arena(path: &Path) -> Result<GameArena> {
    parse_arena(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn tuple(text: &str) -> Result<OrdTuple> {
    text.parse().with_context(|| format!("bad tuple {text:?}"))
}

fn parse_weights(text: &str) -> Result<Vec<i64>> {
    let text = text.trim();
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: i64 = lo.trim().parse().with_context(|| format!("bad range {text:?}"))?;
        let hi: i64 = hi.trim().trim_start_matches('=').parse().with_context(|| format!("bad range {text:?}"))?;
        if lo > hi {
            bail!("empty weight range {text:?}");
        }
        return Ok((lo..=hi).collect());
    }
    let mut weights: Vec<i64> = text
        .split(',')
        .map(|w| w.trim().parse().with_context(|| format!("bad weight {w:?}")))
        .collect::<Result<_>>()?;
    weights.dedup();
    Ok(weights)
}

fn print_json(value: &Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("json values serialize"));
}

fn code(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Errors that are answers about the input rather than usage problems.
fn morphism_failure(err: &MorphismError) -> bool {
    matches!(
        err,
        MorphismError::NotSatisfying { .. } | MorphismError::NegativeCycleReachable | MorphismError::BoundExceeded(_)
    )
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Satisfies { graph, json } => {
            let g = load_graph(&graph)?;
            let verdict = satisfies(&g)?;
            if json {
                print_json(&verdict.to_json(&g));
            } else if verdict.satisfies {
                println!("satisfies");
            } else {
                let cycle: Vec<String> = verdict.witness.iter().flatten().map(|&e| describe_edge(&g, e)).collect();
                println!("violated by cycle {}", cycle.join(" "));
            }
            Ok(code(verdict.satisfies))
        }
        Command::Nvalues { graph, json } => {
            let g = load_graph(&graph)?;
            match compute_n(&g) {
                Ok(nmap) if json => print_json(&nmap.to_json(&g)),
                Ok(nmap) => {
                    for v in 0..g.vertex_count() {
                        match nmap.get(v) {
                            Some(n) => println!("{} {n}", g.id(v)),
                            None => println!("{} BOTTOM", g.id(v)),
                        }
                    }
                }
                Err(e) if morphism_failure(&e) => {
                    eprintln!("{e}");
                    return Ok(code(false));
                }
                Err(e) => return Err(e.into()),
            }
            Ok(code(true))
        }
        Command::Phi { graph, method, bounds, report } => {
            let g = load_graph(&graph)?;
            let result = match method {
                PhiMethod::Paper => phi_paper(&g),
                PhiMethod::Fixpoint => phi_fixpoint(&g, bounds.bounds()),
            };
            match result {
                Ok(m) => {
                    print_json(&if report { m.to_json_full(&g) } else { m.to_json(&g) });
                    Ok(code(m.is_valid()))
                }
                Err(e) if morphism_failure(&e) => {
                    eprintln!("{e}");
                    Ok(code(false))
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::VerifyMorphism { graph, assignment, json } => {
            let g = load_graph(&graph)?;
            let assignment = parse_assignment(&g, &read(&assignment)?)?;
            let m = verify_morphism(&g, &assignment)?;
            if json {
                print_json(&m.to_json_full(&g));
            } else {
                for check in &m.report {
                    let status = if check.holds { "ok  " } else { "FAIL" };
                    println!("{status} {} ({})", describe_edge(&g, check.edge), check.reason.describe());
                }
                println!("{} of {} edges fail", m.failures().len(), m.report.len());
            }
            Ok(code(m.is_valid()))
        }
        Command::Figure1 { dot, check } => figure1_command(dot, check),
        Command::Order { left, right } => {
            let (u, v) = (tuple(&left)?, tuple(&right)?);
            let shown = if order_gt(&u, &v) {
                ">"
            } else if order_gt(&v, &u) {
                "<"
            } else {
                "="
            };
            println!("{shown}");
            Ok(code(shown == ">"))
        }
        Command::Edge { from, weight, to } => {
            let holds = is_edge(&tuple(&from)?, weight, &tuple(&to)?);
            println!("{}", if holds { "edge" } else { "no-edge" });
            Ok(code(holds))
        }
        Command::Fragment { window, dot, json } => {
            let weights = parse_weights(&window.weights)?;
            let f = build_fragment(window.max_len, window.max_coord, &weights)?;
            if dot {
                print!("{}", f.graph.to_dot());
            } else if json {
                print_json(&f.graph.to_json());
            } else {
                println!("{} vertices, {} edges", f.graph.vertex_count(), f.graph.edge_count());
            }
            Ok(code(true))
        }
        Command::Monotone { window } => {
            let weights = parse_weights(&window.weights)?;
            let f = build_fragment(window.max_len, window.max_coord, &weights)?;
            match check_monotonicity(&f) {
                Ok(()) => {
                    println!("ok");
                    Ok(code(true))
                }
                Err(c) => {
                    println!(
                        "counterexample: u={} >= v={} -{}-> {} >= u'={} but no edge u -{}-> u'",
                        c.u, c.v, c.weight, c.v_next, c.u_next, c.weight
                    );
                    Ok(code(false))
                }
            }
        }
        Command::Reduce { input } => {
            let naturals = parse_weights(&input.replace("..", ","))?;
            let word = reduce_finocc(&naturals)?;
            let shown: Vec<String> = word.iter().map(i64::to_string).collect();
            println!("{}", shown.join(","));
            Ok(code(true))
        }
        Command::Solve { arena, method, json, dot, seeding, bounds } => {
            let a = load_arena(&arena)?;
            let options = SolveOptions { bounds: bounds.bounds(), seeding: seeding.into(), ..Default::default() };
            let s = solve_with(&a, method.into(), &options)?;
            if json {
                print_json(&s.to_json(&a));
            } else if dot {
                print!("{}", s.to_dot(&a));
            } else {
                let ids =
                    |vs: Vec<usize>| vs.into_iter().map(|v| a.graph().id(v).to_string()).collect::<Vec<_>>().join(" ");
                println!("eve:  {}", ids(s.eve_vertices()));
                println!("adam: {}", ids(s.adam_vertices()));
                for (v, choice) in s.eve_strategy.choice.iter().zip(&s.adam_strategy.choice).enumerate() {
                    if let Some(&e) = choice.0.as_ref().or(choice.1.as_ref()) {
                        println!("  {} plays {}", a.graph().id(v), describe_edge(a.graph(), e));
                    }
                }
            }
            Ok(code(true))
        }
        Command::Harness(args) => harness_command(args),
    }
}

fn describe_edge(g: &Graph, e: usize) -> String {
    let edge = g.edge(e);
    format!("{} -{}-> {}", g.id(edge.from), edge.weight, g.id(edge.to))
}

fn figure1_command(dot: bool, check: bool) -> Result<ExitCode> {
    let g = figure1::fixture();
    if dot {
        print!("{}", g.to_dot());
        return Ok(code(true));
    }
    let expected_failures = vec![
        json!({ "from": figure1::EXPECTED_FAILURE.0, "weight": figure1::EXPECTED_FAILURE.1, "to": figure1::EXPECTED_FAILURE.2 }),
    ];
    if !check {
        let n: serde_json::Map<String, Value> =
            figure1::VERTICES.iter().zip(figure1::EXPECTED_N).map(|(v, n)| (v.to_string(), json!(n))).collect();
        let tuples: serde_json::Map<String, Value> =
            figure1::VERTICES.iter().zip(figure1::EXPECTED_TUPLES).map(|(v, t)| (v.to_string(), json!(t))).collect();
        print_json(&json!({
            "graph": g.to_json(),
            "expected_n": n,
            "expected_tuples": tuples,
            "expected_failures": expected_failures,
        }));
        return Ok(code(true));
    }
    let nmap = compute_n(&g)?;
    let m = phi_paper(&g)?;
    let n_ok = (0..g.vertex_count()).all(|v| nmap.get(v) == Some(figure1::EXPECTED_N[v]));
    let tuples_ok = m.assignment.iter().zip(figure1::EXPECTED_TUPLES).all(|(t, e)| t.to_string() == e);
    let failures: Vec<Value> = m.failures().into_iter().map(|e| g.edge_json(e)).collect();
    let failures_ok = failures == expected_failures;
    let fixpoint_ok = phi_fixpoint(&g, None).map(|f| f.is_valid()).unwrap_or(false);
    print_json(&json!({
        "n_values_match": n_ok,
        "tuples_match": tuples_ok,
        "failures": failures,
        "failures_match": failures_ok,
        "fixpoint_verified": fixpoint_ok,
    }));
    Ok(code(n_ok && tuples_ok && failures_ok && fixpoint_ok))
}

fn harness_command(args: HarnessArgs) -> Result<ExitCode> {
    let weights = parse_weights(&args.weights)?;
    let mut config = if args.random {
        CampaignConfig::random(args.max_vertices, weights, args.max_out_degree, args.samples, args.seed)
    } else {
        CampaignConfig::exhaustive(args.max_vertices, weights, args.max_out_degree)
    };
    config.weakened = args.weaken.map(Method::from);
    config.max_findings = args.max_findings;
    config.workers = args.workers;
    config.seeding = args.seeding.into();
    let summary = run_campaign(&config)?;
    print_json(&summary.to_json());
    if let Some(dir) = &args.replay_dir {
        let written = summary.write_findings(dir)?;
        if !written.is_empty() {
            eprintln!("wrote {} arena files to {}", written.len(), dir.display());
        }
    }
    Ok(code(summary.findings.is_empty()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
