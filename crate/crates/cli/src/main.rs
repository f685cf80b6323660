//! `kps`: validate designs, build key predistribution schemes and report
//! their metrics.
//!
//! Exit codes: 0 success, 1 validation failure or negative verdict,
//! 2 parse or configuration error, 3 search budget exhausted.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use kps_core::catalog;
use kps_core::decompose::{
    pair_clique_decomposition, point_clique_decomposition, verify_decomposition,
    CliqueDecomposition,
};
use kps_core::design::{check_g_design, intersection_profile, validate_bibd, Design};
use kps_core::graph::{check_srg, design_graph, Graph};
use kps_core::hierarchy::{build_classical_kps, build_group_kps, compare, GroupPlan};
use kps_core::io;
use kps_core::mar::{
    extract_design_with_budget, nr_lower_bound, run_mar, ExtractError, ExtractFailure, MarConfig,
    DEFAULT_PARTITION_BUDGET,
};
use kps_core::math::format_rational;
use kps_core::metrics::{evaluate, DEFAULT_EXACT_CAP, DEFAULT_SEED};
use kps_core::report;
use kps_core::search::{brute_force_search, SearchError};
use kps_core::strategy::StrategyRegistry;
use kps_core::target::{classical_target, hierarchical_target, matched_pairs_target};
use kps_core::{KeyAssignment, NrMode, TargetGraph};

const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

#[derive(Parser)]
#[command(
    name = "kps",
    version,
    about = "Combinatorial-design key predistribution toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliqueKind {
    /// One clique per point pair (g = 2 designs).
    Pair,
    /// One clique per point (lambda = 1 designs).
    Point,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    /// version,label,dcc,dicc,apl,so_max,so_mean,ns,nr_mode,seed,nr
    Csv,
    /// x,nr,nr_float
    NrTable,
}

#[derive(clap::Args)]
struct NrArgs {
    /// Capture counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    x: Vec<usize>,
    #[arg(long, value_enum, default_value = "exact")]
    mode: Mode,
    /// Monte-carlo trials per capture count.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Largest number of capture sets exact mode may enumerate.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    cap: u128,
}

impl NrArgs {
    fn mode(&self) -> NrMode {
        match self.mode {
            Mode::Exact => NrMode::Exact { cap: self.cap },
            Mode::MonteCarlo => NrMode::MonteCarlo {
                trials: self.trials,
                seed: self.seed,
            },
        }
    }
}

#[derive(Subcommand)]
enum TargetKind {
    /// Every pair may connect.
    Classical { n: usize },
    /// `s` groups of `b0` nodes; the first `tau0` of each group are central.
    Hierarchical { s: usize, b0: usize, tau0: usize },
    /// Nodes `i` and `i + pairs` are forbidden, all other pairs required.
    MatchedPairs { pairs: usize },
}

#[derive(Subcommand)]
enum Command {
    /// Check that a design file is a BIBD and report its block intersections.
    Validate { design: PathBuf },
    /// Write a built-in design: stanton, fano, projective:<q>, affine:<q>.
    Catalog {
        name: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Write a target graph.
    Target {
        #[command(subcommand)]
        kind: TargetKind,
        #[arg(short, long, global = true)]
        out: Option<PathBuf>,
    },
    /// Write the block intersection graph of a design.
    DesignGraph {
        design: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Report strongly regular parameters of a graph.
    CheckSrg { graph: PathBuf },
    /// Split a design graph into edge-disjoint cliques.
    Decompose {
        design: PathBuf,
        #[arg(long, value_enum)]
        kind: CliqueKind,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Recover a Steiner system from a graph made of edge-disjoint r-cliques.
    ExtractDesign {
        graph: PathBuf,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = DEFAULT_PARTITION_BUDGET)]
        budget: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build a key assignment whose design graph equals a given graph.
    Mar {
        /// Graph to realise.
        #[arg(long, conflicts_with = "target", required_unless_present = "target")]
        graph: Option<PathBuf>,
        /// Target whose must-graph is realised.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        c0: usize,
        #[arg(long, default_value = "greedy-largest")]
        strategy: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Clique list for the guided strategy, one clique per line.
        #[arg(long, conflicts_with = "guide_design")]
        guide: Option<PathBuf>,
        /// Design whose pair cliques (g = 2) or point cliques (lambda = 1) guide the run.
        #[arg(long)]
        guide_design: Option<PathBuf>,
        /// Capture counts for the printed resiliency bound.
        #[arg(long, value_delimiter = ',', default_value = "1")]
        x: Vec<usize>,
        #[arg(long)]
        assignment_out: Option<PathBuf>,
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Evaluate an assignment against a target.
    Metrics {
        assignment: PathBuf,
        target: PathBuf,
        #[command(flatten)]
        nr: NrArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long, default_value = "kps")]
        label: String,
    },
    /// Compare two assignments on one target (CSV: two report rows and a delta row).
    Compare {
        graph_based: PathBuf,
        classical: PathBuf,
        target: PathBuf,
        #[command(flatten)]
        nr: NrArgs,
    },
    /// Build and compare a grouped scheme and a single-design baseline from a config file.
    ///
    /// Keys: s, b0, tau0, group, central, classical, x, mode, trials, seed,
    /// budget. Design values are catalog names, `search:<lambda>,<k>,<v>`, or
    /// paths to design files.
    Scenario {
        config: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Backtracking search for a (lambda, k, v)-BIBD.
    Search {
        lambda: usize,
        k: usize,
        v: usize,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// List the registered clique strategies.
    Strategies,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

type Outcome = Result<(), Failure>;

trait ExitCodeExt<T> {
    fn code(self, code: u8) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> ExitCodeExt<T> for Result<T, E> {
    fn code(self, code: u8) -> Result<T, Failure> {
        self.map_err(|e| Failure {
            code,
            error: e.into(),
        })
    }
}

const VALIDATION: u8 = 1;
const INPUT: u8 = 2;
const BUDGET: u8 = 3;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .code(INPUT)
}

fn parsed<T>(path: &Path, parse: impl Fn(&str) -> Result<T, io::ParseError>) -> Result<T, Failure> {
    let text = read(path)?;
    parse(&text)
        .with_context(|| format!("in {}", path.display()))
        .code(INPUT)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))
            .code(INPUT),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn search_failure(e: SearchError) -> Failure {
    let code = match e {
        SearchError::BudgetExhausted { .. } => BUDGET,
        SearchError::Params(_) | SearchError::Exhausted => VALIDATION,
    };
    Failure {
        code,
        error: e.into(),
    }
}

fn cmd_validate(path: &Path) -> Outcome {
    let design = parsed(path, io::parse_design)?;
    let params = validate_bibd(&design).code(VALIDATION)?;
    let verdict = match check_g_design(&design) {
        Some(g) => format!("g-design g={g}"),
        None => "not a g-design".to_string(),
    };
    println!("{params}, {verdict}");
    let histogram = intersection_profile(&design)
        .histogram()
        .iter()
        .map(|(size, count)| format!("{size}:{count}"))
        .collect::<Vec<_>>()
        .join(" ");
    println!("intersections {histogram}");
    Ok(())
}

fn cmd_check_srg(path: &Path) -> Outcome {
    let graph = parsed(path, io::parse_graph)?;
    match check_srg(&graph) {
        Some(cert) => {
            println!("{cert}");
            Ok(())
        }
        None => {
            println!("not strongly regular");
            Err(Failure {
                code: VALIDATION,
                error: anyhow!("graph is not strongly regular"),
            })
        }
    }
}

fn write_cliques(cliques: &[Vec<usize>]) -> String {
    cliques
        .iter()
        .map(|c| {
            let mut line = c
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            line.push('\n');
            line
        })
        .collect()
}

fn parse_cliques(text: &str) -> Result<Vec<Vec<usize>>, io::ParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.split_whitespace()
                .map(|t| {
                    t.parse().map_err(|_| io::ParseError {
                        line: i + 1,
                        message: format!("expected node, found `{t}`"),
                    })
                })
                .collect()
        })
        .collect()
}

fn decompose(design: &Design, kind: CliqueKind) -> Result<CliqueDecomposition, Failure> {
    let (dec, _) = match kind {
        CliqueKind::Pair => pair_clique_decomposition(design),
        CliqueKind::Point => point_clique_decomposition(design),
    }
    .code(VALIDATION)?;
    Ok(dec)
}

fn cmd_decompose(path: &Path, kind: CliqueKind, out: &Option<PathBuf>) -> Outcome {
    let design = parsed(path, io::parse_design)?;
    let dec = decompose(&design, kind)?;
    verify_decomposition(&design_graph(&design), &dec).code(VALIDATION)?;
    let sizes: Vec<usize> = dec.cliques.iter().map(Vec::len).collect();
    let (lo, hi) = (
        sizes.iter().min().copied().unwrap_or(0),
        sizes.iter().max().copied().unwrap_or(0),
    );
    let size = if lo == hi {
        lo.to_string()
    } else {
        format!("{lo}..{hi}")
    };
    emit(out, &write_cliques(&dec.cliques))?;
    if out.is_some() {
        println!("cliques={} size={size} verified", dec.cliques.len());
    }
    Ok(())
}

fn cmd_extract(path: &Path, r: usize, budget: u64, out: &Option<PathBuf>) -> Outcome {
    let graph = parsed(path, io::parse_graph)?;
    let design = extract_design_with_budget(&graph, r, budget).map_err(|e| {
        let code = match e {
            ExtractError::NotDecomposable(ExtractFailure::BudgetExhausted(_)) => BUDGET,
            _ => VALIDATION,
        };
        Failure {
            code,
            error: e.into(),
        }
    })?;
    emit(out, &io::write_design(&design))?;
    if out.is_some() {
        let params = validate_bibd(&design).code(VALIDATION)?;
        println!("{params}");
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_mar(
    graph: &Option<PathBuf>,
    target: &Option<PathBuf>,
    c0: usize,
    strategy: &str,
    seed: u64,
    guide: Option<Vec<Vec<usize>>>,
    xs: &[usize],
    assignment_out: &Option<PathBuf>,
    trace_out: &Option<PathBuf>,
) -> Outcome {
    let gc = match (graph, target) {
        (Some(g), _) => parsed(g, io::parse_graph)?,
        (None, Some(t)) => parsed(t, io::parse_target)?.must,
        (None, None) => unreachable!("clap requires --graph or --target"),
    };
    let mut config = MarConfig::new(c0, strategy).with_seed(seed);
    config.guide = guide.unwrap_or_default();
    let (assignment, trace) = run_mar(&gc, &config).code(INPUT)?;
    if let Some(path) = assignment_out {
        emit(&Some(path.clone()), &io::write_assignment(&assignment))?;
    }
    if let Some(path) = trace_out {
        emit(&Some(path.clone()), &io::write_trace(&trace))?;
    }
    let sizes: Vec<usize> = assignment.rings().iter().map(Vec::len).collect();
    let (lo, hi) = (
        *sizes.iter().min().expect("graph has nodes"),
        *sizes.iter().max().expect("graph has nodes"),
    );
    let ring = if lo == hi {
        lo.to_string()
    } else {
        format!("{lo}..{hi}")
    };
    let mut line = format!(
        "keys={} ring={ring} steps={}",
        assignment.key_count(),
        trace.steps.len()
    );
    if gc.edge_count() > 0 {
        for &x in xs {
            let bound = nr_lower_bound(gc.max_degree(), c0, gc.edge_count(), x);
            line.push_str(&format!(" bound(x={x})={}", format_rational(&bound)));
        }
    }
    println!("{line}");
    Ok(())
}

fn check_nodes(a: &KeyAssignment, t: &TargetGraph) -> Outcome {
    if a.node_count() != t.node_count() {
        return Err(Failure {
            code: INPUT,
            error: anyhow!(
                "assignment has {} nodes but the target has {}",
                a.node_count(),
                t.node_count()
            ),
        });
    }
    Ok(())
}

fn cmd_metrics(a: &Path, t: &Path, nr: &NrArgs, format: Format, label: &str) -> Outcome {
    let a = parsed(a, io::parse_assignment)?;
    let t = parsed(t, io::parse_target)?;
    check_nodes(&a, &t)?;
    let r = evaluate(&a, &t, &nr.x, nr.mode()).code(INPUT)?;
    let text = match format {
        Format::Text => report::render_text(label, &r),
        Format::Csv => report::render_csv(label, &r),
        Format::NrTable => report::render_nr_table(&r),
    };
    print!("{text}");
    Ok(())
}

fn cmd_compare(g: &Path, c: &Path, t: &Path, nr: &NrArgs) -> Outcome {
    let g = parsed(g, io::parse_assignment)?;
    let c = parsed(c, io::parse_assignment)?;
    let t = parsed(t, io::parse_target)?;
    check_nodes(&g, &t)?;
    check_nodes(&c, &t)?;
    let r = compare(&g, &c, &t, &nr.x, nr.mode()).code(INPUT)?;
    print!("{}", report::render_comparison_csv(&r));
    Ok(())
}

struct Config {
    path: PathBuf,
    values: BTreeMap<String, String>,
}

impl Config {
    fn missing(&self, key: &str) -> Failure {
        Failure {
            code: INPUT,
            error: anyhow!("{}: missing key `{key}`", self.path.display()),
        }
    }

    fn raw(&self, key: &str) -> Result<&str, Failure> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| self.missing(key))
    }

    fn number<T: std::str::FromStr>(&self, key: &str, default: Option<T>) -> Result<T, Failure> {
        let Some(v) = self.values.get(key) else {
            return default.ok_or_else(|| self.missing(key));
        };
        v.parse()
            .map_err(|_| anyhow!("{}: `{key}` is not a number: `{v}`", self.path.display()))
            .code(INPUT)
    }

    fn design(&self, key: &str, budget: u64) -> Result<Design, Failure> {
        let value = self.raw(key)?;
        if let Some(found) = catalog::by_name(value) {
            return found.code(INPUT);
        }
        if let Some(spec) = value.strip_prefix("search:") {
            let nums: Vec<usize> = spec
                .split(',')
                .map(|t| t.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| anyhow!("`{key}`: expected search:<lambda>,<k>,<v>"))
                .code(INPUT)?;
            let [lambda, k, v] = nums[..] else {
                return Err(anyhow!("`{key}`: expected search:<lambda>,<k>,<v>")).code(INPUT);
            };
            return brute_force_search(lambda, k, v, budget).map_err(search_failure);
        }
        let base = self.path.parent().unwrap_or(Path::new("."));
        parsed(&base.join(value), io::parse_design)
    }
}

fn cmd_scenario(path: &Path, out: &Option<PathBuf>) -> Outcome {
    let values = parsed(path, io::parse_config)?;
    let cfg = Config {
        path: path.to_path_buf(),
        values,
    };
    let budget = cfg.number("budget", Some(DEFAULT_SEARCH_BUDGET))?;
    let plan = GroupPlan {
        s: cfg.number("s", None)?,
        b0: cfg.number("b0", None)?,
        tau0: cfg.number("tau0", None)?,
        group_design: cfg.design("group", budget)?,
        central_design: cfg.design("central", budget)?,
    };
    let graph_based = build_group_kps(&plan).code(INPUT)?;
    let classical =
        build_classical_kps(plan.node_count(), &cfg.design("classical", budget)?).code(INPUT)?;
    let target = hierarchical_target(plan.s, plan.b0, plan.tau0).code(INPUT)?;
    let xs: Vec<usize> = cfg
        .values
        .get("x")
        .map_or("1", String::as_str)
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| anyhow!("`x` must be a comma-separated list of numbers"))
        .code(INPUT)?;
    let mode = match cfg.values.get("mode").map(String::as_str) {
        None | Some("exact") => NrMode::Exact {
            cap: cfg.number("cap", Some(DEFAULT_EXACT_CAP))?,
        },
        Some("monte-carlo") => NrMode::MonteCarlo {
            trials: cfg.number("trials", Some(10_000))?,
            seed: cfg.number("seed", Some(DEFAULT_SEED))?,
        },
        Some(other) => return Err(anyhow!("unknown mode `{other}`")).code(INPUT),
    };
    let r = compare(&graph_based, &classical, &target, &xs, mode).code(INPUT)?;
    emit(out, &report::render_comparison_csv(&r))
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { design } => cmd_validate(&design),
        Command::Catalog { name, out } => {
            let design = catalog::by_name(&name)
                .ok_or_else(|| anyhow!("unknown catalog design `{name}`"))
                .code(INPUT)?
                .code(INPUT)?;
            emit(&out, &io::write_design(&design))
        }
        Command::Target { kind, out } => {
            let t = match kind {
                TargetKind::Classical { n } => classical_target(n),
                TargetKind::Hierarchical { s, b0, tau0 } => hierarchical_target(s, b0, tau0),
                TargetKind::MatchedPairs { pairs } => matched_pairs_target(pairs),
            }
            .code(INPUT)?;
            emit(&out, &io::write_target(&t))
        }
        Command::DesignGraph { design, out } => {
            let g: Graph = design_graph(&parsed(&design, io::parse_design)?);
            emit(&out, &io::write_graph(&g))?;
            if out.is_some() {
                println!("nodes={} edges={}", g.node_count(), g.edge_count());
            }
            Ok(())
        }
        Command::CheckSrg { graph } => cmd_check_srg(&graph),
        Command::Decompose { design, kind, out } => cmd_decompose(&design, kind, &out),
        Command::ExtractDesign {
            graph,
            r,
            budget,
            out,
        } => cmd_extract(&graph, r, budget, &out),
        Command::Mar {
            graph,
            target,
            c0,
            strategy,
            seed,
            guide,
            guide_design,
            x,
            assignment_out,
            trace_out,
        } => {
            let guide = match (guide, guide_design) {
                (Some(path), _) => Some(parsed(&path, parse_cliques)?),
                (None, Some(path)) => {
                    let design = parsed(&path, io::parse_design)?;
                    let kind = if check_g_design(&design) == Some(2) {
                        CliqueKind::Pair
                    } else {
                        CliqueKind::Point
                    };
                    Some(decompose(&design, kind)?.cliques)
                }
                (None, None) => None,
            };
            cmd_mar(
                &graph,
                &target,
                c0,
                &strategy,
                seed,
                guide,
                &x,
                &assignment_out,
                &trace_out,
            )
        }
        Command::Metrics {
            assignment,
            target,
            nr,
            format,
            label,
        } => cmd_metrics(&assignment, &target, &nr, format, &label),
        Command::Compare {
            graph_based,
            classical,
            target,
            nr,
        } => cmd_compare(&graph_based, &classical, &target, &nr),
        Command::Scenario { config, out } => cmd_scenario(&config, &out),
        Command::Search {
            lambda,
            k,
            v,
            budget,
            out,
        } => {
            let design = brute_force_search(lambda, k, v, budget).map_err(search_failure)?;
            emit(&out, &io::write_design(&design))
        }
        Command::Strategies => {
            for name in StrategyRegistry::with_builtin().names() {
                println!("{name}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
