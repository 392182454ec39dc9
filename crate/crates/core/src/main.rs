//! Batch CLI: solve equilibria, play the repeated game, run the brute-force
//! oracle, verify stored reports, and generate instances.
//!
//! Exit codes: 0 success, 2 validation error, 3 enumeration-guard error.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use opinion_games::absorbing::{build_transition, compute_qub, equilibrium_opinions};
use opinion_games::error::RunError;
use opinion_games::game::GameInstance;
use opinion_games::graph::{generate_graph, load_graph, GraphKind, OpinionMode};
use opinion_games::harness::{
    emit_report, format_sig12, run_stackelberg, verify_report_regret, version_string,
    ReportFormat, RunConfig,
};
use opinion_games::oracle::brute_minmax;

#[derive(Parser)]
#[command(name = "opinion-games", version, about = "Competitive opinion optimization on social networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print equilibrium expressed opinions and influence weights as CSV
    Solve {
        /// Graph file
        #[arg(long)]
        graph: PathBuf,
        /// Write solution.csv into this directory instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the repeated min-vs-adversary game and write reports
    Play(PlayArgs),
    /// Brute-force minmax/maxmin report (guarded at desk scale)
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        /// Subset size shared by both players
        #[arg(long)]
        k: usize,
        /// Output directory for oracle.json
        #[arg(long)]
        out: PathBuf,
    },
    /// Recompute and verify the regret curve of a stored report
    Regret {
        /// Directory containing report.json
        #[arg(long)]
        report: PathBuf,
    },
    /// Generate a graph file
    Gen(GenArgs),
}

#[derive(Args)]
struct PlayArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Subset size shared by both players
    #[arg(long)]
    k: usize,
    /// Horizon: number of rounds
    #[arg(long = "T")]
    horizon: u64,
    /// Estimation samples per round (default: T)
    #[arg(long = "r")]
    samples: Option<u64>,
    #[arg(long)]
    seed: u64,
    /// Also compute the brute-force minmax value and the equilibrium gap
    #[arg(long)]
    gap: bool,
    /// Report formats to write
    #[arg(long, value_delimiter = ',', default_values_t = [FormatArg::Csv, FormatArg::Json])]
    format: Vec<FormatArg>,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Worker threads for the per-round sampling (results do not depend on it)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    n: usize,
    /// Edge probability, required for --kind random
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: u64,
    /// Output graph file
    #[arg(long)]
    out: PathBuf,
    /// Anchor weight given to every node
    #[arg(long, default_value_t = 1.0)]
    anchor: f64,
    /// "uniform" or "constant:<c>"
    #[arg(long, default_value = "uniform")]
    opinions: String,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl std::fmt::Display for FormatArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(ReportFormat::from(*self).name())
    }
}

impl From<FormatArg> for ReportFormat {
    fn from(value: FormatArg) -> Self {
        match value {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum)]
enum KindArg {
    Path,
    Complete,
    Random,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Solve { graph, out } => run_solve(&graph, out.as_deref()),
        Command::Play(args) => run_play(args),
        Command::Oracle { graph, k, out } => run_oracle(&graph, k, &out),
        Command::Regret { report } => run_regret(&report),
        Command::Gen(args) => run_gen(args),
    }
}

fn read_graph(path: &Path) -> Result<(opinion_games::WeightedGraph, opinion_games::OpinionVector), RunError> {
    let text =
        fs::read_to_string(path).map_err(|source| RunError::Io { path: path.into(), source })?;
    Ok(load_graph(&text)?)
}

fn run_solve(graph_path: &Path, out: Option<&Path>) -> Result<(), RunError> {
    let (graph, s) = read_graph(graph_path)?;
    let model = compute_qub(build_transition(&graph))?;
    let z = equilibrium_opinions(&model, &s)?;

    let mut csv = String::from("node,z,ell\n");
    for i in 0..graph.n() {
        csv.push_str(&format!(
            "{},{},{}\n",
            i + 1,
            format_sig12(z.values()[i]),
            format_sig12(model.ell()[i]),
        ));
    }
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|source| RunError::Io { path: dir.into(), source })?;
            let path = dir.join("solution.csv");
            fs::write(&path, csv).map_err(|source| RunError::Io { path: path.clone(), source })?;
            println!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn run_play(args: PlayArgs) -> Result<(), RunError> {
    let config = RunConfig {
        graph_path: args.graph,
        k: args.k,
        horizon: args.horizon,
        samples: args.samples,
        seed: args.seed,
        output_dir: args.out,
        formats: args.format.iter().map(|&f| ReportFormat::from(f)).collect::<BTreeSet<_>>(),
        compute_gap: args.gap,
    };
    if let Some(warning) = config.sampling_cost_warning() {
        eprintln!("warning: {warning}");
    }

    let report = match args.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| RunError::InvalidConfig(format!("thread pool: {e}")))?;
            pool.install(|| run_stackelberg(&config))?
        }
        None => run_stackelberg(&config)?,
    };

    for path in emit_report(&report, &config.formats, &config.output_dir)? {
        println!("wrote {}", path.display());
    }
    println!(
        "T_min = {}, output strategy = {{{}}}",
        report.t_min,
        report.output_strategy.id_string()
    );
    if let Some(last) = report.regret_curve.last() {
        println!(
            "cumulative regret after T = {} rounds: {}",
            config.horizon,
            format_sig12(*last)
        );
    }
    if let Some(gap) = report.gap {
        println!(
            "minmax = {}, gap = {}, gap_plus = {}",
            format_sig12(gap.minmax_value),
            format_sig12(gap.gap),
            format_sig12(gap.gap_plus),
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct OracleDoc {
    graph_path: String,
    k: usize,
    version: String,
    minmax_value: f64,
    argmin_x: String,
    maxmin_value: f64,
    per_x_table: Vec<OracleRow>,
}

#[derive(Serialize)]
struct OracleRow {
    x: String,
    worst_case_cost: f64,
}

fn run_oracle(graph_path: &Path, k: usize, out: &Path) -> Result<(), RunError> {
    let (graph, s) = read_graph(graph_path)?;
    let inst = GameInstance::new(graph, s, k)?;
    let result = brute_minmax(&inst)?;

    let doc = OracleDoc {
        graph_path: graph_path.display().to_string(),
        k,
        version: version_string(),
        minmax_value: result.minmax_value,
        argmin_x: result.argmin_x.id_string(),
        maxmin_value: result.maxmin_value,
        per_x_table: result
            .per_x_table
            .iter()
            .map(|(subset, &cost)| OracleRow {
                x: opinion_games::game::subset_id_string(&subset.iter().copied().collect()),
                worst_case_cost: cost,
            })
            .collect(),
    };
    fs::create_dir_all(out).map_err(|source| RunError::Io { path: out.into(), source })?;
    let path = out.join("oracle.json");
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| RunError::Report(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text).map_err(|source| RunError::Io { path: path.clone(), source })?;
    println!("wrote {}", path.display());
    println!(
        "minmax = {} at x = {{{}}}, maxmin = {}",
        format_sig12(result.minmax_value),
        result.argmin_x.id_string(),
        format_sig12(result.maxmin_value),
    );
    Ok(())
}

fn run_regret(report_dir: &Path) -> Result<(), RunError> {
    let verification = verify_report_regret(report_dir)?;
    if verification.ok() {
        println!(
            "regret curve verified: {} rounds, max |difference| = {:e}",
            verification.rounds, verification.max_abs_diff
        );
        Ok(())
    } else {
        Err(RunError::Report(format!(
            "stored regret curve diverges from recomputation at t = {} (max |difference| = {:e})",
            verification.first_mismatch.unwrap(),
            verification.max_abs_diff
        )))
    }
}

fn run_gen(args: GenArgs) -> Result<(), RunError> {
    let kind = match args.kind {
        KindArg::Path => GraphKind::Path,
        KindArg::Complete => GraphKind::Complete,
        KindArg::Random => {
            let p = args.p.ok_or_else(|| {
                RunError::InvalidConfig("--kind random needs an edge probability --p".into())
            })?;
            GraphKind::Random { p }
        }
    };
    let opinions = parse_opinion_mode(&args.opinions)?;
    let (graph, s) = generate_graph(kind, args.n, args.seed, args.anchor, opinions)?;

    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|source| RunError::Io { path: parent.into(), source })?;
        }
    }
    fs::write(&args.out, graph.serialize(&s))
        .map_err(|source| RunError::Io { path: args.out.clone(), source })?;
    println!("wrote {} ({} nodes, {} edges)", args.out.display(), graph.n(), graph.edge_count());
    Ok(())
}

fn parse_opinion_mode(text: &str) -> Result<OpinionMode, RunError> {
    if text == "uniform" {
        return Ok(OpinionMode::UniformRandom);
    }
    if let Some(value) = text.strip_prefix("constant:") {
        let c: f64 = value.parse().map_err(|_| {
            RunError::InvalidConfig(format!("bad constant opinion {value:?}"))
        })?;
        return Ok(OpinionMode::Constant(c));
    }
    Err(RunError::InvalidConfig(format!(
        "bad --opinions {text:?}; expected \"uniform\" or \"constant:<c>\""
    )))
}
