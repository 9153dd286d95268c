use std::error::Error;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use pskg::analysis::{
    analyze, compare_patterns, AnalysisConfig, Direction, PatternKind, PatternSeries, Thresholds,
};
use pskg::io::{
    read_edge_list, read_series_csv, write_edge_list, write_partition_table, write_series_csv,
    EdgeFormat, Fingerprint,
};
use pskg::{
    compute_partition, imbalance_bound, run_generation_with, EdgeList, GraphSpec, InitiatorMatrix,
    Model, SplitStrategy,
};

type Result<T> = std::result::Result<T, Box<dyn Error>>;

const EXIT_USAGE: u8 = 1;
const EXIT_RUNTIME: u8 = 2;
const EXIT_COMPARE_FAIL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "pskg",
    version,
    about = "Stochastic Kronecker graph generator and analysis toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an edge list.
    Gen(GenArgs),
    /// Print the load-balanced vertex ranges for a worker count.
    Partition(PartitionArgs),
    /// Compute graph patterns and write one CSV per pattern.
    Analyze(AnalyzeArgs),
    /// Compare the patterns of two graphs (edge lists or analyze output directories).
    Compare(CompareArgs),
    /// Confidence bound on the heaviest worker's edge count.
    Bound(BoundArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct InitiatorSource {
    /// Initiator matrix file (one row per line, whitespace separated).
    #[arg(long)]
    initiator: Option<PathBuf>,
    /// Inline initiator, rows separated by ';' and entries by ','.
    #[arg(long)]
    initiator_inline: Option<String>,
}

impl InitiatorSource {
    fn load(&self) -> Result<InitiatorMatrix> {
        match (&self.initiator, &self.initiator_inline) {
            (Some(path), _) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| format!("cannot read initiator {}: {e}", path.display()))?;
                InitiatorMatrix::parse(&text)
                    .map_err(|e| format!("initiator {}: {e}", path.display()).into())
            }
            (None, Some(inline)) => Ok(InitiatorMatrix::parse_inline(inline)?),
            (None, None) => unreachable!("clap requires one initiator source"),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Split {
    Balanced,
    Uniform,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    source: InitiatorSource,
    /// skg, skg-equiv or pskg.
    #[arg(long, default_value = "pskg")]
    model: Model,
    /// Kronecker power; the graph has n^k vertices.
    #[arg(long)]
    k: u32,
    /// Expected (pskg) or exact (skg, skg-equiv) number of edges.
    #[arg(long)]
    edges: f64,
    /// Random seed; defaults to a time-derived value that is echoed on stderr.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (pskg only); defaults to the available parallelism.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,
    #[arg(long, value_enum, default_value = "balanced")]
    split: Split,
    #[arg(long)]
    out: PathBuf,
    /// tsv or binary.
    #[arg(long, default_value = "tsv")]
    format: EdgeFormat,
}

#[derive(Args)]
struct PartitionArgs {
    #[command(flatten)]
    source: InitiatorSource,
    #[arg(long)]
    k: u32,
    #[arg(long)]
    workers: usize,
    /// Output file; the table goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct PatternArgs {
    /// Comma-separated subset of degree, hop, scree, netvalue.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "degree,hop,scree,netvalue"
    )]
    patterns: Vec<PatternKind>,
    /// Degree used for the degree distribution: in, out or total.
    #[arg(long, default_value = "out")]
    direction: Direction,
    #[arg(long, default_value_t = 2.0)]
    bin_ratio: f64,
    #[arg(long, default_value_t = 10)]
    max_hops: usize,
    /// Estimate the hop plot from this many sampled BFS sources instead of all vertices.
    #[arg(long)]
    hop_sources: Option<usize>,
    #[arg(long, default_value_t = 0)]
    hop_seed: u64,
    /// Number of singular values in the scree plot.
    #[arg(long, default_value_t = 20)]
    top_m: usize,
    /// Number of network values reported.
    #[arg(long, default_value_t = 100)]
    netvalue_top_m: usize,
}

impl PatternArgs {
    fn config(&self) -> AnalysisConfig {
        let mut patterns = self.patterns.clone();
        patterns.sort();
        patterns.dedup();
        AnalysisConfig {
            patterns,
            direction: self.direction,
            bin_ratio: self.bin_ratio,
            max_hops: self.max_hops,
            hop_sources: self.hop_sources,
            hop_seed: self.hop_seed,
            scree_top_m: self.top_m,
            netvalue_top_m: self.netvalue_top_m,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Edge list (tsv or binary, detected from the content).
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[command(flatten)]
    patterns: PatternArgs,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value_t = Thresholds::default().degree)]
    degree_threshold: f64,
    #[arg(long, default_value_t = Thresholds::default().hop)]
    hop_threshold: f64,
    #[arg(long, default_value_t = Thresholds::default().scree)]
    scree_threshold: f64,
    #[arg(long, default_value_t = Thresholds::default().netvalue)]
    netvalue_threshold: f64,
    /// Used only when the inputs are edge lists.
    #[command(flatten)]
    patterns: PatternArgs,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    edges: f64,
    #[arg(long)]
    workers: usize,
    /// Confidence level, strictly between 0 and 1.
    #[arg(long, default_value_t = 0.95)]
    alpha: f64,
}

fn time_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display()).into())
}

fn load_graph(path: &Path) -> Result<EdgeList> {
    let bytes = fs::read(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    read_edge_list(&bytes, EdgeFormat::sniff(&bytes))
        .map_err(|e| format!("{}: {e}", path.display()).into())
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let initiator = args.source.load()?;
    let seed = args.seed.unwrap_or_else(time_seed);
    let workers = match args.workers {
        Some(w) => w as usize,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let spec = GraphSpec::new(initiator, args.k, args.edges, seed, args.model, workers)?;
    let split = match args.split {
        Split::Balanced => SplitStrategy::Balanced,
        Split::Uniform => SplitStrategy::Uniform,
    };
    eprintln!(
        "effective config: gen --model {} --initiator-inline \"{}\" --k {} --edges {} --seed {} --workers {} --split {} --format {}",
        spec.model,
        spec.initiator.to_inline(),
        spec.k,
        spec.expected_edges,
        spec.seed,
        spec.workers,
        match args.split {
            Split::Balanced => "balanced",
            Split::Uniform => "uniform",
        },
        match args.format {
            EdgeFormat::Tsv => "tsv",
            EdgeFormat::Binary => "binary",
        }
    );
    let start = Instant::now();
    let graph = run_generation_with(&spec, split)?;
    let elapsed = start.elapsed();
    write_file(
        &args.out,
        &write_edge_list(&graph, args.format, Some(&Fingerprint::from(&spec))),
    )?;
    eprintln!(
        "wrote {} edges over {} vertices to {} in {:.3}s",
        graph.len(),
        graph.n_vertices,
        args.out.display(),
        elapsed.as_secs_f64()
    );
    Ok(())
}

fn cmd_partition(args: PartitionArgs) -> Result<()> {
    let initiator = args.source.load()?;
    let marginals = initiator.marginals()?;
    let table = compute_partition(&marginals, args.k, args.workers)?;
    let bytes = write_partition_table(&table);
    match &args.out {
        Some(path) => write_file(path, &bytes),
        None => {
            print!("{}", String::from_utf8_lossy(&bytes));
            Ok(())
        }
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let graph = load_graph(&args.input)?;
    let config = args.patterns.config();
    let start = Instant::now();
    let series = analyze(&graph, &config)?;
    fs::create_dir_all(&args.out_dir)
        .map_err(|e| format!("cannot create {}: {e}", args.out_dir.display()))?;
    for s in &series {
        let path = args.out_dir.join(format!("{}.csv", s.kind));
        write_file(&path, &write_series_csv(s))?;
        eprintln!("wrote {} ({} rows)", path.display(), s.points.len());
    }
    eprintln!("analysis took {:.3}s", start.elapsed().as_secs_f64());
    Ok(())
}

/// Patterns of one side: read from `<dir>/<kind>.csv` for a directory,
/// computed from the edge list otherwise.
fn load_patterns(path: &Path, config: &AnalysisConfig) -> Result<Vec<PatternSeries>> {
    if !path.is_dir() {
        return Ok(analyze(&load_graph(path)?, config)?);
    }
    let mut out = Vec::new();
    for kind in PatternKind::ALL {
        let file = path.join(format!("{kind}.csv"));
        if file.exists() {
            let bytes =
                fs::read(&file).map_err(|e| format!("cannot read {}: {e}", file.display()))?;
            out.push(
                read_series_csv(&bytes, kind).map_err(|e| format!("{}: {e}", file.display()))?,
            );
        }
    }
    if out.is_empty() {
        return Err(format!("{} contains no pattern CSVs", path.display()).into());
    }
    Ok(out)
}

fn cmd_compare(args: CompareArgs) -> Result<bool> {
    let config = args.patterns.config();
    let a = load_patterns(&args.a, &config)?;
    let b = load_patterns(&args.b, &config)?;
    let thresholds = Thresholds {
        degree: args.degree_threshold,
        hop: args.hop_threshold,
        scree: args.scree_threshold,
        netvalue: args.netvalue_threshold,
    };
    let report = compare_patterns(&a, &b, &thresholds)?;
    println!("{report}");
    Ok(report.pass())
}

fn cmd_bound(args: BoundArgs) -> Result<()> {
    let bound = imbalance_bound(args.edges, args.workers, args.alpha)?;
    println!("per_worker_mean\t{}", bound.per_worker_mean);
    println!("delta\t{}", bound.delta);
    println!("upper\t{}", bound.upper());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a).map(|_| true),
        Command::Partition(a) => cmd_partition(a).map(|_| true),
        Command::Analyze(a) => cmd_analyze(a).map(|_| true),
        Command::Compare(a) => cmd_compare(a),
        Command::Bound(a) => cmd_bound(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_COMPARE_FAIL),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
