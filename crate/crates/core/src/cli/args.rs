use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::{CliError, CliResult};
use crate::distances::Distance;
use crate::index::{IndexConfig, DEFAULT_FANOUT, DEFAULT_PACK};
use crate::matcher::Algorithm;
use crate::sequences::DataFormat;
use crate::transforms::{Transform, TransformKind};
use crate::windowing::WindowingKind;

#[derive(Debug, Clone, Parser)]
#[command(
    name = "tsmatch",
    version,
    about = "Exact subsequence matching over time series collections"
)]
#[command(args_override_self = true)]
pub struct Cli {
    /// Plain-text `key = value` settings; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Build and save a subsequence index.
    BuildIndex(BuildArgs),
    /// Report every placement within epsilon of each query.
    RangeQuery(RangeArgs),
    /// Report the k nearest placements of each query.
    KnnQuery(KnnArgs),
    /// Tightness of lower bounds for transforms and DTW bounds.
    TlbBench(TlbArgs),
    /// Candidate and result counts across window sizes.
    WindowBench(WindowBenchArgs),
    /// Cluster windows into symbols and mine repeated patterns.
    MotifDiscover(MotifArgs),
    /// Run the built-in property suites on seeded random data.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    /// Whitespace separated values, one sequence per line.
    Ucr,
    Csv,
}

impl From<FormatArg> for DataFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Ucr => DataFormat::UcrWhitespace,
            FormatArg::Csv => DataFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WindowingArg {
    Sliding,
    Disjoint,
    JSliding,
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Dataset file.
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Ucr)]
    pub format: FormatArg,
    /// First field of each line is a class label.
    #[arg(long)]
    pub labeled: bool,
}

impl DataArgs {
    pub fn require_input(&self) -> CliResult<&PathBuf> {
        self.input
            .as_ref()
            .ok_or_else(|| CliError::MissingRequired("--input <FILE>".into()))
    }
}

#[derive(Debug, Clone, Args)]
pub struct IndexArgs {
    /// Dimensionality reduction applied to each window.
    #[arg(long, value_parser = parse_transform_kind)]
    pub transform: Option<TransformKind>,
    /// PAA frames or number of retained coefficients.
    #[arg(long)]
    pub coeffs: Option<usize>,
    /// Window length ω.
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long, value_enum)]
    pub windowing: Option<WindowingArg>,
    /// Sliding factor J for j-sliding windows.
    #[arg(long)]
    pub factor: Option<usize>,
    /// Consecutive windows per MBR.
    #[arg(long)]
    pub pack: Option<usize>,
    #[arg(long)]
    pub fanout: Option<usize>,
    /// Scan MBRs linearly instead of through the tree.
    #[arg(long)]
    pub no_tree: bool,
}

fn parse_transform_kind(s: &str) -> Result<TransformKind, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_distance(s: &str) -> Result<Distance, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_transform(s: &str) -> Result<Transform, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

impl IndexArgs {
    fn any_set(&self) -> bool {
        self.transform.is_some()
            || self.coeffs.is_some()
            || self.window.is_some()
            || self.windowing.is_some()
            || self.factor.is_some()
            || self.pack.is_some()
            || self.fanout.is_some()
    }

    /// Index configuration with defaults: PAA with 4 frames, ω = 16,
    /// sliding windows.
    pub fn to_config(&self) -> CliResult<IndexConfig> {
        let window = self.window.unwrap_or(16);
        let kind = self.transform.unwrap_or(TransformKind::Paa);
        let coeffs = self.coeffs.unwrap_or(4);
        let windowing = match (self.windowing.unwrap_or(WindowingArg::Sliding), self.factor) {
            (WindowingArg::JSliding, Some(j)) => WindowingKind::JSliding(j),
            (WindowingArg::JSliding, None) => {
                return Err(CliError::MissingRequired(
                    "--factor <J> for --windowing j-sliding".into(),
                ))
            }
            (other, Some(_)) => {
                return Err(CliError::ConflictingOptions(format!(
                    "--factor only applies to j-sliding windows, not {other:?}"
                )))
            }
            (WindowingArg::Sliding, None) => WindowingKind::Sliding,
            (WindowingArg::Disjoint, None) => WindowingKind::Disjoint,
        };
        let mut cfg = IndexConfig::new(Transform::new(kind, coeffs), window, windowing)
            .with_pack(self.pack.unwrap_or(DEFAULT_PACK));
        cfg.fanout = self.fanout.unwrap_or(DEFAULT_FANOUT);
        cfg.use_tree = !self.no_tree;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub index: IndexArgs,
    /// Where to write the index.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Saved index; otherwise one is built from the index flags.
    #[arg(long = "index", id = "index_file", value_name = "FILE")]
    pub index_file: Option<PathBuf>,
    #[command(flatten)]
    pub index: IndexArgs,
    /// Query sequences, one per line, in the dataset format.
    #[arg(long, value_name = "FILE")]
    pub query: Option<PathBuf>,
    /// Use a data subsequence as the query: SEQ:START:LEN.
    #[arg(long, value_name = "SEQ:START:LEN")]
    pub query_from: Option<String>,
    /// Exhaustive scan instead of the index.
    #[arg(long)]
    pub brute_force: bool,
    /// Re-score Euclidean results with another distance, e.g. dtw:sakoe:4.
    #[arg(long, value_parser = parse_distance)]
    pub rescore: Option<Distance>,
    /// Per-query statistics as CSV.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RangeArgs {
    #[command(flatten)]
    pub query: QueryArgs,
    /// Distance tolerance ε.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// frm, dualmatch or generalmatch (default: implied by the index).
    #[arg(long, value_parser = parse_algorithm)]
    pub algorithm: Option<Algorithm>,
}

#[derive(Debug, Clone, Args)]
pub struct KnnArgs {
    #[command(flatten)]
    pub query: QueryArgs,
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SyntheticArgs {
    /// Random-walk sequences generated when no input is given.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Length of each generated sequence.
    #[arg(long, default_value_t = 256)]
    pub length: usize,
}

#[derive(Debug, Clone, Args)]
pub struct TlbArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub synthetic: SyntheticArgs,
    /// Sampled pairs per configuration.
    #[arg(long, default_value_t = 1000)]
    pub pairs: usize,
    /// Length of the compared subsequences (default: shortest sequence).
    #[arg(long)]
    pub pair_len: Option<usize>,
    /// Comma separated bounds: identity, paa:N, dft:K, dct:K, haar:K,
    /// lb_kim, lb_yi, lb_keogh:R, lb_paa:N:R.
    #[arg(
        long,
        default_value = "identity,paa:8,dft:8,dct:8,haar:8,lb_kim,lb_yi,lb_keogh:4,lb_paa:8:4"
    )]
    pub bounds: String,
    /// CSV report path (default: stdout).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct WindowBenchArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub synthetic: SyntheticArgs,
    /// Query sequences; otherwise random walks are generated.
    #[arg(long, value_name = "FILE")]
    pub query: Option<PathBuf>,
    /// Number of generated queries.
    #[arg(long, default_value_t = 5)]
    pub queries: usize,
    #[arg(long, default_value_t = 64)]
    pub query_len: usize,
    /// Fixed ε for every query.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
    /// Otherwise ε is this percentile of each query's placement distances.
    #[arg(long, default_value_t = 1.0)]
    pub percentile: f64,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub windows: Vec<usize>,
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm, default_value = "frm,dualmatch,generalmatch")]
    pub algorithms: Vec<Algorithm>,
    #[arg(long, value_parser = parse_transform, default_value = "paa:4")]
    pub transform: Transform,
    #[arg(long, default_value_t = DEFAULT_PACK)]
    pub pack: usize,
    /// GeneralMatch uses J = ω / divisor.
    #[arg(long, default_value_t = 4)]
    pub divisor: usize,
    /// CSV report path (default: stdout).
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct MotifArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 16)]
    pub window: usize,
    #[arg(long, default_value_t = 8)]
    pub clusters: usize,
    /// Pattern length in symbols.
    #[arg(long, default_value_t = 3)]
    pub motif_len: usize,
    #[arg(long, default_value_t = 2)]
    pub min_count: usize,
    /// Cluster raw windows instead of z-normalized ones.
    #[arg(long)]
    pub no_normalize: bool,
    /// Count only non-overlapping occurrences within a sequence.
    #[arg(long)]
    pub no_overlap: bool,
    /// Predefined primitive shapes, one per line; skips k-means.
    #[arg(long, value_name = "FILE")]
    pub centroids: Option<PathBuf>,
    #[arg(long, default_value_t = crate::motifs::MAX_ITERATIONS)]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SelfcheckArgs {
    /// Random instances per suite.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// Inflate every lower bound by 1%, which must make the run fail.
    #[arg(long)]
    pub break_bound: bool,
}

fn conflict(msg: impl Into<String>) -> CliError {
    CliError::ConflictingOptions(msg.into())
}

fn check_eps(eps: Option<f64>) -> CliResult<()> {
    match eps {
        Some(e) if e.is_nan() || e < 0.0 => Err(conflict(format!("epsilon must be >= 0, got {e}"))),
        _ => Ok(()),
    }
}

impl QueryArgs {
    fn validate(&self) -> CliResult<()> {
        self.data.require_input()?;
        match (&self.query, &self.query_from) {
            (Some(_), Some(_)) => return Err(conflict("use either --query or --query-from")),
            (None, None) => {
                return Err(CliError::MissingRequired(
                    "--query <FILE> or --query-from <SEQ:START:LEN>".into(),
                ))
            }
            _ => {}
        }
        if self.index_file.is_some() && self.index.any_set() {
            return Err(conflict("index flags cannot be combined with --index"));
        }
        if self.brute_force && (self.index_file.is_some() || self.index.any_set()) {
            return Err(conflict("--brute-force does not use an index"));
        }
        if self.index_file.is_none() && !self.brute_force {
            self.index.to_config()?;
        }
        Ok(())
    }
}

impl Cli {
    /// Rejects invalid parameter combinations before any work is done.
    pub fn validate(&self) -> CliResult<()> {
        if self.threads == Some(0) {
            return Err(conflict("--threads must be positive"));
        }
        match &self.command {
            Command::BuildIndex(a) => {
                a.data.require_input()?;
                a.output
                    .as_ref()
                    .ok_or_else(|| CliError::MissingRequired("--output <FILE>".into()))?;
                a.index.to_config()?;
            }
            Command::RangeQuery(a) => {
                a.query.validate()?;
                check_eps(a.epsilon)?;
                if a.epsilon.is_none() {
                    return Err(CliError::MissingRequired("--epsilon <EPS>".into()));
                }
                if a.query.brute_force && a.algorithm.is_some() {
                    return Err(conflict("--algorithm does not apply to --brute-force"));
                }
                if let (Some(alg), None, false) =
                    (a.algorithm, &a.query.index_file, a.query.brute_force)
                {
                    alg.check_index(&a.query.index.to_config()?)?;
                }
            }
            Command::KnnQuery(a) => {
                a.query.validate()?;
                match a.k {
                    None => return Err(CliError::MissingRequired("--k <K>".into())),
                    Some(0) => return Err(conflict("k must be positive")),
                    _ => {}
                }
            }
            Command::TlbBench(a) => {
                if a.pairs == 0 {
                    return Err(conflict("--pairs must be positive"));
                }
                super::bench::parse_bounds(&a.bounds)?;
            }
            Command::WindowBench(a) => {
                check_eps(a.epsilon)?;
                if !(0.0..=100.0).contains(&a.percentile) {
                    return Err(conflict("--percentile must lie in [0, 100]"));
                }
                if a.windows.is_empty() || a.windows.contains(&0) {
                    return Err(conflict("--windows must list positive sizes"));
                }
                if a.divisor == 0 {
                    return Err(conflict("--divisor must be positive"));
                }
            }
            Command::MotifDiscover(a) => {
                a.data.require_input()?;
                if a.window == 0 || a.motif_len == 0 || a.min_count == 0 {
                    return Err(conflict(
                        "--window, --motif-len and --min-count must be positive",
                    ));
                }
                if a.centroids.is_none() && a.clusters == 0 {
                    return Err(conflict("--clusters must be positive"));
                }
            }
            Command::Selfcheck(a) => {
                if a.trials == 0 {
                    return Err(conflict("--trials must be positive"));
                }
            }
        }
        Ok(())
    }
}
