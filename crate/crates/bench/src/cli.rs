use clap::{Args, Parser, Subcommand, ValueEnum};
use shmr::{ContainerMode, HashMode, JobConfig, MapStyle, PipelineMode};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "shmr", version, about = "Shared-memory MapReduce benchmark harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one application and report phase timings.
    Run(RunArgs),
    /// Write a synthetic dataset.
    Gen(GenArgs),
    /// Quick correctness checks on small inputs.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum AppKind {
    WordCount,
    ReverseIndex,
    Histogram,
    MonteCarlo,
    BlackScholes,
    BloomFilter,
}

impl AppKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AppKind::WordCount => "word_count",
            AppKind::ReverseIndex => "reverse_index",
            AppKind::Histogram => "histogram",
            AppKind::MonteCarlo => "monte_carlo",
            AppKind::BlackScholes => "black_scholes",
            AppKind::BloomFilter => "bloom_filter",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Csv,
}

/// Accepts plain integers and integral scientific notation such as `1e6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(f) if f >= 0.0 && f.fract() == 0.0 && f <= u64::MAX as f64 => Ok(f as u64),
        _ => Err(format!("`{s}` is not a non-negative integer")),
    }
}

fn parse_usize(s: &str) -> Result<usize, String> {
    parse_count(s).and_then(|n| usize::try_from(n).map_err(|e| e.to_string()))
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, usize::from)
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub app: AppKind,
    /// Dataset file, or directory for reverse_index. Optional for the pricing apps.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Map workers; defaults to the number of hardware threads.
    #[arg(long, value_parser = parse_usize)]
    pub map_threads: Option<usize>,
    /// Reduce workers; defaults to the number of map workers.
    #[arg(long, value_parser = parse_usize)]
    pub reduce_threads: Option<usize>,
    #[arg(long, default_value = "auto", value_parser = |s: &str| s.parse::<ContainerMode>())]
    pub container: ContainerMode,
    #[arg(long, default_value = "auto", value_parser = |s: &str| s.parse::<PipelineMode>())]
    pub pipeline: PipelineMode,
    #[arg(long, default_value = "scalar", value_parser = |s: &str| s.parse::<MapStyle>())]
    pub map_style: MapStyle,
    #[arg(long, default_value = "scalar", value_parser = |s: &str| s.parse::<HashMode>())]
    pub hash: HashMode,
    #[arg(long, default_value_t = shmr::config::DEFAULT_LANE_WIDTH, value_parser = parse_usize)]
    pub lanes: usize,
    #[arg(long, default_value_t = shmr::config::DEFAULT_EMIT_BUFFER_CAPACITY, value_parser = parse_usize)]
    pub emit_buffer: usize,
    /// Byte budget of a pipelined local hash table, in KiB.
    #[arg(long, default_value_t = 256, value_parser = parse_usize)]
    pub local_buffer_kb: usize,
    #[arg(long, default_value_t = 512, value_parser = parse_usize)]
    pub l2_budget_kb: usize,
    #[arg(long, default_value_t = 8192, value_parser = parse_count)]
    pub memory_budget_mb: u64,
    #[arg(long, default_value_t = 1, value_parser = parse_count)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = parse_usize)]
    pub reps: usize,
    /// Compare the output with the single-threaded oracle.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub report: ReportFormat,
    /// Write the result pairs here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 1 << 16, value_parser = parse_count)]
    pub buckets: u64,
    #[arg(long, default_value_t = 100_000, value_parser = parse_count)]
    pub paths: u64,
    /// Options generated when no --input is given.
    #[arg(long, value_parser = parse_usize)]
    pub options: Option<usize>,
    #[arg(long, default_value_t = 1_000_000, value_parser = parse_count)]
    pub bloom_bits: u64,
    #[arg(long, default_value_t = 2, value_parser = parse_count)]
    pub bloom_k: u64,
}

impl RunArgs {
    pub fn job_config(&self) -> JobConfig {
        let map_workers = self.map_threads.unwrap_or_else(default_threads);
        let mut cfg = JobConfig::new(self.app.as_str());
        cfg.map_workers = map_workers;
        cfg.reduce_workers = self.reduce_threads.unwrap_or(map_workers);
        cfg.container_mode = self.container;
        cfg.pipeline_mode = self.pipeline;
        cfg.map_style = self.map_style;
        cfg.hash_mode = self.hash;
        cfg.lane_width = self.lanes;
        cfg.emit_buffer_capacity = self.emit_buffer;
        cfg.local_table_budget = self.local_buffer_kb << 10;
        cfg.l2_budget = self.l2_budget_kb << 10;
        cfg.memory_budget = self.memory_budget_mb << 20;
        cfg.rng_seed = self.seed;
        cfg
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub app: AppKind,
    /// Output file, or directory for reverse_index.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = parse_count)]
    pub seed: u64,
    /// Text size for word_count, in MiB.
    #[arg(long, default_value_t = 10, value_parser = parse_usize)]
    pub size_mb: usize,
    /// Element count for histogram, bloom_filter and the pricing apps.
    #[arg(long, default_value_t = 1_000_000, value_parser = parse_usize)]
    pub elements: usize,
    #[arg(long, default_value_t = 1_000, value_parser = parse_usize)]
    pub files: usize,
    #[arg(long, default_value_t = 1 << 16, value_parser = parse_count)]
    pub buckets: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 4, value_parser = parse_usize)]
    pub map_threads: usize,
    #[arg(long, default_value_t = 1, value_parser = parse_count)]
    pub seed: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> RunArgs {
        let mut argv = vec!["shmr", "run"];
        argv.extend_from_slice(args);
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Run(r) => r,
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn defaults() {
        let r = run(&["--app", "word_count", "--input", "corpus.txt"]);
        let cfg = r.job_config();
        assert_eq!(cfg.container_mode, ContainerMode::Auto);
        assert_eq!(cfg.pipeline_mode, PipelineMode::Auto);
        assert_eq!(cfg.lane_width, 16);
        assert_eq!(cfg.l2_budget, 512 << 10);
        assert_eq!(cfg.memory_budget, 8 << 30);
        assert_eq!(cfg.reduce_workers, cfg.map_workers);
        assert!(!r.verify);
    }

    #[test]
    fn overrides() {
        let r = run(&["--app", "histogram", "--container", "global-array", "--map-threads", "16"]);
        let cfg = r.job_config();
        assert_eq!(cfg.container_mode, ContainerMode::GlobalAtomicArray);
        assert_eq!(cfg.map_workers, 16);
        let r = run(&["--app", "monte_carlo", "--paths", "1e6", "--seed", "42", "--hash", "stream"]);
        assert_eq!(r.paths, 1_000_000);
        assert_eq!(r.job_config().hash_mode, HashMode::Stream);
    }

    #[test]
    fn rejects_bad_values() {
        for bad in [
            vec!["shmr", "run", "--app", "nope"],
            vec!["shmr", "run", "--app", "histogram", "--container", "tree"],
            vec!["shmr", "run", "--app", "histogram", "--paths", "1.5"],
            vec!["shmr", "run", "--app", "histogram", "--frobnicate"],
        ] {
            assert!(Cli::try_parse_from(bad).is_err());
        }
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("42"), Ok(42));
        assert!(parse_count("-1").is_err());
        assert!(parse_count("2.5").is_err());
    }
}
