//! Loads datasets, runs jobs and checks them against the oracles.

use crate::cli::{AppKind, RunArgs};
use crate::oracle;
use crate::output::{self, KeyFormat};
use crate::report::{digest, hash_probe, BenchmarkReport, DatasetInfo, Verification};
use shmr::apps::word_count::DEFAULT_CHUNK_BYTES;
use shmr::apps::{
    BlackScholes, BloomFilter, Document, Histogram, MonteCarlo, ReverseIndex, WordCount,
    WordCountInput,
};
use shmr::{
    run_job, ContainerMode, HashMode, JobConfig, JobResult, MapStyle, OptionParams, Pair,
    PipelineMode,
};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Job(#[from] shmr::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 1,
            _ => 3,
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, RunError> {
    std::fs::read(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// An application together with its input.
pub enum Workload {
    WordCount(WordCountInput),
    ReverseIndex(Vec<Document>),
    Histogram(Histogram, Vec<u32>),
    MonteCarlo(MonteCarlo),
    BlackScholes(Vec<OptionParams>),
    BloomFilter(BloomFilter, Vec<Vec<u8>>),
}

impl Workload {
    pub fn kind(&self) -> AppKind {
        match self {
            Workload::WordCount(_) => AppKind::WordCount,
            Workload::ReverseIndex(_) => AppKind::ReverseIndex,
            Workload::Histogram(..) => AppKind::Histogram,
            Workload::MonteCarlo(_) => AppKind::MonteCarlo,
            Workload::BlackScholes(_) => AppKind::BlackScholes,
            Workload::BloomFilter(..) => AppKind::BloomFilter,
        }
    }

    pub fn run(&self, cfg: &JobConfig) -> shmr::Result<JobResult> {
        match self {
            Workload::WordCount(input) => run_job(cfg, &WordCount, input),
            Workload::ReverseIndex(docs) => run_job(cfg, &ReverseIndex::new(), &docs[..]),
            Workload::Histogram(app, values) => run_job(cfg, app, &values[..]),
            Workload::MonteCarlo(app) => run_job(cfg, app, &()),
            Workload::BlackScholes(options) => run_job(cfg, &BlackScholes, &options[..]),
            Workload::BloomFilter(app, elements) => run_job(cfg, app, &elements[..]),
        }
    }

    pub fn oracle(&self) -> shmr::Result<Vec<Pair>> {
        Ok(match self {
            Workload::WordCount(input) => oracle::word_count(input.text()),
            Workload::ReverseIndex(docs) => oracle::reverse_index(docs),
            Workload::Histogram(app, values) => oracle::histogram(values, app.buckets())?,
            Workload::MonteCarlo(app) => oracle::monte_carlo(app),
            Workload::BlackScholes(options) => oracle::black_scholes(options),
            Workload::BloomFilter(app, elements) => oracle::bloom_filter(app, elements),
        })
    }

    pub fn describe(&self, seed: u64) -> DatasetInfo {
        let (description, elements, bytes) = match self {
            Workload::WordCount(input) => (
                "text".to_string(),
                input.chunks().len() as u64,
                input.text().len() as u64,
            ),
            Workload::ReverseIndex(docs) => (
                "linked documents".to_string(),
                docs.len() as u64,
                docs.iter().map(|d| d.contents.len() as u64).sum(),
            ),
            Workload::Histogram(app, values) => (
                format!("u32 values, {} buckets", app.buckets()),
                values.len() as u64,
                4 * values.len() as u64,
            ),
            Workload::MonteCarlo(app) => (
                format!("{} options x {} paths", app.options().len(), app.paths()),
                app.options().len() as u64 * app.paths(),
                0,
            ),
            Workload::BlackScholes(options) => ("option records".to_string(), options.len() as u64, 0),
            Workload::BloomFilter(app, elements) => (
                format!("strings, m={} k={}", app.bits(), app.hashes()),
                elements.len() as u64,
                elements.iter().map(|e| e.len() as u64).sum(),
            ),
        };
        DatasetInfo {
            description,
            elements,
            bytes,
            seed,
        }
    }
}

pub fn parse_option_records(text: &[u8]) -> Result<Vec<OptionParams>, RunError> {
    let text = std::str::from_utf8(text).map_err(|e| RunError::Usage(e.to_string()))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("spot") {
            continue;
        }
        let f: Vec<f64> = line
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| RunError::Usage(format!("option record {}: {e}", n + 1)))?;
        let [s, k, r, v, t] = f[..] else {
            return Err(RunError::Usage(format!(
                "option record {}: expected spot,strike,rate,sigma,maturity",
                n + 1
            )));
        };
        out.push(OptionParams::new(s, k, r, v, t)?);
    }
    Ok(out)
}

pub fn format_option_records(options: &[OptionParams]) -> String {
    let mut s = String::from("spot,strike,rate,sigma,maturity\n");
    for o in options {
        s.push_str(&format!("{},{},{},{},{}\n", o.spot, o.strike, o.rate, o.sigma, o.maturity));
    }
    s
}

pub fn parse_lines(bytes: &[u8]) -> Vec<Vec<u8>> {
    bytes
        .split(|&b| b == b'\n')
        .map(|l| l.strip_suffix(b"\r").unwrap_or(l))
        .filter(|l| !l.is_empty())
        .map(<[u8]>::to_vec)
        .collect()
}

/// Files of `dir` in name order, numbered from 0.
pub fn read_documents(dir: &Path) -> Result<Vec<Document>, RunError> {
    let io = |source| RunError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    paths.retain(|p| p.is_file());
    paths.sort();
    paths
        .iter()
        .enumerate()
        .map(|(id, p)| {
            Ok(Document {
                id: id as u64,
                contents: read(p)?,
            })
        })
        .collect()
}

fn require_input(args: &RunArgs) -> Result<&Path, RunError> {
    args.input
        .as_deref()
        .ok_or_else(|| RunError::Usage(format!("--input is required for {}", args.app.as_str())))
}

pub fn load(args: &RunArgs) -> Result<Workload, RunError> {
    Ok(match args.app {
        AppKind::WordCount => {
            Workload::WordCount(WordCountInput::new(read(require_input(args)?)?, DEFAULT_CHUNK_BYTES))
        }
        AppKind::ReverseIndex => Workload::ReverseIndex(read_documents(require_input(args)?)?),
        AppKind::Histogram => {
            let values = shmr::apps::histogram::parse_le_u32(&read(require_input(args)?)?)?;
            Workload::Histogram(Histogram::new(args.buckets)?, values)
        }
        AppKind::MonteCarlo | AppKind::BlackScholes => {
            let options = match &args.input {
                Some(p) => parse_option_records(&read(p)?)?,
                None => {
                    let default = if args.app == AppKind::MonteCarlo { 1 } else { 100_000 };
                    crate::datagen::option_records(args.options.unwrap_or(default), args.seed)
                }
            };
            if args.app == AppKind::MonteCarlo {
                Workload::MonteCarlo(MonteCarlo::new(options, args.paths, args.seed)?)
            } else {
                Workload::BlackScholes(options)
            }
        }
        AppKind::BloomFilter => {
            let k = u32::try_from(args.bloom_k).map_err(|e| RunError::Usage(e.to_string()))?;
            Workload::BloomFilter(
                BloomFilter::new(args.bloom_bits, k)?,
                parse_lines(&read(require_input(args)?)?),
            )
        }
    })
}

/// Human-readable location of the first difference, or `None` if equal.
pub fn first_difference(got: &[Pair], want: &[Pair], format: KeyFormat) -> Option<String> {
    let show = |p: Option<&Pair>| match p {
        Some(p) => String::from_utf8_lossy(&output::encode(std::slice::from_ref(p), format))
            .trim_end()
            .replace('\t', " => "),
        None => "<none>".to_string(),
    };
    let i = (0..got.len().max(want.len())).find(|&i| got.get(i) != want.get(i))?;
    Some(format!(
        "pair {i}: got `{}`, oracle `{}` ({} vs {} pairs)",
        show(got.get(i)),
        show(want.get(i)),
        got.len(),
        want.len()
    ))
}

pub struct Outcome {
    pub report: BenchmarkReport,
    pub pairs: Vec<Pair>,
}

pub fn run_benchmark(args: &RunArgs) -> Result<Outcome, RunError> {
    if args.reps == 0 {
        return Err(RunError::Usage("--reps must be at least 1".into()));
    }
    let workload = load(args)?;
    let cfg = args.job_config();
    cfg.validate().map_err(|e| RunError::Usage(e.to_string()))?;

    let mut reps = Vec::with_capacity(args.reps);
    let mut last: Option<JobResult> = None;
    for _ in 0..args.reps {
        let r = workload.run(&cfg)?;
        reps.push(r.timings);
        last = Some(r);
    }
    let result = last.expect("at least one rep");
    let format = KeyFormat::for_app(args.app.as_str());
    let encoded = output::encode(&result.pairs, format);

    let verification = if args.verify {
        match first_difference(&result.pairs, &workload.oracle()?, format) {
            None => Verification::Passed,
            Some(diff) => Verification::Failed(diff),
        }
    } else {
        Verification::Skipped
    };
    let hash_probe = matches!(args.app, AppKind::WordCount | AppKind::ReverseIndex).then(|| {
        let keys: Vec<&[u8]> = result.pairs.iter().map(|(k, _)| k.as_slice()).take(100_000).collect();
        hash_probe(&keys, cfg.lane_width, 8 << 20)
    });

    if let Some(path) = &args.out {
        std::fs::write(path, &encoded).map_err(|source| RunError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(Outcome {
        report: BenchmarkReport {
            app_id: args.app.as_str().to_string(),
            plan: result.plan,
            dataset: workload.describe(args.seed),
            reps,
            verification,
            output_pairs: result.pairs.len(),
            output_digest: digest(&encoded),
            pipeline: result.pipeline,
            hash_probe,
        },
        pairs: result.pairs,
    })
}

/// Every mode combination that applies to `app`, for each worker count.
pub fn mode_sweep(app: AppKind, workers: &[usize]) -> Vec<JobConfig> {
    let containers: &[ContainerMode] = match app {
        AppKind::WordCount | AppKind::ReverseIndex => &[ContainerMode::Hash],
        AppKind::BlackScholes => &[ContainerMode::Auto],
        _ => &[ContainerMode::LocalArray, ContainerMode::GlobalAtomicArray],
    };
    let pipelines: &[PipelineMode] = match app {
        AppKind::WordCount | AppKind::ReverseIndex => &[PipelineMode::On, PipelineMode::Off],
        _ => &[PipelineMode::Off],
    };
    let mut out = Vec::new();
    for &w in workers {
        for &style in &[MapStyle::Scalar, MapStyle::Buffered] {
            for &hash in &[HashMode::Scalar, HashMode::Padding, HashMode::Stream] {
                for &container in containers {
                    for &pipeline in pipelines {
                        let mut cfg = JobConfig::new(app.as_str());
                        cfg.map_workers = w;
                        cfg.reduce_workers = w;
                        cfg.map_style = style;
                        cfg.hash_mode = hash;
                        cfg.container_mode = container;
                        cfg.pipeline_mode = pipeline;
                        out.push(cfg);
                    }
                }
            }
        }
    }
    out
}
