use shmr::hashkit::{hash_batch, scalar_hash};
use shmr::{ExecutionPlan, HashMode, PhaseTimings, PipelineStats};
use std::fmt::Write as _;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verification {
    Skipped,
    Passed,
    /// First difference against the oracle.
    Failed(String),
}

impl Verification {
    pub fn label(&self) -> &'static str {
        match self {
            Verification::Skipped => "skipped",
            Verification::Passed => "passed",
            Verification::Failed(_) => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetInfo {
    pub description: String,
    /// Map operations the input breaks into.
    pub elements: u64,
    pub bytes: u64,
    pub seed: u64,
}

/// Throughput of the batch hashing kernels relative to the scalar loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HashProbe {
    pub lanes: usize,
    pub strings: usize,
    pub scalar_mb_per_s: f64,
    pub padding_ratio: f64,
    pub stream_ratio: f64,
}

fn mb_per_s(bytes: usize, seconds: f64) -> f64 {
    bytes as f64 / seconds.max(1e-9) / 1e6
}

/// Times each hash mode over `strings`, repeating until at least
/// `min_bytes` have been hashed.
pub fn hash_probe<S: AsRef<[u8]>>(strings: &[S], lanes: usize, min_bytes: usize) -> HashProbe {
    let total: usize = strings.iter().map(|s| s.as_ref().len()).sum::<usize>().max(1);
    let rounds = min_bytes.div_ceil(total).max(1);
    let time = |mode: HashMode| {
        let start = Instant::now();
        let mut sink = 0u32;
        for _ in 0..rounds {
            match mode {
                HashMode::Scalar => {
                    for s in strings {
                        sink ^= scalar_hash(s.as_ref());
                    }
                }
                _ => {
                    let r = hash_batch(mode, strings, lanes).expect("probe strings are valid");
                    sink ^= r.hashes.iter().fold(0, |a, &h| a ^ h);
                }
            }
        }
        std::hint::black_box(sink);
        start.elapsed().as_secs_f64()
    };
    let scalar = time(HashMode::Scalar);
    let padding = time(HashMode::Padding);
    let stream = time(HashMode::Stream);
    HashProbe {
        lanes,
        strings: strings.len(),
        scalar_mb_per_s: mb_per_s(total * rounds, scalar),
        padding_ratio: scalar / padding.max(1e-9),
        stream_ratio: scalar / stream.max(1e-9),
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub app_id: String,
    pub plan: ExecutionPlan,
    pub dataset: DatasetInfo,
    pub reps: Vec<PhaseTimings>,
    pub verification: Verification,
    pub output_pairs: usize,
    /// FNV-1a of the encoded output file.
    pub output_digest: u32,
    pub pipeline: PipelineStats,
    pub hash_probe: Option<HashProbe>,
}

pub fn digest(encoded: &[u8]) -> u32 {
    scalar_hash(encoded)
}

impl BenchmarkReport {
    /// The repetition with the median total time.
    pub fn median(&self) -> PhaseTimings {
        let mut reps = self.reps.clone();
        reps.sort_by(|a, b| a.total.total_cmp(&b.total));
        reps.get(reps.len().saturating_sub(1) / 2).copied().unwrap_or_default()
    }

    fn plan_line(&self) -> String {
        let p = &self.plan;
        format!(
            "container={} pipelined={} map_style={} hash={} lanes={} map_workers={} reduce_workers={} max_map_threads={}",
            p.container_kind,
            p.pipelined,
            p.map_style,
            p.hash_mode,
            p.lane_width,
            p.map_workers,
            p.reduce_workers,
            p.max_map_threads
        )
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let d = &self.dataset;
        let m = self.median();
        let _ = writeln!(s, "app           {}", self.app_id);
        let _ = writeln!(
            s,
            "dataset       {} ({} elements, {} bytes, seed {})",
            d.description, d.elements, d.bytes, d.seed
        );
        let _ = writeln!(s, "plan          {}", self.plan_line());
        let _ = writeln!(
            s,
            "output        {} pairs, digest {:08x}",
            self.output_pairs, self.output_digest
        );
        let _ = writeln!(
            s,
            "pipeline      non_final_blocks={} final_blocks={}",
            self.pipeline.non_final_blocks, self.pipeline.final_blocks
        );
        match &self.verification {
            Verification::Failed(diff) => {
                let _ = writeln!(s, "verification  failed: {diff}");
            }
            v => {
                let _ = writeln!(s, "verification  {}", v.label());
            }
        }
        let _ = writeln!(s, "reps          {}", self.reps.len());
        let _ = writeln!(
            s,
            "time          map={:.6}s reduce={:.6}s merge={:.6}s total={:.6}s (median)",
            m.map, m.reduce, m.merge, m.total
        );
        if let Some(h) = &self.hash_probe {
            let _ = writeln!(
                s,
                "hash probe    lanes={} strings={} scalar={:.1}MB/s padding={:.2}x stream={:.2}x",
                h.lanes, h.strings, h.scalar_mb_per_s, h.padding_ratio, h.stream_ratio
            );
        }
        s
    }

    pub const CSV_HEADER: &'static str = "app,rep,container,pipelined,map_style,hash,lanes,map_workers,reduce_workers,elements,output_pairs,digest,verification,map_s,reduce_s,merge_s,total_s";

    /// Header plus one row per repetition.
    pub fn to_csv(&self) -> String {
        let p = &self.plan;
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for (i, t) in self.reps.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{:08x},{},{:.6},{:.6},{:.6},{:.6}",
                self.app_id,
                i,
                p.container_kind,
                p.pipelined,
                p.map_style,
                p.hash_mode,
                p.lane_width,
                p.map_workers,
                p.reduce_workers,
                self.dataset.elements,
                self.output_pairs,
                self.output_digest,
                self.verification.label(),
                t.map,
                t.reduce,
                t.merge,
                t.total
            );
        }
        s
    }
}
