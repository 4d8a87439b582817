use crate::cli::{AppKind, GenArgs, SelftestArgs};
use crate::datagen;
use crate::output::KeyFormat;
use crate::runner::{first_difference, format_option_records, mode_sweep, RunError, Workload};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shmr::apps::word_count::DEFAULT_CHUNK_BYTES;
use shmr::apps::{BloomFilter, Histogram, MonteCarlo, WordCountInput};
use shmr::hashkit::{hash_batch, scalar_hash, PrefixSumTable};
use shmr::HashMode;
use std::path::Path;

fn write(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    std::fs::write(path, bytes).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the dataset and returns a one-line summary.
pub fn generate(args: &GenArgs) -> Result<String, RunError> {
    let out = &args.out;
    Ok(match args.app {
        AppKind::WordCount => {
            let text = datagen::word_corpus(args.size_mb << 20, args.seed);
            write(out, &text)?;
            format!("wrote {} bytes of text to {}", text.len(), out.display())
        }
        AppKind::ReverseIndex => {
            std::fs::create_dir_all(out).map_err(|source| RunError::Io {
                path: out.clone(),
                source,
            })?;
            let g = datagen::linked_docs(args.files, args.seed);
            for d in &g.docs {
                write(&out.join(datagen::doc_name(d.id)), &d.contents)?;
            }
            format!("wrote {} files with {} links to {}", g.docs.len(), g.links, out.display())
        }
        AppKind::Histogram => {
            let values = datagen::uniform_u32(args.elements, args.buckets, args.seed);
            let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
            write(out, &bytes)?;
            format!("wrote {} values below {} to {}", values.len(), args.buckets, out.display())
        }
        AppKind::MonteCarlo | AppKind::BlackScholes => {
            let opts = datagen::option_records(args.elements, args.seed);
            write(out, format_option_records(&opts).as_bytes())?;
            format!("wrote {} option records to {}", opts.len(), out.display())
        }
        AppKind::BloomFilter => {
            let kmers = datagen::kmers(args.elements, args.seed);
            let mut bytes = Vec::with_capacity(kmers.len() * (datagen::KMER_LEN + 1));
            for k in &kmers {
                bytes.extend_from_slice(k);
                bytes.push(b'\n');
            }
            write(out, &bytes)?;
            format!("wrote {} {}-mers to {}", kmers.len(), datagen::KMER_LEN, out.display())
        }
    })
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, result: Result<String, String>) -> Check {
    let (passed, detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

fn random_strings(n: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let len = r.random_range(0..=64);
            (0..len).map(|_| r.random_range(1..=255u8)).collect()
        })
        .collect()
}

pub fn small_workloads(seed: u64) -> Vec<Workload> {
    let opts = datagen::option_records(2, seed);
    vec![
        Workload::WordCount(WordCountInput::new(datagen::word_corpus(200_000, seed), DEFAULT_CHUNK_BYTES / 4)),
        Workload::ReverseIndex(datagen::linked_docs(300, seed).docs),
        Workload::Histogram(Histogram::new(1000).unwrap(), datagen::uniform_u32(50_000, 1000, seed)),
        Workload::MonteCarlo(MonteCarlo::new(opts, 2_000, seed).unwrap()),
        Workload::BlackScholes(datagen::option_records(2_000, seed)),
        Workload::BloomFilter(BloomFilter::new(100_000, 2).unwrap(), datagen::kmers(10_000, seed)),
    ]
}

/// Runs every mode combination of `workload` and compares with its oracle.
pub fn sweep_against_oracle(workload: &Workload, workers: &[usize]) -> Result<String, String> {
    let app = workload.kind();
    let want = workload.oracle().map_err(|e| e.to_string())?;
    let format = KeyFormat::for_app(app.as_str());
    let configs = mode_sweep(app, workers);
    for cfg in &configs {
        let got = workload.run(cfg).map_err(|e| format!("{cfg:?}: {e}"))?;
        if let Some(diff) = first_difference(&got.pairs, &want, format) {
            return Err(format!(
                "map_workers={} {} {} {} {}: {diff}",
                cfg.map_workers, cfg.map_style, cfg.hash_mode, cfg.container_mode, cfg.pipeline_mode
            ));
        }
    }
    Ok(format!("{} configurations, {} pairs", configs.len(), want.len()))
}

pub fn selftest(args: &SelftestArgs) -> Vec<Check> {
    let mut checks = Vec::new();

    let strings = random_strings(10_000, args.seed);
    let want: Vec<u32> = strings.iter().map(|s| scalar_hash(s)).collect();
    checks.push(check("hash kernels match scalar", {
        let mut res = Ok(format!("{} strings, W in 1,2,4,16", strings.len()));
        'outer: for lanes in [1, 2, 4, 16] {
            for mode in [HashMode::Padding, HashMode::Stream] {
                match hash_batch(mode, &strings, lanes) {
                    Ok(r) if r.hashes == want => {}
                    Ok(_) => {
                        res = Err(format!("{mode} W={lanes} differs"));
                        break 'outer;
                    }
                    Err(e) => {
                        res = Err(e.to_string());
                        break 'outer;
                    }
                }
            }
        }
        res
    }));

    checks.push(check("prefix table", {
        let table = PrefixSumTable::shared();
        match (0..=u16::MAX).find(|&m| {
            let got = table.exclusive_prefix16(m);
            (0..16).any(|j| got[j] as u32 != (m as u32 & ((1u32 << j) - 1)).count_ones())
        }) {
            None => Ok("65536 masks".to_string()),
            Some(m) => Err(format!("mask {m:#06x}")),
        }
    }));

    let workers = [1, args.map_threads.max(1)];
    for w in small_workloads(args.seed) {
        checks.push(check(
            format!("{} modes vs oracle", w.kind().as_str()),
            sweep_against_oracle(&w, &workers),
        ));
    }
    checks
}
