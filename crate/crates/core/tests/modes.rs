use proptest::prelude::*;
use shmr::apps::{int_key, Histogram, WordCount, WordCountInput};
use shmr::{run_job, ContainerMode, HashMode, JobConfig, MapStyle, Pair, PipelineMode};
use std::collections::BTreeMap;

fn configs(app: &str, workers: usize, budget: usize) -> Vec<JobConfig> {
    let mut out = Vec::new();
    for container in [ContainerMode::Hash, ContainerMode::LocalArray, ContainerMode::GlobalAtomicArray] {
        for pipeline in [PipelineMode::On, PipelineMode::Off] {
            for (style, hash) in [
                (MapStyle::Scalar, HashMode::Scalar),
                (MapStyle::Buffered, HashMode::Padding),
                (MapStyle::Buffered, HashMode::Stream),
            ] {
                let mut c = JobConfig::new(app);
                c.map_workers = workers;
                c.reduce_workers = workers.div_ceil(2);
                c.container_mode = container;
                c.pipeline_mode = pipeline;
                c.map_style = style;
                c.hash_mode = hash;
                c.lane_width = 4;
                c.emit_buffer_capacity = 7;
                c.local_table_budget = budget;
                out.push(c);
            }
        }
    }
    out
}

fn counts(pairs: &[Pair]) -> BTreeMap<Vec<u8>, u64> {
    pairs
        .iter()
        .map(|(k, v)| (k.clone(), std::str::from_utf8(v).unwrap().parse().unwrap()))
        .collect()
}

fn words() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec("[a-d]{1,3}|[a-z]{4,12}", 0..300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn word_count_agrees_across_modes(words in words(), workers in 1usize..5, budget in 64usize..4096) {
        let text = words.join(" ").into_bytes();
        let mut want = BTreeMap::new();
        for w in &words {
            *want.entry(w.as_bytes().to_vec()).or_insert(0u64) += 1;
        }
        let input = WordCountInput::new(text, 16);
        for cfg in configs("word_count", workers, budget) {
            // Array modes do not apply to byte keys; those configs must fail cleanly.
            match run_job(&cfg, &WordCount, &input) {
                Ok(r) => {
                    let keys: Vec<_> = r.pairs.iter().map(|p| p.0.clone()).collect();
                    prop_assert!(keys.windows(2).all(|w| w[0] < w[1]));
                    prop_assert_eq!(&counts(&r.pairs), &want);
                }
                Err(_) => prop_assert_ne!(cfg.container_mode, ContainerMode::Hash),
            }
        }
    }

    #[test]
    fn histogram_agrees_across_modes(values in prop::collection::vec(0u32..50, 0..2000), workers in 1usize..5) {
        let app = Histogram::new(50).unwrap();
        let mut want = BTreeMap::new();
        for &v in &values {
            *want.entry(v as u64).or_insert(0u64) += 1;
        }
        for cfg in configs("histogram", workers, 256) {
            // Pipelining needs the hash container.
            let r = match run_job(&cfg, &app, &values[..]) {
                Ok(r) => r,
                Err(_) => {
                    prop_assert!(cfg.pipeline_mode == PipelineMode::On && cfg.container_mode != ContainerMode::Hash);
                    continue;
                }
            };
            let got: BTreeMap<u64, u64> = counts(&r.pairs)
                .into_iter()
                .map(|(k, v)| (int_key(&k).unwrap(), v))
                .collect();
            prop_assert_eq!(&got, &want);
        }
    }
}

#[test]
fn small_budget_pipeline_sends_non_final_blocks() {
    let words: Vec<String> = (0..5000).map(|i| format!("w{}", i % 997)).collect();
    let input = WordCountInput::new(words.join(" ").into_bytes(), 1024);
    let mut cfg = JobConfig::new("word_count");
    cfg.map_workers = 2;
    cfg.pipeline_mode = PipelineMode::On;
    cfg.local_table_budget = 512;
    let small = run_job(&cfg, &WordCount, &input).unwrap();
    assert!(small.plan.pipelined);
    assert!(small.pipeline.non_final_blocks > 0);
    cfg.local_table_budget = 256 << 10;
    let large = run_job(&cfg, &WordCount, &input).unwrap();
    assert_eq!(large.pipeline.non_final_blocks, 0);
    assert_eq!(small.pairs, large.pairs);
    assert_eq!(small.pairs.len(), 997);
}
