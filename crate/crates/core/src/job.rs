//! Job execution: split, map, reduce, merge.

use crate::app::{App, ContainerHint, Pair};
use crate::config::JobConfig;
use crate::containers::{
    AppendList, AtomicSink, BitwiseOr, Combiner, CombinerKind, GlobalAtomicArray, HashEntry,
    LocalArrayContainer, LocalHashContainer, Payload, SumU64, WordCombiner,
};
use crate::error::{Error, Phase, Result};
use crate::pipeline::{partition_entries, run_pipelined};
use crate::split::{split_input, InputSplit};
use crate::strategy::{select_strategy, ContainerKind, ExecutionPlan};
use crate::worker::{DirectWorker, HashWorker, RowWorker};
use std::thread::ScopedJoinHandle;
use std::time::Instant;

/// Wall-clock seconds per phase. In pipelined runs map and reduce overlap, so
/// `reduce` ends when the last reduce worker drains its queue.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub map: f64,
    pub reduce: f64,
    pub merge: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PipelineStats {
    /// Blocks shipped because a local table crossed its byte budget.
    pub non_final_blocks: u64,
    /// Blocks shipped at the end of a map worker's split.
    pub final_blocks: u64,
}

#[derive(Debug, Clone)]
pub struct JobResult {
    /// Output pairs sorted by key. Integer keys are 8-byte big-endian.
    pub pairs: Vec<Pair>,
    pub plan: ExecutionPlan,
    pub timings: PhaseTimings,
    pub pipeline: PipelineStats,
}

struct Output {
    pairs: Vec<Pair>,
    map: f64,
    reduce: f64,
    pipeline: PipelineStats,
}

fn join_all<T>(handles: Vec<ScopedJoinHandle<'_, Result<T>>>, phase: Phase) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(handles.len());
    let mut first_err = None;
    for h in handles {
        match h.join() {
            Ok(Ok(v)) => out.push(v),
            Ok(Err(e)) => {
                first_err.get_or_insert(e);
            }
            Err(_) => {
                first_err.get_or_insert(Error::worker_panic(phase));
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Runs `app` over `input` with the plan chosen for `config`.
pub fn run_job<A: App>(config: &JobConfig, app: &A, input: &A::Input) -> Result<JobResult> {
    let spec = app.spec();
    let plan = select_strategy(config, &spec, None)?;
    log::debug!("{}: {plan:?}", spec.app_id);
    let start = Instant::now();
    let splits = split_input(app.len(input), plan.map_workers);

    let out = match (plan.container_kind, spec.combiner) {
        (ContainerKind::MapOnly, _) => run_map_only(app, input, &splits)?,
        (ContainerKind::Hash, CombinerKind::SumU64) => run_hash::<A, SumU64>(&plan, config, app, input, &splits)?,
        (ContainerKind::Hash, CombinerKind::BitwiseOr) => {
            run_hash::<A, BitwiseOr>(&plan, config, app, input, &splits)?
        }
        (ContainerKind::Hash, CombinerKind::AppendList) => {
            run_hash::<A, AppendList>(&plan, config, app, input, &splits)?
        }
        (ContainerKind::LocalArray, CombinerKind::SumU64) => {
            run_local_array::<A, SumU64>(&plan, config, app, input, &splits)?
        }
        (ContainerKind::LocalArray, CombinerKind::BitwiseOr) => {
            run_local_array::<A, BitwiseOr>(&plan, config, app, input, &splits)?
        }
        (ContainerKind::GlobalAtomicArray, CombinerKind::SumU64) => {
            run_global_array::<A, SumU64>(&plan, config, app, input, &splits)?
        }
        (ContainerKind::GlobalAtomicArray, CombinerKind::BitwiseOr) => {
            run_global_array::<A, BitwiseOr>(&plan, config, app, input, &splits)?
        }
        (kind, combiner) => {
            return Err(Error::UnsupportedStrategy(format!(
                "{}: {kind} cannot hold a {combiner:?} combiner",
                spec.app_id
            )))
        }
    };

    let merge_start = Instant::now();
    let pairs = app.finish(out.pairs);
    let merge_tail = merge_start.elapsed().as_secs_f64();
    let total = start.elapsed().as_secs_f64();
    Ok(JobResult {
        pairs,
        plan,
        timings: PhaseTimings {
            map: out.map,
            reduce: out.reduce,
            merge: (total - out.map - out.reduce).max(merge_tail),
            total,
        },
        pipeline: out.pipeline,
    })
}

fn key_range<A: App>(app: &A) -> Result<(u64, u64)> {
    match app.spec().container_hint {
        ContainerHint::Array { lo, hi, .. } => Ok((lo, hi)),
        _ => Err(Error::UnsupportedStrategy("array container needs an integer key range".into())),
    }
}

/// Sorts disjoint partitions by key and renders each combined value.
pub fn merge_and_sort<A: App, C: Combiner>(
    app: &A,
    partitions: Vec<Vec<HashEntry<C::Acc>>>,
) -> Vec<Pair> {
    let mut entries: Vec<HashEntry<C::Acc>> = partitions.into_iter().flatten().collect();
    entries.sort_unstable_by(|a, b| a.key.cmp(&b.key));
    let mut merged: Vec<HashEntry<C::Acc>> = Vec::with_capacity(entries.len());
    for e in entries {
        match merged.last_mut() {
            Some(last) if last.key == e.key => C::merge(&mut last.acc, e.acc),
            _ => merged.push(e),
        }
    }
    merged
        .into_iter()
        .map(|mut e| {
            C::finalize(&mut e.acc);
            let value = app.render(&e.key, C::payload(&e.acc));
            (e.key.into_vec(), value)
        })
        .collect()
}

fn run_hash<A: App, C: Combiner>(
    plan: &ExecutionPlan,
    config: &JobConfig,
    app: &A,
    input: &A::Input,
    splits: &[InputSplit],
) -> Result<Output> {
    let start = Instant::now();
    if plan.pipelined {
        let out = run_pipelined::<A, C>(plan, config, app, input, splits)?;
        let parts = out.partitions.into_iter().map(|p| p.into_entries()).collect();
        return Ok(Output {
            pairs: merge_and_sort::<A, C>(app, parts),
            map: out.map_seconds,
            reduce: (out.reduce_seconds - out.map_seconds).max(0.0),
            pipeline: PipelineStats {
                non_final_blocks: out.non_final_blocks,
                final_blocks: out.final_blocks,
            },
        });
    }

    let nr = plan.reduce_workers;
    let buckets: Vec<Vec<Vec<HashEntry<C::Acc>>>> = std::thread::scope(|s| {
        let handles = splits
            .iter()
            .map(|split| {
                s.spawn(move || {
                    let table = LocalHashContainer::<C>::new(split.worker_id as u32);
                    let mut worker = HashWorker::new(
                        table,
                        plan.map_style,
                        config.emit_buffer_capacity,
                        plan.hash_mode,
                        plan.lane_width,
                        None,
                    );
                    for i in split.range() {
                        app.map(input, i, &mut worker)?;
                    }
                    worker.finish()?;
                    Ok(partition_entries(worker.table.into_entries(), nr))
                })
            })
            .collect();
        join_all(handles, Phase::Map)
    })?;
    let map = start.elapsed().as_secs_f64();

    let reduce_start = Instant::now();
    let mut by_reducer: Vec<Vec<Vec<HashEntry<C::Acc>>>> = (0..nr).map(|_| Vec::new()).collect();
    for worker_buckets in buckets {
        for (r, bucket) in worker_buckets.into_iter().enumerate() {
            by_reducer[r].push(bucket);
        }
    }
    let parts = std::thread::scope(|s| {
        let handles = by_reducer
            .into_iter()
            .enumerate()
            .map(|(r, inputs)| {
                s.spawn(move || {
                    let mut partition = LocalHashContainer::<C>::new(r as u32);
                    for entry in inputs.into_iter().flatten() {
                        partition.merge_entry(entry)?;
                    }
                    Ok(partition.into_entries())
                })
            })
            .collect();
        join_all(handles, Phase::Reduce)
    })?;
    let reduce = reduce_start.elapsed().as_secs_f64();

    Ok(Output {
        pairs: merge_and_sort::<A, C>(app, parts),
        map,
        reduce,
        pipeline: PipelineStats::default(),
    })
}

fn render_cells<A: App, C: WordCombiner>(app: &A, lo: u64, cells: &[u64]) -> Vec<Pair> {
    cells
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != C::identity())
        .map(|(i, &v)| {
            let key = (lo + i as u64).to_be_bytes().to_vec();
            let value = app.render(&key, Payload::Word(v));
            (key, value)
        })
        .collect()
}

fn run_local_array<A: App, C: WordCombiner>(
    plan: &ExecutionPlan,
    config: &JobConfig,
    app: &A,
    input: &A::Input,
    splits: &[InputSplit],
) -> Result<Output> {
    let (lo, hi) = key_range(app)?;
    let start = Instant::now();
    let locals: Vec<Vec<u64>> = std::thread::scope(|s| {
        let handles = splits
            .iter()
            .map(|split| {
                s.spawn(move || {
                    let array = LocalArrayContainer::<C>::new(lo, hi)?;
                    let mut worker = DirectWorker::new(array, plan.map_style, config.emit_buffer_capacity);
                    for i in split.range() {
                        app.map(input, i, &mut worker)?;
                    }
                    worker.finish()?;
                    Ok(worker.target.cells().to_vec())
                })
            })
            .collect();
        join_all(handles, Phase::Map)
    })?;
    let map = start.elapsed().as_secs_f64();

    // Each reduce worker combines one contiguous range of cells across all
    // local arrays.
    let reduce_start = Instant::now();
    let cells = (hi - lo + 1) as usize;
    let ranges = split_input(cells, plan.reduce_workers);
    let locals = &locals;
    let chunks = std::thread::scope(|s| {
        let handles = ranges
            .iter()
            .map(|range| {
                s.spawn(move || {
                    let mut acc = vec![C::identity(); range.len()];
                    for local in locals {
                        for (a, &v) in acc.iter_mut().zip(&local[range.range()]) {
                            *a = C::apply(*a, v);
                        }
                    }
                    Ok(acc)
                })
            })
            .collect();
        join_all(handles, Phase::Reduce)
    })?;
    let combined: Vec<u64> = chunks.into_iter().flatten().collect();
    let reduce = reduce_start.elapsed().as_secs_f64();

    Ok(Output {
        pairs: render_cells::<A, C>(app, lo, &combined),
        map,
        reduce,
        pipeline: PipelineStats::default(),
    })
}

fn run_global_array<A: App, C: WordCombiner>(
    plan: &ExecutionPlan,
    config: &JobConfig,
    app: &A,
    input: &A::Input,
    splits: &[InputSplit],
) -> Result<Output> {
    let (lo, hi) = key_range(app)?;
    let start = Instant::now();
    let array = GlobalAtomicArray::<C>::new(lo, hi)?;
    let shared = &array;
    std::thread::scope(|s| {
        let handles = splits
            .iter()
            .map(|split| {
                s.spawn(move || {
                    let mut worker =
                        DirectWorker::new(AtomicSink(shared), plan.map_style, config.emit_buffer_capacity);
                    for i in split.range() {
                        app.map(input, i, &mut worker)?;
                    }
                    worker.finish()
                })
            })
            .collect();
        join_all(handles, Phase::Map)
    })?;
    let map = start.elapsed().as_secs_f64();
    Ok(Output {
        pairs: render_cells::<A, C>(app, lo, &array.into_cells()),
        map,
        reduce: 0.0,
        pipeline: PipelineStats::default(),
    })
}

fn run_map_only<A: App>(app: &A, input: &A::Input, splits: &[InputSplit]) -> Result<Output> {
    let start = Instant::now();
    let rows: Vec<Vec<Pair>> = std::thread::scope(|s| {
        let handles = splits
            .iter()
            .map(|split| {
                s.spawn(move || {
                    let mut worker = RowWorker::default();
                    let mut pairs = Vec::with_capacity(split.len());
                    for i in split.range() {
                        app.map(input, i, &mut worker)?;
                        if worker.rows.len() != 1 {
                            return Err(Error::Job {
                                phase: Phase::Map,
                                message: format!(
                                    "map-only element {i} produced {} rows",
                                    worker.rows.len()
                                ),
                            });
                        }
                        let row = worker.rows.pop().expect("one row");
                        pairs.push(((i as u64).to_be_bytes().to_vec(), row));
                    }
                    Ok(pairs)
                })
            })
            .collect();
        join_all(handles, Phase::Map)
    })?;
    Ok(Output {
        pairs: rows.into_iter().flatten().collect(),
        map: start.elapsed().as_secs_f64(),
        reduce: 0.0,
        pipeline: PipelineStats::default(),
    })
}
