//! Producer-consumer pipelining of the map and reduce phases for hash jobs.
//!
//! Each map worker builds its local table in a fixed byte budget. When the
//! table outgrows the budget it is split by `partition_of(hash, N_r)` and the
//! pieces are pushed to the matching reduce queues, after which the worker
//! starts over with an empty table. Every reduce worker owns one queue and
//! folds what it pops into its own partition of the global result. A job whose
//! tables never outgrow the budget ships everything at the final flush, which
//! makes it behave like the non-pipelined path.

mod queue;

pub use queue::{PartitionQueue, DEFAULT_QUEUE_CAPACITY};

use crate::app::App;
use crate::config::JobConfig;
use crate::containers::{Combiner, HashEntry, LocalHashContainer};
use crate::error::{Error, Phase, Result};
use crate::hashkit::partition_of;
use crate::split::InputSplit;
use crate::strategy::{ContainerKind, ExecutionPlan};
use crate::worker::{Flusher, HashWorker};
use std::time::Instant;

/// Locally combined, partition-pure pairs from one map worker.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionBlock<A> {
    pub partition_id: usize,
    pub pairs: Vec<HashEntry<A>>,
    pub origin_worker: u32,
    /// Set for the end-of-map flush.
    pub final_flush: bool,
}

/// Splits `entries` into `n` buckets by key hash.
pub fn partition_entries<A>(entries: Vec<HashEntry<A>>, n: usize) -> Vec<Vec<HashEntry<A>>> {
    let mut buckets: Vec<Vec<HashEntry<A>>> = (0..n).map(|_| Vec::new()).collect();
    for entry in entries {
        buckets[partition_of(entry.hash, n)].push(entry);
    }
    buckets
}

/// Empties `local` into the reduce queues, one block per non-empty partition.
/// Returns the number of blocks sent.
pub fn partition_and_flush<C: Combiner>(
    local: &mut LocalHashContainer<C>,
    queues: &[PartitionQueue<C::Acc>],
    final_flush: bool,
) -> Result<usize> {
    if queues.is_empty() {
        return Err(Error::PipelineProtocol("no reduce queues".into()));
    }
    let origin_worker = local.worker_id();
    let mut sent = 0;
    for (partition_id, pairs) in partition_entries(local.drain(), queues.len())
        .into_iter()
        .enumerate()
    {
        if pairs.is_empty() {
            continue;
        }
        queues[partition_id].push(PartitionBlock {
            partition_id,
            pairs,
            origin_worker,
            final_flush,
        })?;
        sent += 1;
    }
    Ok(sent)
}

/// Folds every block of `queue` into `partition` until the queue is closed
/// and drained.
pub fn reduce_worker_loop<C: Combiner>(
    queue: &PartitionQueue<C::Acc>,
    partition: &mut LocalHashContainer<C>,
) -> Result<()> {
    while let Some(block) = queue.pop() {
        if block.partition_id != queue.partition_id() {
            return Err(Error::PipelineProtocol(format!(
                "queue {} received a block for partition {}",
                queue.partition_id(),
                block.partition_id
            )));
        }
        for entry in block.pairs {
            partition.merge_entry(entry)?;
        }
    }
    Ok(())
}

#[derive(Debug)]
pub struct PipelineOutcome<C: Combiner> {
    /// One partition per reduce worker; key sets are pairwise disjoint.
    pub partitions: Vec<LocalHashContainer<C>>,
    pub non_final_blocks: u64,
    pub final_blocks: u64,
    pub map_seconds: f64,
    pub reduce_seconds: f64,
}

struct ProducerDone<'a, A>(&'a [PartitionQueue<A>]);

impl<A> Drop for ProducerDone<'_, A> {
    fn drop(&mut self) {
        for q in self.0 {
            q.producer_done();
        }
    }
}

struct CloseOnExit<'a, A>(&'a PartitionQueue<A>);

impl<A> Drop for CloseOnExit<'_, A> {
    fn drop(&mut self) {
        self.0.close();
    }
}

/// Runs map workers (producers) and `plan.reduce_workers` reduce workers
/// (consumers) concurrently.
pub fn run_pipelined<A: App, C: Combiner>(
    plan: &ExecutionPlan,
    config: &JobConfig,
    app: &A,
    input: &A::Input,
    splits: &[InputSplit],
) -> Result<PipelineOutcome<C>> {
    if !plan.pipelined || plan.container_kind != ContainerKind::Hash {
        return Err(Error::PipelineProtocol(
            "pipelined execution needs a pipelined hash plan".into(),
        ));
    }
    let budget = config.local_table_budget;
    let queues: Vec<PartitionQueue<C::Acc>> = (0..plan.reduce_workers)
        .map(|i| PartitionQueue::new(i, DEFAULT_QUEUE_CAPACITY, splits.len()))
        .collect();
    let start = Instant::now();

    std::thread::scope(|s| {
        let reducers: Vec<_> = queues
            .iter()
            .map(|q| {
                s.spawn(move || {
                    let _close = CloseOnExit(q);
                    let mut partition = LocalHashContainer::<C>::new(q.partition_id() as u32);
                    reduce_worker_loop(q, &mut partition)?;
                    Ok::<_, Error>((partition, start.elapsed().as_secs_f64()))
                })
            })
            .collect();

        let queues = &queues;
        let mappers: Vec<_> = splits
            .iter()
            .map(|split| {
                s.spawn(move || {
                    let _done = ProducerDone(queues);
                    let table = LocalHashContainer::<C>::fixed_for_budget(split.worker_id as u32, budget);
                    let flusher = Flusher {
                        queues,
                        budget,
                        non_final_blocks: 0,
                        final_blocks: 0,
                    };
                    let mut worker = HashWorker::new(
                        table,
                        plan.map_style,
                        config.emit_buffer_capacity,
                        plan.hash_mode,
                        plan.lane_width,
                        Some(flusher),
                    );
                    for i in split.range() {
                        app.map(input, i, &mut worker)?;
                    }
                    worker.finish()?;
                    let f = worker.flusher.expect("pipelined worker");
                    Ok::<_, Error>((f.non_final_blocks, f.final_blocks))
                })
            })
            .collect();

        let mut first_err = None;
        let (mut non_final_blocks, mut final_blocks) = (0, 0);
        for m in mappers {
            match m.join() {
                Ok(Ok((nf, f))) => {
                    non_final_blocks += nf;
                    final_blocks += f;
                }
                Ok(Err(e)) => {
                    first_err.get_or_insert(e);
                }
                Err(_) => {
                    first_err.get_or_insert(Error::worker_panic(Phase::Map));
                }
            }
        }
        let map_seconds = start.elapsed().as_secs_f64();

        let mut partitions = Vec::with_capacity(reducers.len());
        let mut reduce_seconds: f64 = 0.0;
        for r in reducers {
            match r.join() {
                Ok(Ok((p, t))) => {
                    partitions.push(p);
                    reduce_seconds = reduce_seconds.max(t);
                }
                Ok(Err(e)) => {
                    first_err.get_or_insert(e);
                }
                Err(_) => {
                    first_err.get_or_insert(Error::worker_panic(Phase::Reduce));
                }
            }
        }
        match first_err {
            Some(e) => Err(e),
            None => Ok(PipelineOutcome {
                partitions,
                non_final_blocks,
                final_blocks,
                map_seconds,
                reduce_seconds,
            }),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::containers::{Container, KeyRef, SumU64};
    use crate::hashkit::scalar_hash;
    use std::collections::BTreeMap;

    fn table(keys: &[&str]) -> LocalHashContainer<SumU64> {
        let mut t = LocalHashContainer::new(0);
        for k in keys {
            t.emit_intermediate((*k).into(), 1).unwrap();
        }
        t
    }

    fn drain_all<A>(q: &PartitionQueue<A>) -> Vec<PartitionBlock<A>> {
        q.close();
        std::iter::from_fn(|| q.pop()).collect()
    }

    #[test]
    fn single_partition_gets_everything() {
        let mut t = table(&["a", "b", "c"]);
        let queues = vec![PartitionQueue::new(0, 8, 1)];
        assert_eq!(partition_and_flush(&mut t, &queues, false).unwrap(), 1);
        assert!(t.is_empty());
        let blocks = drain_all(&queues[0]);
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].pairs.len(), 3);
        assert!(!blocks[0].final_flush);
    }

    #[test]
    fn empty_final_flush_sends_nothing() {
        let mut t = LocalHashContainer::<SumU64>::new(0);
        let queues = vec![PartitionQueue::new(0, 8, 1), PartitionQueue::new(1, 8, 1)];
        assert_eq!(partition_and_flush(&mut t, &queues, true).unwrap(), 0);
        assert!(queues.iter().all(PartitionQueue::is_empty));
    }

    #[test]
    fn random_keys_land_on_their_partition() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let mut t = LocalHashContainer::<SumU64>::new(2);
        let mut oracle = BTreeMap::new();
        for _ in 0..1000 {
            let key = format!("k{}", rng.random_range(0..100_000u32));
            t.emit_intermediate(KeyRef::Bytes(key.as_bytes()), 1).unwrap();
            *oracle.entry(key.into_bytes()).or_insert(0u64) += 1;
        }
        let queues: Vec<_> = (0..4).map(|i| PartitionQueue::new(i, 8, 1)).collect();
        partition_and_flush(&mut t, &queues, true).unwrap();
        let mut union = BTreeMap::new();
        for q in &queues {
            for block in drain_all(q) {
                assert_eq!(block.origin_worker, 2);
                assert!(block.final_flush);
                for e in block.pairs {
                    assert_eq!(partition_of(scalar_hash(&e.key), 4), q.partition_id());
                    assert!(union.insert(e.key.to_vec(), e.acc).is_none());
                }
            }
        }
        assert_eq!(union, oracle);
    }

    #[test]
    fn flush_to_closed_queue_is_protocol_error() {
        let mut t = table(&["a"]);
        let queues = vec![PartitionQueue::new(0, 8, 0)];
        assert!(matches!(
            partition_and_flush(&mut t, &queues, true),
            Err(Error::PipelineProtocol(_))
        ));
    }

    #[test]
    fn reducer_folds_blocks() {
        let q = PartitionQueue::<u64>::new(0, 8, 1);
        let mut a = table(&["a"]);
        partition_and_flush(&mut a, std::slice::from_ref(&q), false).unwrap();
        let mut b = table(&["a", "a"]);
        partition_and_flush(&mut b, std::slice::from_ref(&q), true).unwrap();
        q.producer_done();
        let mut partition = LocalHashContainer::<SumU64>::new(0);
        reduce_worker_loop(&q, &mut partition).unwrap();
        assert_eq!(partition.get(b"a"), Some(&3));

        let closed = PartitionQueue::<u64>::new(1, 8, 0);
        let mut empty = LocalHashContainer::<SumU64>::new(1);
        reduce_worker_loop(&closed, &mut empty).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn four_producers_fold_to_oracle() {
        use rand::{Rng, SeedableRng};
        let q = PartitionQueue::<u64>::new(0, 4, 4);
        let oracle = std::thread::scope(|s| {
            let consumer = s.spawn(|| {
                let mut p = LocalHashContainer::<SumU64>::new(0);
                reduce_worker_loop(&q, &mut p).unwrap();
                p
            });
            let producers: Vec<_> = (0..4u32)
                .map(|w| {
                    let q = &q;
                    s.spawn(move || {
                        let mut rng = rand::rngs::StdRng::seed_from_u64(w as u64);
                        let mut sent = BTreeMap::new();
                        let mut t = LocalHashContainer::<SumU64>::new(w);
                        for round in 0..50 {
                            for _ in 0..20 {
                                let k = format!("k{}", rng.random_range(0..200));
                                let v = rng.random_range(1..10);
                                t.emit_intermediate(KeyRef::Bytes(k.as_bytes()), v).unwrap();
                                *sent.entry(k.into_bytes()).or_insert(0u64) += v;
                            }
                            partition_and_flush(&mut t, std::slice::from_ref(q), round == 49).unwrap();
                        }
                        q.producer_done();
                        sent
                    })
                })
                .collect();
            let mut oracle = BTreeMap::new();
            for p in producers {
                for (k, v) in p.join().unwrap() {
                    *oracle.entry(k).or_insert(0) += v;
                }
            }
            let got: BTreeMap<Vec<u8>, u64> = consumer
                .join()
                .unwrap()
                .iter()
                .map(|e| (e.key.to_vec(), e.acc))
                .collect();
            assert_eq!(got, oracle);
            oracle
        });
        assert!(!oracle.is_empty());
    }
}
