use super::PartitionBlock;
use crate::error::{Error, Result};
use std::collections::VecDeque;
use std::sync::{Condvar, Mutex, MutexGuard};

pub const DEFAULT_QUEUE_CAPACITY: usize = 64;

#[derive(Debug)]
struct State<A> {
    blocks: VecDeque<PartitionBlock<A>>,
    open_producers: usize,
    closed: bool,
}

/// Bounded FIFO of partition blocks, many map workers in, one reduce worker out.
///
/// `push` blocks while the queue is full and `pop` blocks while it is empty
/// and still open. The queue closes when the last registered producer calls
/// [`producer_done`](Self::producer_done), or immediately on [`close`](Self::close).
#[derive(Debug)]
pub struct PartitionQueue<A> {
    partition_id: usize,
    capacity: usize,
    state: Mutex<State<A>>,
    not_empty: Condvar,
    not_full: Condvar,
}

impl<A> PartitionQueue<A> {
    pub fn new(partition_id: usize, capacity: usize, producers: usize) -> Self {
        PartitionQueue {
            partition_id,
            capacity: capacity.max(1),
            state: Mutex::new(State {
                blocks: VecDeque::new(),
                open_producers: producers,
                closed: producers == 0,
            }),
            not_empty: Condvar::new(),
            not_full: Condvar::new(),
        }
    }

    pub fn partition_id(&self) -> usize {
        self.partition_id
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    fn lock(&self) -> MutexGuard<'_, State<A>> {
        // A panicking peer leaves the deque itself consistent.
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn push(&self, block: PartitionBlock<A>) -> Result<()> {
        if block.partition_id != self.partition_id {
            return Err(Error::PipelineProtocol(format!(
                "block for partition {} sent to queue {}",
                block.partition_id, self.partition_id
            )));
        }
        let mut st = self.lock();
        while st.blocks.len() >= self.capacity && !st.closed {
            st = self.not_full.wait(st).unwrap_or_else(|e| e.into_inner());
        }
        if st.closed {
            return Err(Error::PipelineProtocol(format!(
                "enqueue on closed queue {}",
                self.partition_id
            )));
        }
        st.blocks.push_back(block);
        drop(st);
        self.not_empty.notify_one();
        Ok(())
    }

    /// Next block, or `None` once the queue is closed and drained.
    pub fn pop(&self) -> Option<PartitionBlock<A>> {
        let mut st = self.lock();
        loop {
            if let Some(block) = st.blocks.pop_front() {
                drop(st);
                self.not_full.notify_all();
                return Some(block);
            }
            if st.closed {
                return None;
            }
            st = self.not_empty.wait(st).unwrap_or_else(|e| e.into_inner());
        }
    }

    pub fn producer_done(&self) {
        let mut st = self.lock();
        st.open_producers = st.open_producers.saturating_sub(1);
        if st.open_producers == 0 {
            st.closed = true;
        }
        drop(st);
        self.not_empty.notify_all();
        self.not_full.notify_all();
    }

    pub fn close(&self) {
        self.lock().closed = true;
        self.not_empty.notify_all();
        self.not_full.notify_all();
    }

    pub fn is_closed(&self) -> bool {
        self.lock().closed
    }

    pub fn len(&self) -> usize {
        self.lock().blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
