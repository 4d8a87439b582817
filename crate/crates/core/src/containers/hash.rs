use super::{Combiner, Container, EmitTag, KeyRef, Merge};
use crate::error::{Error, Result};
use crate::hashkit::scalar_hash;

const INITIAL_CAPACITY: usize = 16;

/// Growth (or flush) happens before `occupied / capacity` exceeds 7/10.
#[inline]
fn over_load(occupied: usize, capacity: usize) -> bool {
    occupied * 10 > capacity * 7
}

#[derive(Debug, Clone, PartialEq)]
pub struct HashEntry<A> {
    pub key: Box<[u8]>,
    pub hash: u32,
    pub acc: A,
}

/// Open-addressed, linearly probed table keyed by byte strings.
///
/// Buckets are `hash & (capacity - 1)` on the FNV-1a key hash. A growable
/// table doubles before exceeding the load limit; a fixed table (the pipelined
/// variant) never reallocates and instead reports [`needs_flush`](Self::needs_flush).
#[derive(Debug, Clone)]
pub struct LocalHashContainer<C: Combiner> {
    slots: Vec<Option<HashEntry<C::Acc>>>,
    occupied: usize,
    payload_bytes: usize,
    growable: bool,
    worker: u32,
    seq: u64,
}

impl<C: Combiner> LocalHashContainer<C> {
    pub fn new(worker: u32) -> Self {
        Self::with_capacity(worker, INITIAL_CAPACITY)
    }

    pub fn with_capacity(worker: u32, capacity: usize) -> Self {
        let capacity = capacity.max(2).next_power_of_two();
        LocalHashContainer {
            slots: std::iter::repeat_with(|| None).take(capacity).collect(),
            occupied: 0,
            payload_bytes: 0,
            growable: true,
            worker,
            seq: 0,
        }
    }

    /// Non-growing table sized so that the byte budget is always exhausted
    /// before the load limit.
    pub fn fixed_for_budget(worker: u32, budget_bytes: usize) -> Self {
        let max_entries = budget_bytes / Self::entry_overhead() + 1;
        let capacity = ((max_entries + 1) * 10).div_ceil(7);
        let mut table = Self::with_capacity(worker, capacity);
        table.growable = false;
        table
    }

    /// Table bytes charged per stored key, amortized over the load factor.
    pub fn entry_overhead() -> usize {
        (std::mem::size_of::<Option<HashEntry<C::Acc>>>() * 10).div_ceil(7)
    }

    pub fn worker_id(&self) -> u32 {
        self.worker
    }

    pub fn len(&self) -> usize {
        self.occupied
    }

    pub fn is_empty(&self) -> bool {
        self.occupied == 0
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn is_growable(&self) -> bool {
        self.growable
    }

    /// Keys, payloads and amortized table overhead of the stored entries.
    pub fn byte_usage(&self) -> usize {
        self.occupied * Self::entry_overhead() + self.payload_bytes
    }

    pub fn needs_flush(&self, budget_bytes: usize) -> bool {
        self.byte_usage() > budget_bytes
            || (!self.growable && over_load(self.occupied + 1, self.capacity()))
    }

    fn next_tag(&mut self) -> EmitTag {
        let tag = EmitTag {
            worker: self.worker,
            seq: self.seq,
        };
        self.seq += 1;
        tag
    }

    /// Probe for `key`: `Ok(slot)` if present, `Err(free slot)` otherwise.
    fn find(&self, key: &[u8], hash: u32) -> std::result::Result<usize, usize> {
        let mask = self.slots.len() - 1;
        let mut i = hash as usize & mask;
        loop {
            match &self.slots[i] {
                None => return Err(i),
                Some(e) if e.hash == hash && *e.key == *key => return Ok(i),
                Some(_) => i = (i + 1) & mask,
            }
        }
    }

    fn reserve_one(&mut self) -> Result<()> {
        if !over_load(self.occupied + 1, self.capacity()) {
            return Ok(());
        }
        if !self.growable {
            return Err(Error::PipelineProtocol(
                "fixed local table full; flush was skipped".into(),
            ));
        }
        let bigger = self.capacity() * 2;
        let old = std::mem::replace(
            &mut self.slots,
            std::iter::repeat_with(|| None).take(bigger).collect(),
        );
        for entry in old.into_iter().flatten() {
            let slot = match self.find(&entry.key, entry.hash) {
                Ok(i) | Err(i) => i,
            };
            self.slots[slot] = Some(entry);
        }
        Ok(())
    }

    /// Emit with a precomputed key hash.
    pub fn emit_hashed(&mut self, key: &[u8], hash: u32, value: u64) -> Result<()> {
        let tag = self.next_tag();
        match self.find(key, hash) {
            Ok(i) => {
                let acc = &mut self.slots[i].as_mut().expect("probed slot").acc;
                let before = C::heap_bytes(acc);
                C::fold(acc, value, tag);
                self.payload_bytes = self.payload_bytes + C::heap_bytes(acc) - before;
            }
            Err(_) => {
                self.reserve_one()?;
                let slot = match self.find(key, hash) {
                    Ok(i) | Err(i) => i,
                };
                let mut acc = C::identity();
                C::fold(&mut acc, value, tag);
                self.payload_bytes += key.len() + C::heap_bytes(&acc);
                self.occupied += 1;
                self.slots[slot] = Some(HashEntry {
                    key: key.into(),
                    hash,
                    acc,
                });
            }
        }
        Ok(())
    }

    /// Folds an already combined entry (from another table or a block).
    pub fn merge_entry(&mut self, entry: HashEntry<C::Acc>) -> Result<()> {
        match self.find(&entry.key, entry.hash) {
            Ok(i) => {
                let acc = &mut self.slots[i].as_mut().expect("probed slot").acc;
                let before = C::heap_bytes(acc);
                C::merge(acc, entry.acc);
                self.payload_bytes = self.payload_bytes + C::heap_bytes(acc) - before;
            }
            Err(_) => {
                self.reserve_one()?;
                let slot = match self.find(&entry.key, entry.hash) {
                    Ok(i) | Err(i) => i,
                };
                self.payload_bytes += entry.key.len() + C::heap_bytes(&entry.acc);
                self.occupied += 1;
                self.slots[slot] = Some(entry);
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &[u8]) -> Option<&C::Acc> {
        let hash = scalar_hash(key);
        self.find(key, hash)
            .ok()
            .and_then(|i| self.slots[i].as_ref())
            .map(|e| &e.acc)
    }

    pub fn iter(&self) -> impl Iterator<Item = &HashEntry<C::Acc>> {
        self.slots.iter().flatten()
    }

    /// Moves every entry out and leaves an empty table of the same capacity.
    /// The emit sequence counter keeps running.
    pub fn drain(&mut self) -> Vec<HashEntry<C::Acc>> {
        let entries: Vec<_> = self.slots.iter_mut().filter_map(Option::take).collect();
        self.occupied = 0;
        self.payload_bytes = 0;
        entries
    }

    pub fn into_entries(self) -> Vec<HashEntry<C::Acc>> {
        self.slots.into_iter().flatten().collect()
    }
}

impl<C: Combiner> Container for LocalHashContainer<C> {
    fn emit_intermediate(&mut self, key: KeyRef<'_>, value: u64) -> Result<()> {
        match key {
            KeyRef::Bytes(b) => {
                if b.contains(&0) {
                    return Err(Error::InteriorZero { index: 0 });
                }
                self.emit_hashed(b, scalar_hash(b), value)
            }
            KeyRef::Int(k) => {
                let bytes = k.to_be_bytes();
                self.emit_hashed(&bytes, scalar_hash(&bytes), value)
            }
        }
    }
}

impl<C: Combiner> Merge for LocalHashContainer<C> {
    fn merge(&mut self, local: Self) {
        for entry in local.into_entries() {
            // A growable destination never rejects.
            self.merge_entry(entry).expect("merge into growable table");
        }
    }
}
