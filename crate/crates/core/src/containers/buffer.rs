use super::{Combiner, Container, KeyRef, LocalHashContainer};
use crate::config::HashMode;
use crate::error::{Error, Result};
use crate::hashkit::hash_batch;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BufferState {
    Accepted,
    /// The pair was stored and the buffer is now at capacity.
    Full,
}

#[derive(Debug, Clone, Copy)]
enum StoredKey {
    Int(u64),
    Bytes { start: usize, len: usize },
}

/// Fixed-capacity staging area for emitted pairs.
///
/// Appending never touches a container, so consecutive map operations carry no
/// dependency through it; the combiner runs later, in emit order, when the
/// buffer is flushed. Byte keys are copied into one contiguous arena.
#[derive(Debug, Clone)]
pub struct EmitBuffer {
    arena: Vec<u8>,
    entries: Vec<(StoredKey, u64)>,
    capacity: usize,
}

impl EmitBuffer {
    pub fn new(capacity: usize) -> Self {
        let capacity = capacity.max(1);
        EmitBuffer {
            arena: Vec::new(),
            entries: Vec::with_capacity(capacity),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.entries.len() >= self.capacity
    }

    #[inline]
    pub fn buffered_emit(&mut self, key: KeyRef<'_>, value: u64) -> BufferState {
        debug_assert!(!self.is_full(), "emit into a full buffer");
        let stored = match key {
            KeyRef::Int(k) => StoredKey::Int(k),
            KeyRef::Bytes(b) => {
                let start = self.arena.len();
                self.arena.extend_from_slice(b);
                StoredKey::Bytes {
                    start,
                    len: b.len(),
                }
            }
        };
        self.entries.push((stored, value));
        if self.is_full() {
            BufferState::Full
        } else {
            BufferState::Accepted
        }
    }

    fn resolve(&self, key: StoredKey) -> KeyRef<'_> {
        match key {
            StoredKey::Int(k) => KeyRef::Int(k),
            StoredKey::Bytes { start, len } => KeyRef::Bytes(&self.arena[start..start + len]),
        }
    }

    /// Pairs in emit order.
    pub fn iter(&self) -> impl Iterator<Item = (KeyRef<'_>, u64)> {
        self.entries.iter().map(|&(k, v)| (self.resolve(k), v))
    }

    pub fn clear(&mut self) {
        self.entries.clear();
        self.arena.clear();
    }
}

fn at_index(err: Error, index: usize) -> Error {
    match err {
        Error::KeyRange { key, lo, hi } => Error::KeyRangeAt { key, lo, hi, index },
        other => other,
    }
}

/// Applies every buffered pair to `container` in emit order, then empties the
/// buffer. The buffer is emptied even when a pair is rejected.
pub fn flush_buffer<T: Container + ?Sized>(buffer: &mut EmitBuffer, container: &mut T) -> Result<()> {
    let result = buffer
        .iter()
        .enumerate()
        .try_for_each(|(i, (k, v))| container.emit_intermediate(k, v).map_err(|e| at_index(e, i)));
    buffer.clear();
    result
}

/// Like [`flush_buffer`] for hash containers, computing all byte-key hashes
/// up front with one batch kernel call.
pub fn flush_buffer_hashed<C: Combiner>(
    buffer: &mut EmitBuffer,
    container: &mut LocalHashContainer<C>,
    mode: HashMode,
    lanes: usize,
) -> Result<()> {
    flush_buffer_hashed_with(buffer, container, mode, lanes, |_| Ok(()))
}

/// [`flush_buffer_hashed`] with a hook run after every insert, used by the
/// pipelined path to flush the table the moment it crosses its budget.
pub(crate) fn flush_buffer_hashed_with<C, F>(
    buffer: &mut EmitBuffer,
    container: &mut LocalHashContainer<C>,
    mode: HashMode,
    lanes: usize,
    mut after_insert: F,
) -> Result<()>
where
    C: Combiner,
    F: FnMut(&mut LocalHashContainer<C>) -> Result<()>,
{
    let keys: Vec<&[u8]> = buffer
        .iter()
        .filter_map(|(k, _)| match k {
            KeyRef::Bytes(b) => Some(b),
            KeyRef::Int(_) => None,
        })
        .collect();
    let result = hash_batch(mode, &keys, lanes).and_then(|batch| {
        let mut hashes = batch.hashes.into_iter();
        for (k, v) in buffer.iter() {
            match k {
                KeyRef::Bytes(b) => {
                    let h = hashes.next().expect("one hash per byte key");
                    container.emit_hashed(b, h, v)?;
                }
                KeyRef::Int(_) => container.emit_intermediate(k, v)?,
            }
            after_insert(container)?;
        }
        Ok(())
    });
    buffer.clear();
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::containers::{AppendList, LocalArrayContainer, SumU64};
    use proptest::prelude::*;

    #[test]
    fn reports_full_at_capacity() {
        let mut b = EmitBuffer::new(2);
        assert_eq!(b.buffered_emit("a".into(), 1), BufferState::Accepted);
        assert_eq!(b.buffered_emit("b".into(), 1), BufferState::Full);

        let mut one = EmitBuffer::new(1);
        for i in 0..3 {
            assert_eq!(one.buffered_emit(KeyRef::Int(i), 1), BufferState::Full);
            one.clear();
        }
    }

    #[test]
    fn flush_combines_and_resets() {
        let mut b = EmitBuffer::new(4);
        b.buffered_emit("a".into(), 1);
        b.buffered_emit("a".into(), 1);
        let mut t = LocalHashContainer::<SumU64>::new(0);
        flush_buffer(&mut b, &mut t).unwrap();
        assert!(b.is_empty());
        assert_eq!(t.get(b"a"), Some(&2));

        flush_buffer(&mut b, &mut t).unwrap();
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn flush_reports_offending_index() {
        let mut b = EmitBuffer::new(4);
        b.buffered_emit(KeyRef::Int(0), 1);
        b.buffered_emit(KeyRef::Int(9), 1);
        let mut a = LocalArrayContainer::<SumU64>::new(0, 3).unwrap();
        let err = flush_buffer(&mut b, &mut a).unwrap_err();
        assert!(matches!(err, Error::KeyRangeAt { key: 9, index: 1, .. }));
        assert!(b.is_empty());
    }

    #[test]
    fn flush_keeps_append_order() {
        let emits: Vec<(&str, u64)> = vec![("k", 1), ("j", 2), ("k", 3), ("k", 4), ("j", 5)];
        let mut direct = LocalHashContainer::<AppendList>::new(0);
        for (k, v) in &emits {
            direct.emit_intermediate((*k).into(), *v).unwrap();
        }
        let mut buffered = LocalHashContainer::<AppendList>::new(0);
        let mut b = EmitBuffer::new(2);
        for (k, v) in &emits {
            if b.buffered_emit((*k).into(), *v) == BufferState::Full {
                flush_buffer(&mut b, &mut buffered).unwrap();
            }
        }
        flush_buffer(&mut b, &mut buffered).unwrap();
        for key in [b"k", b"j"] {
            assert_eq!(direct.get(key), buffered.get(key));
        }
    }

    fn run_direct(ops: &[(u16, u64)]) -> Vec<(Vec<u8>, u64)> {
        let mut t = LocalHashContainer::<SumU64>::new(0);
        for (k, v) in ops {
            t.emit_intermediate(KeyRef::Bytes(format!("key{k}").as_bytes()), *v).unwrap();
        }
        let mut out: Vec<_> = t.iter().map(|e| (e.key.to_vec(), e.acc)).collect();
        out.sort();
        out
    }

    fn run_buffered(ops: &[(u16, u64)], cap: usize, mode: Option<HashMode>) -> Vec<(Vec<u8>, u64)> {
        let mut t = LocalHashContainer::<SumU64>::new(0);
        let mut b = EmitBuffer::new(cap);
        let flush = |b: &mut EmitBuffer, t: &mut LocalHashContainer<SumU64>| match mode {
            Some(m) => flush_buffer_hashed(b, t, m, 16).unwrap(),
            None => flush_buffer(b, t).unwrap(),
        };
        for (k, v) in ops {
            if b.buffered_emit(KeyRef::Bytes(format!("key{k}").as_bytes()), *v) == BufferState::Full {
                flush(&mut b, &mut t);
            }
        }
        flush(&mut b, &mut t);
        let mut out: Vec<_> = t.iter().map(|e| (e.key.to_vec(), e.acc)).collect();
        out.sort();
        out
    }

    #[test]
    fn hundred_thousand_random_pairs_match_unbuffered() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let ops: Vec<(u16, u64)> = (0..100_000)
            .map(|_| (rng.random_range(0..5000), rng.random_range(0..100)))
            .collect();
        let want = run_direct(&ops);
        for cap in [1, 7, 1024] {
            assert_eq!(run_buffered(&ops, cap, None), want);
        }
        for mode in [HashMode::Scalar, HashMode::Padding, HashMode::Stream] {
            assert_eq!(run_buffered(&ops, 1024, Some(mode)), want);
        }
    }

    proptest! {
        #[test]
        fn buffered_equals_direct(
            ops in proptest::collection::vec((0u16..50, 0u64..10), 0..400),
            cap in 1usize..64,
        ) {
            prop_assert_eq!(run_buffered(&ops, cap, None), run_direct(&ops));
            prop_assert_eq!(run_buffered(&ops, cap, Some(HashMode::Stream)), run_direct(&ops));
        }
    }
}
