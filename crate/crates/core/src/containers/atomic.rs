use super::{Container, KeyRef, WordCombiner};
use crate::error::{Error, Result};
use std::marker::PhantomData;
use std::sync::atomic::{AtomicU64, Ordering};

/// A single array shared by every map worker, updated with atomic add or or.
///
/// Updates use relaxed ordering; visibility of the final contents to readers
/// comes from joining the writer threads.
#[derive(Debug)]
pub struct GlobalAtomicArray<C: WordCombiner> {
    lo: u64,
    hi: u64,
    cells: Box<[AtomicU64]>,
    _combiner: PhantomData<C>,
}

impl<C: WordCombiner> GlobalAtomicArray<C> {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidArgument(format!("empty key range [{lo}, {hi}]")));
        }
        let len = usize::try_from(hi - lo + 1)
            .map_err(|_| Error::InvalidArgument("key range too large".into()))?;
        Ok(GlobalAtomicArray {
            lo,
            hi,
            cells: (0..len).map(|_| AtomicU64::new(C::identity())).collect(),
            _combiner: PhantomData,
        })
    }

    pub fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    pub fn byte_size(&self) -> usize {
        self.cells.len() * std::mem::size_of::<AtomicU64>()
    }

    #[inline]
    pub fn atomic_combine(&self, key: u64, value: u64) -> Result<()> {
        if key < self.lo || key > self.hi {
            return Err(Error::KeyRange {
                key,
                lo: self.lo,
                hi: self.hi,
            });
        }
        C::apply_atomic(&self.cells[(key - self.lo) as usize], value);
        Ok(())
    }

    pub fn load(&self, key: u64) -> Option<u64> {
        key.checked_sub(self.lo)
            .and_then(|i| self.cells.get(i as usize))
            .map(|c| c.load(Ordering::Acquire))
    }

    /// Plain copy of the cells; call after all writers have quiesced.
    pub fn snapshot(&self) -> Vec<u64> {
        self.cells.iter().map(|c| c.load(Ordering::Acquire)).collect()
    }

    pub fn into_cells(self) -> Vec<u64> {
        self.cells.into_vec().into_iter().map(AtomicU64::into_inner).collect()
    }
}

/// Emit target that routes into a shared [`GlobalAtomicArray`].
pub(crate) struct AtomicSink<'a, C: WordCombiner>(pub &'a GlobalAtomicArray<C>);

impl<C: WordCombiner> Container for AtomicSink<'_, C> {
    #[inline]
    fn emit_intermediate(&mut self, key: KeyRef<'_>, value: u64) -> Result<()> {
        match key {
            KeyRef::Int(k) => self.0.atomic_combine(k, value),
            KeyRef::Bytes(_) => Err(Error::KeyKind),
        }
    }
}
