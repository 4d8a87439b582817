use super::{Container, KeyRef, Merge, WordCombiner};
use crate::error::{Error, Result};
use std::marker::PhantomData;

/// One word-sized payload per key of the inclusive range `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalArrayContainer<C: WordCombiner> {
    lo: u64,
    hi: u64,
    cells: Vec<u64>,
    _combiner: PhantomData<C>,
}

impl<C: WordCombiner> LocalArrayContainer<C> {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if hi < lo {
            return Err(Error::InvalidArgument(format!("empty key range [{lo}, {hi}]")));
        }
        let len = usize::try_from(hi - lo + 1)
            .map_err(|_| Error::InvalidArgument("key range too large".into()))?;
        Ok(LocalArrayContainer {
            lo,
            hi,
            cells: vec![C::identity(); len],
            _combiner: PhantomData,
        })
    }

    pub fn range(&self) -> (u64, u64) {
        (self.lo, self.hi)
    }

    pub fn byte_size(&self) -> usize {
        self.cells.len() * std::mem::size_of::<u64>()
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn cells_mut(&mut self) -> &mut [u64] {
        &mut self.cells
    }

    pub fn get(&self, key: u64) -> Option<u64> {
        key.checked_sub(self.lo)
            .and_then(|i| self.cells.get(i as usize))
            .copied()
    }

    #[inline]
    pub fn emit(&mut self, key: u64, value: u64) -> Result<()> {
        if key < self.lo || key > self.hi {
            return Err(Error::KeyRange {
                key,
                lo: self.lo,
                hi: self.hi,
            });
        }
        let cell = &mut self.cells[(key - self.lo) as usize];
        *cell = C::apply(*cell, value);
        Ok(())
    }

    /// `(key, payload)` for every cell that differs from the identity.
    pub fn nonidentity(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        let identity = C::identity();
        self.cells
            .iter()
            .enumerate()
            .filter(move |(_, &c)| c != identity)
            .map(move |(i, &c)| (self.lo + i as u64, c))
    }
}

impl<C: WordCombiner> Container for LocalArrayContainer<C> {
    fn emit_intermediate(&mut self, key: KeyRef<'_>, value: u64) -> Result<()> {
        match key {
            KeyRef::Int(k) => self.emit(k, value),
            KeyRef::Bytes(_) => Err(Error::KeyKind),
        }
    }
}

impl<C: WordCombiner> Merge for LocalArrayContainer<C> {
    fn merge(&mut self, local: Self) {
        assert_eq!(self.range(), local.range(), "merging arrays of different ranges");
        for (g, l) in self.cells.iter_mut().zip(local.cells) {
            *g = C::apply(*g, l);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::containers::{merge_local_into, BitwiseOr, SumU64};

    #[test]
    fn histogram_cells() {
        let mut a = LocalArrayContainer::<SumU64>::new(0, 2).unwrap();
        for k in [0u64, 0, 2] {
            a.emit_intermediate(KeyRef::Int(k), 1).unwrap();
        }
        assert_eq!(a.cells(), &[2, 0, 1]);
        assert_eq!(a.byte_size(), 24);
        assert_eq!(a.nonidentity().collect::<Vec<_>>(), vec![(0, 2), (2, 1)]);
    }

    #[test]
    fn out_of_range_and_wrong_kind() {
        let mut a = LocalArrayContainer::<BitwiseOr>::new(10, 12).unwrap();
        assert!(matches!(
            a.emit(13, 1),
            Err(Error::KeyRange { key: 13, lo: 10, hi: 12 })
        ));
        assert!(a.emit(9, 1).is_err());
        assert!(matches!(
            a.emit_intermediate(KeyRef::Bytes(b"x"), 1),
            Err(Error::KeyKind)
        ));
        a.emit(11, 0b10).unwrap();
        a.emit(11, 0b01).unwrap();
        assert_eq!(a.get(11), Some(0b11));
    }

    #[test]
    fn merge_or() {
        let mut g = LocalArrayContainer::<BitwiseOr>::new(0, 1).unwrap();
        let mut l = LocalArrayContainer::<BitwiseOr>::new(0, 1).unwrap();
        g.emit(0, 1).unwrap();
        l.emit(0, 4).unwrap();
        l.emit(1, 2).unwrap();
        merge_local_into(&mut g, l);
        assert_eq!(g.cells(), &[5, 2]);
    }
}
