use std::fmt::Debug;
use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombinerKind {
    SumU64,
    BitwiseOr,
    AppendList,
}

impl CombinerKind {
    /// Whether a single shared array can absorb this fold with atomic RMW ops.
    pub fn is_atomic_capable(self) -> bool {
        matches!(self, CombinerKind::SumU64 | CombinerKind::BitwiseOr)
    }
}

/// Emission order of a value: owning map worker, then that worker's emit count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct EmitTag {
    pub worker: u32,
    pub seq: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ListItem {
    pub tag: EmitTag,
    pub value: u64,
}

/// Borrowed view of a combined payload.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Payload<'a> {
    Word(u64),
    List(&'a [ListItem]),
}

/// Fold applied to each emitted value against the payload stored for its key.
pub trait Combiner: Copy + Default + Send + Sync + 'static {
    type Acc: Clone + Send + Sync + Debug + PartialEq;
    const KIND: CombinerKind;

    fn identity() -> Self::Acc;
    fn fold(acc: &mut Self::Acc, value: u64, tag: EmitTag);
    fn merge(acc: &mut Self::Acc, other: Self::Acc);

    /// Puts the payload in its canonical final form.
    fn finalize(_acc: &mut Self::Acc) {}

    /// Heap bytes owned by the payload, for budget accounting.
    fn heap_bytes(_acc: &Self::Acc) -> usize {
        0
    }

    fn payload(acc: &Self::Acc) -> Payload<'_>;
}

/// Combiners whose payload is a single machine word.
pub trait WordCombiner: Combiner<Acc = u64> {
    fn apply(acc: u64, value: u64) -> u64;
    fn apply_atomic(cell: &AtomicU64, value: u64);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SumU64;

#[derive(Debug, Clone, Copy, Default)]
pub struct BitwiseOr;

/// Collects every value; the final list is ordered by [`EmitTag`].
#[derive(Debug, Clone, Copy, Default)]
pub struct AppendList;

impl Combiner for SumU64 {
    type Acc = u64;
    const KIND: CombinerKind = CombinerKind::SumU64;

    fn identity() -> u64 {
        0
    }
    #[inline]
    fn fold(acc: &mut u64, value: u64, _tag: EmitTag) {
        *acc = acc.wrapping_add(value);
    }
    fn merge(acc: &mut u64, other: u64) {
        *acc = acc.wrapping_add(other);
    }
    fn payload(acc: &u64) -> Payload<'_> {
        Payload::Word(*acc)
    }
}

impl WordCombiner for SumU64 {
    #[inline]
    fn apply(acc: u64, value: u64) -> u64 {
        acc.wrapping_add(value)
    }
    #[inline]
    fn apply_atomic(cell: &AtomicU64, value: u64) {
        cell.fetch_add(value, Ordering::Relaxed);
    }
}

impl Combiner for BitwiseOr {
    type Acc = u64;
    const KIND: CombinerKind = CombinerKind::BitwiseOr;

    fn identity() -> u64 {
        0
    }
    #[inline]
    fn fold(acc: &mut u64, value: u64, _tag: EmitTag) {
        *acc |= value;
    }
    fn merge(acc: &mut u64, other: u64) {
        *acc |= other;
    }
    fn payload(acc: &u64) -> Payload<'_> {
        Payload::Word(*acc)
    }
}

impl WordCombiner for BitwiseOr {
    #[inline]
    fn apply(acc: u64, value: u64) -> u64 {
        acc | value
    }
    #[inline]
    fn apply_atomic(cell: &AtomicU64, value: u64) {
        cell.fetch_or(value, Ordering::Relaxed);
    }
}

impl Combiner for AppendList {
    type Acc = Vec<ListItem>;
    const KIND: CombinerKind = CombinerKind::AppendList;

    fn identity() -> Vec<ListItem> {
        Vec::new()
    }
    fn fold(acc: &mut Vec<ListItem>, value: u64, tag: EmitTag) {
        acc.push(ListItem { tag, value });
    }
    fn merge(acc: &mut Vec<ListItem>, mut other: Vec<ListItem>) {
        acc.append(&mut other);
    }
    fn finalize(acc: &mut Vec<ListItem>) {
        acc.sort_by_key(|item| item.tag);
    }
    fn heap_bytes(acc: &Vec<ListItem>) -> usize {
        acc.capacity() * std::mem::size_of::<ListItem>()
    }
    fn payload(acc: &Vec<ListItem>) -> Payload<'_> {
        Payload::List(acc)
    }
}
