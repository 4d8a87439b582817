//! The contract between the framework and a MapReduce application.

pub use crate::containers::Payload;
use crate::containers::{CombinerKind, KeyRef};
use crate::error::Result;

/// Relative size class of an array container.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArraySize {
    Small,
    Large,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContainerHint {
    /// Arbitrary byte-string keys.
    Hash,
    /// Integer keys in the inclusive range `[lo, hi]`.
    Array { size: ArraySize, lo: u64, hi: u64 },
    /// One output row per input element, no aggregation.
    MapOnly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppSpec {
    pub app_id: &'static str,
    pub container_hint: ContainerHint,
    pub combiner: CombinerKind,
}

impl AppSpec {
    /// Bytes of one array container over the hinted key range (64-bit cells).
    pub fn array_bytes(&self) -> Option<u64> {
        match self.container_hint {
            ContainerHint::Array { lo, hi, .. } => Some((hi - lo + 1).saturating_mul(8)),
            _ => None,
        }
    }

    pub fn key_range(&self) -> Option<(u64, u64)> {
        match self.container_hint {
            ContainerHint::Array { lo, hi, .. } => Some((lo, hi)),
            _ => None,
        }
    }
}

/// Receives the pairs produced by one map operation.
pub trait Emit {
    fn emit(&mut self, key: KeyRef<'_>, value: u64) -> Result<()>;

    /// Output row of a map-only application. Keyed apps must not call this.
    fn emit_row(&mut self, row: Vec<u8>) -> Result<()>;
}

/// Serialized result pair.
pub type Pair = (Vec<u8>, Vec<u8>);

pub trait App: Sync {
    type Input: ?Sized + Sync;

    fn spec(&self) -> AppSpec;

    /// Number of map operations the input breaks into.
    fn len(&self, input: &Self::Input) -> usize;

    /// Runs map operation `index`. Must only touch shared state through `out`.
    fn map<E: Emit>(&self, input: &Self::Input, index: usize, out: &mut E) -> Result<()>;

    /// Value bytes of one combined key.
    fn render(&self, key: &[u8], payload: Payload<'_>) -> Vec<u8>;

    /// Final pass over the sorted pairs.
    fn finish(&self, pairs: Vec<Pair>) -> Vec<Pair> {
        pairs
    }
}
