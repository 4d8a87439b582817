//! Intermediate key-value storage with the combiner applied on every emit.

mod array;
mod atomic;
mod buffer;
mod combiner;
mod hash;

pub use array::LocalArrayContainer;
pub use atomic::GlobalAtomicArray;
pub(crate) use atomic::AtomicSink;
pub use buffer::{flush_buffer, flush_buffer_hashed, BufferState, EmitBuffer};
pub(crate) use buffer::flush_buffer_hashed_with;
pub use combiner::{
    AppendList, BitwiseOr, Combiner, CombinerKind, EmitTag, ListItem, Payload, SumU64,
    WordCombiner,
};
pub use hash::{HashEntry, LocalHashContainer};

use crate::error::Result;

/// Borrowed key as emitted by a map function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeyRef<'a> {
    Int(u64),
    Bytes(&'a [u8]),
}

impl KeyRef<'_> {
    /// Serialized form: integers as 8-byte big-endian so that byte order and
    /// numeric order coincide.
    pub fn to_bytes(&self) -> Vec<u8> {
        match *self {
            KeyRef::Int(k) => k.to_be_bytes().to_vec(),
            KeyRef::Bytes(b) => b.to_vec(),
        }
    }
}

impl<'a> From<&'a [u8]> for KeyRef<'a> {
    fn from(b: &'a [u8]) -> Self {
        KeyRef::Bytes(b)
    }
}

impl<'a> From<&'a str> for KeyRef<'a> {
    fn from(s: &'a str) -> Self {
        KeyRef::Bytes(s.as_bytes())
    }
}

impl From<u64> for KeyRef<'_> {
    fn from(k: u64) -> Self {
        KeyRef::Int(k)
    }
}

/// Anything a map worker can emit into directly.
pub trait Container {
    fn emit_intermediate(&mut self, key: KeyRef<'_>, value: u64) -> Result<()>;
}

pub trait Merge {
    /// Folds every entry of `local` into `self` with the shared combiner.
    fn merge(&mut self, local: Self);
}

pub fn merge_local_into<T: Merge>(global: &mut T, local: T) {
    global.merge(local);
}
