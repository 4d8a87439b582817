//! String hashing: the scalar FNV-1a reference, two lane-parallel batch
//! kernels, and key partitioning.
//!
//! Both batch kernels advance `W` independent hash accumulators in lockstep,
//! one byte per lane per iteration. They differ in how lanes are fed:
//!
//! * [`hash_batch_padding`] processes consecutive groups of `W` strings and
//!   runs each group for as many iterations as its longest member; lanes whose
//!   string already ended are masked off.
//! * [`hash_batch_stream`] treats the input as a stream. As soon as a lane
//!   finishes a string it is refilled with the next unassigned string, with the
//!   destination index computed from an exclusive prefix sum over the mask of
//!   finished lanes ([`PrefixSumTable`]).
//!
//! Kernels see each string as if followed by a zero terminator, so strings
//! passed to them must not contain zero bytes.

mod padding;
mod prefix;
mod stream;

pub use padding::{hash_batch_padding, hash_batch_padding_with_stats};
pub use prefix::{build_prefix_table, PrefixSumTable};
pub use stream::{hash_batch_stream, hash_batch_stream_with_stats, LaneState, StreamHasher};

use crate::config::HashMode;
use crate::error::{Error, Result};

pub const FNV_OFFSET_BASIS: u32 = 2_166_136_261;
pub const FNV_PRIME: u32 = 16_777_619;

/// Per-call hashes, `hashes[i]` belonging to input string `i`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct HashBatchResult {
    pub hashes: Vec<u32>,
}

/// Instrumentation counters for the batch kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KernelStats {
    /// Lockstep iterations executed.
    pub iterations: u64,
    /// Accumulator updates that consumed a real byte.
    pub lane_updates: u64,
}

#[inline(always)]
pub(crate) fn fnv_step(acc: u32, byte: u8) -> u32 {
    (acc ^ u32::from(byte)).wrapping_mul(FNV_PRIME)
}

/// 32-bit FNV-1a.
#[inline]
pub fn scalar_hash(s: &[u8]) -> u32 {
    s.iter().fold(FNV_OFFSET_BASIS, |acc, &b| fnv_step(acc, b))
}

#[inline]
pub fn partition_of(key_hash: u32, n_partitions: usize) -> usize {
    debug_assert!(n_partitions >= 1);
    (key_hash as usize) % n_partitions.max(1)
}

pub(crate) fn check_lanes(lanes: usize) -> Result<()> {
    if lanes == 0 {
        return Err(Error::InvalidArgument("lane width must be at least 1".into()));
    }
    Ok(())
}

/// Rejects strings that would be cut short by the kernels' virtual terminator.
pub fn validate_strings<S: AsRef<[u8]>>(strings: &[S]) -> Result<()> {
    match strings.iter().position(|s| s.as_ref().contains(&0)) {
        Some(index) => Err(Error::InteriorZero { index }),
        None => Ok(()),
    }
}

/// Hash a batch with the kernel selected by `mode`.
pub fn hash_batch<S: AsRef<[u8]>>(
    mode: HashMode,
    strings: &[S],
    lanes: usize,
) -> Result<HashBatchResult> {
    match mode {
        HashMode::Scalar => {
            validate_strings(strings)?;
            Ok(HashBatchResult {
                hashes: strings.iter().map(|s| scalar_hash(s.as_ref())).collect(),
            })
        }
        HashMode::Padding => hash_batch_padding(strings, lanes),
        HashMode::Stream => hash_batch_stream(strings, lanes, PrefixSumTable::shared()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    // Written independently of `scalar_hash`: explicit loop, u64 arithmetic.
    fn fnv1a_oracle(s: &[u8]) -> u32 {
        let mut h: u64 = 0x811c_9dc5;
        for &c in s {
            h ^= c as u64;
            h = (h * 0x0100_0193) & 0xffff_ffff;
        }
        h as u32
    }

    #[test]
    fn published_vectors() {
        assert_eq!(scalar_hash(b""), 2_166_136_261);
        assert_eq!(scalar_hash(b"a"), 0xE40C_292C);
        assert_eq!(scalar_hash(b"foobar"), 0xBF9C_F968);
    }

    #[test]
    fn partition_examples() {
        assert_eq!(partition_of(7, 3), 1);
        for h in [0, 1, 12345, u32::MAX] {
            assert_eq!(partition_of(h, 1), 0);
        }
    }

    #[test]
    fn partition_balance_over_random_words() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut buckets = [0u64; 60];
        let mut word = Vec::with_capacity(12);
        for _ in 0..1_000_000 {
            word.clear();
            let len = rng.random_range(3..12);
            word.extend((0..len).map(|_| rng.random_range(b'a'..=b'z')));
            buckets[partition_of(scalar_hash(&word), 60)] += 1;
        }
        let max = *buckets.iter().max().unwrap() as f64;
        let min = *buckets.iter().min().unwrap() as f64;
        assert!(max / min < 1.2, "ratio {}", max / min);
    }

    #[test]
    fn interior_zero_rejected() {
        let strings: [&[u8]; 2] = [b"ok", b"b\0d"];
        assert!(matches!(
            validate_strings(&strings),
            Err(Error::InteriorZero { index: 1 })
        ));
        for mode in [HashMode::Scalar, HashMode::Padding, HashMode::Stream] {
            assert!(hash_batch(mode, &strings, 4).is_err());
        }
    }

    proptest! {
        #[test]
        fn scalar_matches_oracle(s in proptest::collection::vec(any::<u8>(), 0..200)) {
            prop_assert_eq!(scalar_hash(&s), fnv1a_oracle(&s));
        }

        #[test]
        fn all_modes_agree(
            strings in proptest::collection::vec(proptest::collection::vec(1u8..=255, 0..24), 0..80),
            lanes in 1usize..20,
        ) {
            let want: Vec<u32> = strings.iter().map(|s| fnv1a_oracle(s)).collect();
            for mode in [HashMode::Scalar, HashMode::Padding, HashMode::Stream] {
                prop_assert_eq!(&hash_batch(mode, &strings, lanes).unwrap().hashes, &want);
            }
        }
    }
}
