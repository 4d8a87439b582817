//! Bloom filter construction with double hashing, `h_i = h1 + i * h2 mod m`.

use super::{int_key, render_word};
use crate::app::{App, AppSpec, ArraySize, ContainerHint, Emit, Pair, Payload};
use crate::containers::{CombinerKind, KeyRef};
use crate::error::{Error, Result};
use crate::hashkit::{fnv_step, scalar_hash};

pub const DEFAULT_HASHES: u32 = 2;
const SALT: u8 = 0x5b;

/// Murmur3 finalizer. FNV-1a of `x ++ salt` is one multiply away from FNV-1a
/// of `x`, and raw double hashing over that pair sets about twice as many
/// false positive bits as the formula predicts.
pub fn fmix32(mut h: u32) -> u32 {
    h ^= h >> 16;
    h = h.wrapping_mul(0x85eb_ca6b);
    h ^= h >> 13;
    h = h.wrapping_mul(0xc2b2_ae35);
    h ^ (h >> 16)
}

#[derive(Debug, Clone, Copy)]
pub struct BloomFilter {
    bits: u64,
    hashes: u32,
}

impl BloomFilter {
    pub fn new(bits: u64, hashes: u32) -> Result<Self> {
        if bits == 0 || hashes == 0 {
            return Err(Error::InvalidArgument("bloom filter needs m >= 1 and k >= 1".into()));
        }
        Ok(BloomFilter { bits, hashes })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn hashes(&self) -> u32 {
        self.hashes
    }

    /// 64-bit words backing the bit array.
    pub fn words(&self) -> u64 {
        self.bits.div_ceil(64)
    }

    /// Bit positions set for `element`.
    pub fn positions(&self, element: &[u8]) -> impl Iterator<Item = u64> {
        let base = scalar_hash(element);
        // FNV continues from the element's hash, so the salted hash needs one more step.
        let h1 = fmix32(base) as u64;
        let h2 = (fmix32(fnv_step(base, SALT)) | 1) as u64;
        let m = self.bits;
        (0..self.hashes as u64).map(move |i| (h1 + i * h2) % m)
    }

    /// Dense word array from the job output.
    pub fn bit_array(&self, pairs: &[Pair]) -> Result<Vec<u64>> {
        let mut words = vec![0u64; self.words() as usize];
        for (k, v) in pairs {
            let cell = int_key(k)
                .filter(|&c| c < self.words())
                .ok_or_else(|| Error::InvalidArgument("bloom output key out of range".into()))?;
            words[cell as usize] = std::str::from_utf8(v)
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::InvalidArgument("bloom output value is not a word".into()))?;
        }
        Ok(words)
    }

    pub fn contains(&self, words: &[u64], element: &[u8]) -> bool {
        self.positions(element)
            .all(|b| words[(b / 64) as usize] & (1 << (b % 64)) != 0)
    }

    /// `(1 - e^{-kn/m})^k`.
    pub fn expected_fpr(&self, inserted: u64) -> f64 {
        let k = self.hashes as f64;
        (1.0 - (-k * inserted as f64 / self.bits as f64).exp()).powf(k)
    }
}

impl App for BloomFilter {
    type Input = [Vec<u8>];

    fn spec(&self) -> AppSpec {
        AppSpec {
            app_id: "bloom_filter",
            container_hint: ContainerHint::Array {
                size: ArraySize::Large,
                lo: 0,
                hi: self.words() - 1,
            },
            combiner: CombinerKind::BitwiseOr,
        }
    }

    fn len(&self, input: &[Vec<u8>]) -> usize {
        input.len()
    }

    fn map<E: Emit>(&self, input: &[Vec<u8>], index: usize, out: &mut E) -> Result<()> {
        for bit in self.positions(&input[index]) {
            out.emit(KeyRef::Int(bit / 64), 1 << (bit % 64))?;
        }
        Ok(())
    }

    fn render(&self, _key: &[u8], payload: Payload<'_>) -> Vec<u8> {
        render_word(payload)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ContainerMode, JobConfig};
    use crate::job::run_job;

    fn build(f: &BloomFilter, keys: &[Vec<u8>], mode: ContainerMode) -> Vec<u64> {
        let mut cfg = JobConfig::new("bloom_filter");
        cfg.map_workers = 4;
        cfg.container_mode = mode;
        f.bit_array(&run_job(&cfg, f, keys).unwrap().pairs).unwrap()
    }

    #[test]
    fn salted_hash_matches_appended_byte() {
        let f = BloomFilter::new(1 << 40, 2).unwrap();
        let x = b"ACGTACGT";
        let mut salted = x.to_vec();
        salted.push(SALT);
        let h1 = fmix32(scalar_hash(x)) as u64;
        let h2 = (fmix32(scalar_hash(&salted)) | 1) as u64;
        assert_eq!(f.positions(x).collect::<Vec<_>>(), vec![h1, h1 + h2]);
    }

    #[test]
    fn no_false_negatives_and_empty_filter() {
        let f = BloomFilter::new(10_000, 3).unwrap();
        let keys: Vec<Vec<u8>> = (0..500).map(|i| format!("key-{i}").into_bytes()).collect();
        for mode in [ContainerMode::LocalArray, ContainerMode::GlobalAtomicArray, ContainerMode::Hash] {
            let words = build(&f, &keys, mode);
            assert!(keys.iter().all(|k| f.contains(&words, k)));
        }
        let empty = build(&f, &[], ContainerMode::Auto);
        assert!(!f.contains(&empty, b"key-1"));
        assert!(empty.iter().all(|&w| w == 0));
    }

    #[test]
    fn fmix_known_values() {
        assert_eq!(fmix32(0), 0);
        assert_eq!(fmix32(1), 0x514e_28b7);
        assert_eq!(fmix32(0xdead_beef), 0x0de5_c6a9);
    }

    #[test]
    fn one_bit_filter() {
        let f = BloomFilter::new(1, 1).unwrap();
        let words = build(&f, &[b"a".to_vec()], ContainerMode::Auto);
        assert_eq!(words, vec![1]);
        assert!(f.contains(&words, b"anything"));
    }

    #[test]
    fn expected_rate() {
        let f = BloomFilter::new(1_000_000, 2).unwrap();
        assert!((f.expected_fpr(100_000) - 0.032_858_539_879_675_58).abs() < 1e-15);
        assert!(BloomFilter::new(0, 2).is_err());
        assert!(BloomFilter::new(8, 0).is_err());
    }
}
