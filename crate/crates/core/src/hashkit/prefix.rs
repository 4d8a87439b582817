use std::sync::OnceLock;

/// Exclusive prefix popcounts for every byte value.
///
/// `entry(b)[i]` is the number of set bits of `b` strictly below bit `i`. Masks
/// wider than eight lanes are handled one byte at a time, carrying the running
/// popcount, so 256 eight-entry rows (2 KiB) cover any lane count.
#[derive(Clone)]
pub struct PrefixSumTable {
    entries: Box<[[u8; 8]; 256]>,
}

impl std::fmt::Debug for PrefixSumTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrefixSumTable")
            .field("bytes", &self.size_bytes())
            .finish()
    }
}

pub fn build_prefix_table() -> PrefixSumTable {
    let mut entries = Box::new([[0u8; 8]; 256]);
    for (b, row) in entries.iter_mut().enumerate() {
        let mut running = 0u8;
        for (i, slot) in row.iter_mut().enumerate() {
            *slot = running;
            running += ((b >> i) & 1) as u8;
        }
    }
    PrefixSumTable { entries }
}

impl PrefixSumTable {
    /// Process-wide read-only instance.
    pub fn shared() -> &'static PrefixSumTable {
        static TABLE: OnceLock<PrefixSumTable> = OnceLock::new();
        TABLE.get_or_init(build_prefix_table)
    }

    #[inline]
    pub fn entry(&self, byte: u8) -> &[u8; 8] {
        &self.entries[byte as usize]
    }

    pub fn size_bytes(&self) -> usize {
        std::mem::size_of::<[[u8; 8]; 256]>()
    }

    /// Exclusive prefix of a 16-lane mask, combined from its two bytes.
    pub fn exclusive_prefix16(&self, mask: u16) -> [u8; 16] {
        let lo = (mask & 0xff) as u8;
        let hi = (mask >> 8) as u8;
        let carry = lo.count_ones() as u8;
        let mut out = [0u8; 16];
        out[..8].copy_from_slice(self.entry(lo));
        for (dst, &src) in out[8..].iter_mut().zip(self.entry(hi)) {
            *dst = carry + src;
        }
        out
    }

    /// Exclusive prefix of an arbitrary-width mask stored little-endian by byte
    /// (lane `j` is bit `j % 8` of byte `j / 8`). Writes one count per lane of
    /// `out` and returns the total popcount.
    pub fn exclusive_prefix(&self, mask: &[u8], out: &mut [u32]) -> u32 {
        let mut carry = 0u32;
        for (byte_idx, chunk) in out.chunks_mut(8).enumerate() {
            let byte = mask.get(byte_idx).copied().unwrap_or(0);
            let row = self.entry(byte);
            for (dst, &src) in chunk.iter_mut().zip(row) {
                *dst = carry + u32::from(src);
            }
            carry += byte.count_ones();
        }
        carry
    }
}
