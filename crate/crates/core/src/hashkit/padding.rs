use super::{check_lanes, fnv_step, validate_strings, HashBatchResult, KernelStats, FNV_OFFSET_BASIS};
use crate::error::Result;

pub fn hash_batch_padding<S: AsRef<[u8]>>(strings: &[S], lanes: usize) -> Result<HashBatchResult> {
    hash_batch_padding_with_stats(strings, lanes).map(|(r, _)| r)
}

/// Grouped kernel: each group of `lanes` consecutive strings runs for `L_r`
/// iterations, the length of its longest member. A lane is masked once its
/// position passes the end of its string; the padding byte is zero and the
/// mask keeps it out of the accumulator. Surplus lanes of a trailing partial
/// group stay inactive.
pub fn hash_batch_padding_with_stats<S: AsRef<[u8]>>(
    strings: &[S],
    lanes: usize,
) -> Result<(HashBatchResult, KernelStats)> {
    check_lanes(lanes)?;
    validate_strings(strings)?;

    let mut hashes = Vec::with_capacity(strings.len());
    let mut stats = KernelStats::default();
    let mut acc = vec![FNV_OFFSET_BASIS; lanes];
    let mut views: Vec<&[u8]> = Vec::with_capacity(lanes);

    for group in strings.chunks(lanes) {
        views.clear();
        views.extend(group.iter().map(AsRef::as_ref));
        let longest = views.iter().map(|s| s.len()).max().unwrap_or(0);
        acc.fill(FNV_OFFSET_BASIS);

        for pos in 0..longest {
            stats.iterations += 1;
            for (h, s) in acc.iter_mut().zip(&views) {
                let active = pos < s.len();
                let byte = if active { s[pos] } else { 0 };
                let next = fnv_step(*h, byte);
                *h = if active { next } else { *h };
                stats.lane_updates += u64::from(active);
            }
        }
        hashes.extend_from_slice(&acc[..views.len()]);
    }
    Ok((HashBatchResult { hashes }, stats))
}
