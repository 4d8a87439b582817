use super::{
    check_lanes, fnv_step, validate_strings, HashBatchResult, KernelStats, PrefixSumTable,
    FNV_OFFSET_BASIS,
};
use crate::error::Result;

/// Sentinel `string_id` of an idle lane.
pub const INACTIVE: usize = usize::MAX;

/// Per-lane registers of the stream kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaneState {
    pub width: usize,
    pub hash_acc: Vec<u32>,
    pub string_id: Vec<usize>,
    pub char_offset: Vec<usize>,
    /// One bit per lane, lane `j` at bit `j % 8` of byte `j / 8`.
    pub active_mask: Vec<u8>,
    pub next_string: usize,
}

impl LaneState {
    fn new(width: usize) -> Self {
        LaneState {
            width,
            hash_acc: vec![FNV_OFFSET_BASIS; width],
            string_id: vec![INACTIVE; width],
            char_offset: vec![0; width],
            active_mask: vec![0; width.div_ceil(8)],
            next_string: 0,
        }
    }

    #[inline]
    pub fn is_active(&self, lane: usize) -> bool {
        self.active_mask[lane / 8] >> (lane % 8) & 1 == 1
    }

    pub fn any_active(&self) -> bool {
        self.active_mask.iter().any(|&b| b != 0)
    }

    #[inline]
    fn set_active(&mut self, lane: usize, on: bool) {
        let bit = 1u8 << (lane % 8);
        if on {
            self.active_mask[lane / 8] |= bit;
        } else {
            self.active_mask[lane / 8] &= !bit;
        }
    }
}

#[inline]
fn set_bit(mask: &mut [u8], lane: usize) {
    mask[lane / 8] |= 1 << (lane % 8);
}

fn set_lanes(mask: &[u8], width: usize) -> impl Iterator<Item = usize> + '_ {
    (0..width).filter(move |&j| mask[j / 8] >> (j % 8) & 1 == 1)
}

/// Step-wise stream kernel.
///
/// Each [`step`](Self::step) is one lockstep iteration: every active lane
/// consumes one byte. A lane whose cursor then sits on the (virtual) zero
/// terminator writes its hash out and is refilled in the same iteration, so the
/// next iteration already processes the first byte of the next string. Refill
/// targets are `next_string + exclusive_prefix(finished)[lane]`; lanes with no
/// string left go idle. Empty strings are resolved during refill without
/// consuming an iteration.
pub struct StreamHasher<'a, S> {
    strings: &'a [S],
    table: &'a PrefixSumTable,
    state: LaneState,
    hashes: Vec<u32>,
    stats: KernelStats,
    finished: Vec<u8>,
    empties: Vec<u8>,
    prefix: Vec<u32>,
}

impl<'a, S: AsRef<[u8]>> StreamHasher<'a, S> {
    pub fn new(strings: &'a [S], lanes: usize, table: &'a PrefixSumTable) -> Result<Self> {
        check_lanes(lanes)?;
        validate_strings(strings)?;
        let mask_bytes = lanes.div_ceil(8);
        let mut hasher = StreamHasher {
            strings,
            table,
            state: LaneState::new(lanes),
            hashes: vec![FNV_OFFSET_BASIS; strings.len()],
            stats: KernelStats::default(),
            finished: vec![0; mask_bytes],
            empties: vec![0; mask_bytes],
            prefix: vec![0; lanes],
        };
        // Initial load is a refill of every lane.
        for lane in 0..lanes {
            set_bit(&mut hasher.finished, lane);
        }
        hasher.refill();
        Ok(hasher)
    }

    pub fn state(&self) -> &LaneState {
        &self.state
    }

    pub fn stats(&self) -> KernelStats {
        self.stats
    }

    /// Runs one iteration; returns `false` once every lane is idle.
    pub fn step(&mut self) -> bool {
        if !self.state.any_active() {
            return false;
        }
        self.stats.iterations += 1;
        self.finished.fill(0);
        let mut any_finished = false;
        for lane in 0..self.state.width {
            if !self.state.is_active(lane) {
                continue;
            }
            let id = self.state.string_id[lane];
            let s = self.strings[id].as_ref();
            let off = self.state.char_offset[lane];
            self.state.hash_acc[lane] = fnv_step(self.state.hash_acc[lane], s[off]);
            self.state.char_offset[lane] = off + 1;
            self.stats.lane_updates += 1;
            if off + 1 == s.len() {
                self.hashes[id] = self.state.hash_acc[lane];
                set_bit(&mut self.finished, lane);
                any_finished = true;
            }
        }
        if any_finished {
            self.refill();
        }
        true
    }

    /// Assigns fresh strings to the lanes in `self.finished`.
    fn refill(&mut self) {
        let n = self.strings.len();
        let width = self.state.width;
        loop {
            let count = self.table.exclusive_prefix(&self.finished, &mut self.prefix);
            if count == 0 {
                return;
            }
            self.empties.fill(0);
            let mut any_empty = false;
            let base = self.state.next_string;
            for lane in set_lanes(&self.finished, width) {
                let id = base + self.prefix[lane] as usize;
                if id >= n {
                    self.state.string_id[lane] = INACTIVE;
                    self.state.set_active(lane, false);
                    continue;
                }
                self.state.string_id[lane] = id;
                self.state.char_offset[lane] = 0;
                self.state.hash_acc[lane] = FNV_OFFSET_BASIS;
                if self.strings[id].as_ref().is_empty() {
                    // Terminator on the first byte: result is the offset basis.
                    self.hashes[id] = FNV_OFFSET_BASIS;
                    self.state.set_active(lane, false);
                    set_bit(&mut self.empties, lane);
                    any_empty = true;
                } else {
                    self.state.set_active(lane, true);
                }
            }
            self.state.next_string = (base + count as usize).min(n);
            if !any_empty {
                return;
            }
            std::mem::swap(&mut self.finished, &mut self.empties);
        }
    }

    pub fn finish(mut self) -> (HashBatchResult, KernelStats) {
        while self.step() {}
        (HashBatchResult { hashes: self.hashes }, self.stats)
    }
}

pub fn hash_batch_stream<S: AsRef<[u8]>>(
    strings: &[S],
    lanes: usize,
    table: &PrefixSumTable,
) -> Result<HashBatchResult> {
    hash_batch_stream_with_stats(strings, lanes, table).map(|(r, _)| r)
}

pub fn hash_batch_stream_with_stats<S: AsRef<[u8]>>(
    strings: &[S],
    lanes: usize,
    table: &PrefixSumTable,
) -> Result<(HashBatchResult, KernelStats)> {
    Ok(StreamHasher::new(strings, lanes, table)?.finish())
}
