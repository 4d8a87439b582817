use super::render_word;
use crate::app::{App, AppSpec, ArraySize, ContainerHint, Emit, Payload};
use crate::containers::{CombinerKind, KeyRef};
use crate::error::{Error, Result};

/// Counts occurrences of each value in `[0, buckets)`.
#[derive(Debug, Clone, Copy)]
pub struct Histogram {
    buckets: u64,
}

impl Histogram {
    pub fn new(buckets: u64) -> Result<Self> {
        if buckets == 0 {
            return Err(Error::InvalidArgument("histogram needs at least one bucket".into()));
        }
        Ok(Histogram { buckets })
    }

    pub fn buckets(&self) -> u64 {
        self.buckets
    }
}

/// Raw little-endian `u32` values.
pub fn parse_le_u32(bytes: &[u8]) -> Result<Vec<u32>> {
    if bytes.len() % 4 != 0 {
        return Err(Error::InvalidArgument(format!(
            "histogram input is {} bytes, not a multiple of 4",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect())
}

impl App for Histogram {
    type Input = [u32];

    fn spec(&self) -> AppSpec {
        AppSpec {
            app_id: "histogram",
            container_hint: ContainerHint::Array {
                size: ArraySize::Large,
                lo: 0,
                hi: self.buckets - 1,
            },
            combiner: CombinerKind::SumU64,
        }
    }

    fn len(&self, input: &[u32]) -> usize {
        input.len()
    }

    #[inline]
    fn map<E: Emit>(&self, input: &[u32], index: usize, out: &mut E) -> Result<()> {
        out.emit(KeyRef::Int(input[index] as u64), 1)
    }

    fn render(&self, _key: &[u8], payload: Payload<'_>) -> Vec<u8> {
        render_word(payload)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apps::int_key;
    use crate::config::{ContainerMode, JobConfig};
    use crate::job::run_job;

    fn cells(h: &Histogram, input: &[u32], mode: ContainerMode) -> Result<Vec<u64>> {
        let mut cfg = JobConfig::new("histogram");
        cfg.map_workers = 2;
        cfg.container_mode = mode;
        let pairs = run_job(&cfg, h, input)?.pairs;
        let mut out = vec![0; h.buckets() as usize];
        for (k, v) in pairs {
            out[int_key(&k).unwrap() as usize] = std::str::from_utf8(&v).unwrap().parse().unwrap();
        }
        Ok(out)
    }

    #[test]
    fn small_example() {
        let h = Histogram::new(3).unwrap();
        for mode in [ContainerMode::LocalArray, ContainerMode::GlobalAtomicArray, ContainerMode::Hash] {
            assert_eq!(cells(&h, &[0, 0, 2], mode).unwrap(), vec![2, 0, 1]);
            assert_eq!(cells(&h, &[], mode).unwrap(), vec![0, 0, 0]);
        }
    }

    #[test]
    fn out_of_range_element() {
        let h = Histogram::new(3).unwrap();
        assert!(matches!(
            cells(&h, &[1, 3], ContainerMode::LocalArray),
            Err(Error::KeyRange { key: 3, .. })
        ));
    }

    #[test]
    fn le_parsing() {
        assert_eq!(parse_le_u32(&[1, 0, 0, 0, 0, 1, 0, 0]).unwrap(), vec![1, 256]);
        assert!(parse_le_u32(&[1, 2, 3]).is_err());
        assert!(Histogram::new(0).is_err());
    }
}
