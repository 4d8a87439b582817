use std::ops::Range;

/// A contiguous slice of the input assigned to one map worker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputSplit {
    pub begin: usize,
    pub end: usize,
    pub worker_id: usize,
}

impl InputSplit {
    pub fn range(&self) -> Range<usize> {
        self.begin..self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.begin
    }

    pub fn is_empty(&self) -> bool {
        self.begin == self.end
    }
}

/// Block partition of `[0, n_elements)` over `n_workers`.
///
/// The first `n_elements % n_workers` splits carry one extra element. A zero
/// worker count is treated as one.
pub fn split_input(n_elements: usize, n_workers: usize) -> Vec<InputSplit> {
    let n_workers = n_workers.max(1);
    let base = n_elements / n_workers;
    let extra = n_elements % n_workers;
    let mut begin = 0;
    (0..n_workers)
        .map(|worker_id| {
            let len = base + usize::from(worker_id < extra);
            let split = InputSplit {
                begin,
                end: begin + len,
                worker_id,
            };
            begin += len;
            split
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ranges(splits: &[InputSplit]) -> Vec<(usize, usize)> {
        splits.iter().map(|s| (s.begin, s.end)).collect()
    }

    #[test]
    fn ten_over_three() {
        assert_eq!(ranges(&split_input(10, 3)), vec![(0, 4), (4, 7), (7, 10)]);
    }

    #[test]
    fn singletons_and_empty() {
        assert_eq!(
            ranges(&split_input(5, 5)),
            vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]
        );
        let empty = split_input(0, 4);
        assert_eq!(empty.len(), 4);
        assert!(empty.iter().all(InputSplit::is_empty));
    }

    proptest! {
        #[test]
        fn splits_cover_exactly(n in 0usize..5000, w in 1usize..300) {
            let splits = split_input(n, w);
            prop_assert_eq!(splits.len(), w);
            let mut next = 0;
            for (i, s) in splits.iter().enumerate() {
                prop_assert_eq!(s.worker_id, i);
                prop_assert_eq!(s.begin, next);
                prop_assert!(s.begin <= s.end);
                next = s.end;
            }
            prop_assert_eq!(next, n);
            let longest = splits.iter().map(InputSplit::len).max().unwrap();
            let shortest = splits.iter().map(InputSplit::len).min().unwrap();
            prop_assert!(longest - shortest <= 1);
        }
    }
}
