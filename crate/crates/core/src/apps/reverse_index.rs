//! For every link target, the files that link to it.
//!
//! Links are `href="target"` with the attribute name matched without regard
//! to case. An opening quote with no closing quote ends the scan of that file.

use crate::app::{App, AppSpec, ContainerHint, Emit, Payload};
use crate::containers::{CombinerKind, KeyRef};
use crate::error::Result;
use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: u64,
    pub contents: Vec<u8>,
}

#[derive(Debug, Default)]
pub struct ReverseIndex {
    skipped: AtomicU64,
}

/// What [`scan_links`] found in one file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkScan<'a> {
    pub targets: Vec<&'a [u8]>,
    /// Unterminated, empty or NUL-containing targets.
    pub skipped: u64,
}

const ATTR: &[u8] = b"href=\"";

pub fn scan_links(contents: &[u8]) -> LinkScan<'_> {
    let mut scan = LinkScan::default();
    let mut pos = 0;
    while let Some(off) = contents[pos..]
        .windows(ATTR.len())
        .position(|w| w.eq_ignore_ascii_case(ATTR))
    {
        let start = pos + off + ATTR.len();
        let Some(len) = contents[start..].iter().position(|&b| b == b'"') else {
            scan.skipped += 1;
            break;
        };
        let target = &contents[start..start + len];
        if target.is_empty() || target.contains(&0) {
            scan.skipped += 1;
        } else {
            scan.targets.push(target);
        }
        pos = start + len + 1;
    }
    scan
}

impl ReverseIndex {
    pub fn new() -> Self {
        Self::default()
    }

    /// Links skipped since construction.
    pub fn skipped_links(&self) -> u64 {
        self.skipped.load(Ordering::Relaxed)
    }
}

impl App for ReverseIndex {
    type Input = [Document];

    fn spec(&self) -> AppSpec {
        AppSpec {
            app_id: "reverse_index",
            container_hint: ContainerHint::Hash,
            combiner: CombinerKind::AppendList,
        }
    }

    fn len(&self, input: &[Document]) -> usize {
        input.len()
    }

    fn map<E: Emit>(&self, input: &[Document], index: usize, out: &mut E) -> Result<()> {
        let doc = &input[index];
        let scan = scan_links(&doc.contents);
        if scan.skipped > 0 {
            self.skipped.fetch_add(scan.skipped, Ordering::Relaxed);
        }
        for target in scan.targets {
            out.emit(KeyRef::Bytes(target), doc.id)?;
        }
        Ok(())
    }

    /// Sorted, de-duplicated, comma-separated file ids.
    fn render(&self, _key: &[u8], payload: Payload<'_>) -> Vec<u8> {
        let mut ids: Vec<u64> = match payload {
            Payload::List(items) => items.iter().map(|i| i.value).collect(),
            Payload::Word(v) => vec![v],
        };
        ids.sort_unstable();
        ids.dedup();
        let parts: Vec<String> = ids.iter().map(u64::to_string).collect();
        parts.join(",").into_bytes()
    }
}
