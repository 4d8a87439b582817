use super::render_word;
use crate::app::{App, AppSpec, ContainerHint, Emit, Payload};
use crate::containers::{CombinerKind, KeyRef};
use crate::error::Result;
use std::ops::Range;

pub const DEFAULT_CHUNK_BYTES: usize = 16 << 10;

/// Text cut into chunks that end on whitespace, so no word straddles two.
#[derive(Debug, Clone)]
pub struct WordCountInput {
    text: Vec<u8>,
    chunks: Vec<Range<usize>>,
}

impl WordCountInput {
    pub fn new(text: Vec<u8>, chunk_bytes: usize) -> Self {
        let chunks = chunk_text(&text, chunk_bytes);
        WordCountInput { text, chunks }
    }

    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn chunks(&self) -> &[Range<usize>] {
        &self.chunks
    }
}

/// Cuts `text` roughly every `chunk_bytes`, moving each cut forward to the
/// next whitespace byte.
pub fn chunk_text(text: &[u8], chunk_bytes: usize) -> Vec<Range<usize>> {
    let chunk_bytes = chunk_bytes.max(1);
    let mut out = Vec::new();
    let mut start = 0;
    while start < text.len() {
        let mut end = (start + chunk_bytes).min(text.len());
        while end < text.len() && !text[end].is_ascii_whitespace() {
            end += 1;
        }
        out.push(start..end);
        start = end;
    }
    out
}

/// Runs of ASCII letters and digits.
pub fn tokens(bytes: &[u8]) -> impl Iterator<Item = &[u8]> {
    bytes
        .split(|b| !b.is_ascii_alphanumeric())
        .filter(|t| !t.is_empty())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WordCount;

impl App for WordCount {
    type Input = WordCountInput;

    fn spec(&self) -> AppSpec {
        AppSpec {
            app_id: "word_count",
            container_hint: ContainerHint::Hash,
            combiner: CombinerKind::SumU64,
        }
    }

    fn len(&self, input: &WordCountInput) -> usize {
        input.chunks.len()
    }

    fn map<E: Emit>(&self, input: &WordCountInput, index: usize, out: &mut E) -> Result<()> {
        let mut lower = Vec::with_capacity(32);
        for token in tokens(&input.text[input.chunks[index].clone()]) {
            lower.clear();
            lower.extend(token.iter().map(u8::to_ascii_lowercase));
            out.emit(KeyRef::Bytes(&lower), 1)?;
        }
        Ok(())
    }

    fn render(&self, _key: &[u8], payload: Payload<'_>) -> Vec<u8> {
        render_word(payload)
    }
}
