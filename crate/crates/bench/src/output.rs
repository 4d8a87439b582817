//! `key<TAB>value<LF>` result files.
//!
//! Integer keys are written in decimal. Byte strings escape `\`, tab and
//! newline as `\\`, `\t` and `\n` so every file parses back to the exact pairs.

use shmr::Pair;
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyFormat {
    /// 8-byte big-endian integer keys.
    Int,
    Bytes,
}

impl KeyFormat {
    pub fn for_app(app_id: &str) -> KeyFormat {
        match app_id {
            "word_count" | "reverse_index" => KeyFormat::Bytes,
            _ => KeyFormat::Int,
        }
    }
}

fn escape(bytes: &[u8], out: &mut Vec<u8>) {
    for &b in bytes {
        match b {
            b'\\' => out.extend_from_slice(b"\\\\"),
            b'\t' => out.extend_from_slice(b"\\t"),
            b'\n' => out.extend_from_slice(b"\\n"),
            _ => out.push(b),
        }
    }
}

fn unescape(bytes: &[u8]) -> Result<Vec<u8>, String> {
    let mut out = Vec::with_capacity(bytes.len());
    let mut it = bytes.iter();
    while let Some(&b) = it.next() {
        if b != b'\\' {
            out.push(b);
            continue;
        }
        match it.next() {
            Some(b'\\') => out.push(b'\\'),
            Some(b't') => out.push(b'\t'),
            Some(b'n') => out.push(b'\n'),
            other => return Err(format!("bad escape {other:?}")),
        }
    }
    Ok(out)
}

pub fn encode(pairs: &[Pair], format: KeyFormat) -> Vec<u8> {
    let mut out = Vec::new();
    for (k, v) in pairs {
        match format {
            KeyFormat::Int => {
                let key = u64::from_be_bytes(k.as_slice().try_into().expect("8-byte integer key"));
                out.extend_from_slice(key.to_string().as_bytes());
            }
            KeyFormat::Bytes => escape(k, &mut out),
        }
        out.push(b'\t');
        escape(v, &mut out);
        out.push(b'\n');
    }
    out
}

pub fn write_pairs<W: Write>(w: &mut W, pairs: &[Pair], format: KeyFormat) -> io::Result<()> {
    w.write_all(&encode(pairs, format))
}

pub fn parse(bytes: &[u8], format: KeyFormat) -> Result<Vec<Pair>, String> {
    let Some(body) = bytes.strip_suffix(b"\n") else {
        return if bytes.is_empty() {
            Ok(Vec::new())
        } else {
            Err("missing final newline".into())
        };
    };
    body.split(|&b| b == b'\n')
        .enumerate()
        .map(|(line, row)| {
            let tab = row
                .iter()
                .position(|&b| b == b'\t')
                .ok_or_else(|| format!("line {}: no tab", line + 1))?;
            let (k, v) = (&row[..tab], &row[tab + 1..]);
            let key = match format {
                KeyFormat::Int => std::str::from_utf8(k)
                    .ok()
                    .and_then(|s| s.parse::<u64>().ok())
                    .ok_or_else(|| format!("line {}: bad integer key", line + 1))?
                    .to_be_bytes()
                    .to_vec(),
                KeyFormat::Bytes => unescape(k).map_err(|e| format!("line {}: {e}", line + 1))?,
            };
            let value = unescape(v).map_err(|e| format!("line {}: {e}", line + 1))?;
            Ok((key, value))
        })
        .collect()
}
