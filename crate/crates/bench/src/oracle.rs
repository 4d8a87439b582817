//! Single-threaded reference implementations. They share no code with the
//! framework's map functions beyond the app-level hash and pricing helpers.

use shmr::apps::{monte_carlo, BloomFilter, Document, MonteCarlo};
use shmr::apps::{black_scholes, format_sig9};
use shmr::pricing::discounted_call_payoff;
use shmr::{Error, Pair, Result};
use std::collections::{BTreeMap, BTreeSet};

fn be(k: u64) -> Vec<u8> {
    k.to_be_bytes().to_vec()
}

pub fn word_count(text: &[u8]) -> Vec<Pair> {
    let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    let mut word = Vec::new();
    for &b in text.iter().chain(std::iter::once(&b' ')) {
        if b.is_ascii_alphanumeric() {
            word.push(b.to_ascii_lowercase());
        } else if !word.is_empty() {
            *counts.entry(std::mem::take(&mut word)).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .map(|(k, v)| (k, v.to_string().into_bytes()))
        .collect()
}

/// Byte-by-byte scan for `href="`, any case.
pub fn link_targets(contents: &[u8]) -> Vec<Vec<u8>> {
    let lower = contents.to_ascii_lowercase();
    let mut out = Vec::new();
    let mut i = 0;
    while i + 6 <= lower.len() {
        if &lower[i..i + 6] != b"href=\"" {
            i += 1;
            continue;
        }
        let start = i + 6;
        let mut end = start;
        while end < contents.len() && contents[end] != b'"' {
            end += 1;
        }
        if end == contents.len() {
            break;
        }
        let target = &contents[start..end];
        if !target.is_empty() && !target.contains(&0) {
            out.push(target.to_vec());
        }
        i = end + 1;
    }
    out
}

pub fn reverse_index(docs: &[Document]) -> Vec<Pair> {
    let mut index: BTreeMap<Vec<u8>, BTreeSet<u64>> = BTreeMap::new();
    for d in docs {
        for t in link_targets(&d.contents) {
            index.entry(t).or_default().insert(d.id);
        }
    }
    index
        .into_iter()
        .map(|(k, ids)| {
            let v: Vec<String> = ids.iter().map(u64::to_string).collect();
            (k, v.join(",").into_bytes())
        })
        .collect()
}

pub fn histogram(values: &[u32], buckets: u64) -> Result<Vec<Pair>> {
    let mut cells = vec![0u64; buckets as usize];
    for &v in values {
        let slot = cells.get_mut(v as usize).ok_or(Error::KeyRange {
            key: v as u64,
            lo: 0,
            hi: buckets - 1,
        })?;
        *slot += 1;
    }
    Ok(cells
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(i, c)| (be(i as u64), c.to_string().into_bytes()))
        .collect())
}

pub fn monte_carlo(mc: &MonteCarlo) -> Vec<Pair> {
    let paths = mc.paths();
    mc.options()
        .iter()
        .enumerate()
        .map(|(i, opt)| {
            let (mut sum, mut sum_sq) = (0u64, 0u64);
            for p in 0..paths {
                let payoff = discounted_call_payoff(opt, mc.normal(i as u64 * paths + p));
                sum = sum.wrapping_add((payoff * monte_carlo::PAYOFF_SCALE).round() as u64);
                sum_sq = sum_sq.wrapping_add((payoff * payoff * monte_carlo::SQUARE_SCALE).round() as u64);
            }
            let e = monte_carlo::estimate_from_sums(sum, sum_sq, paths);
            let v = format!("{},{}", format_sig9(e.price), format_sig9(e.std_error));
            (be(i as u64), v.into_bytes())
        })
        .collect()
}

pub fn black_scholes(options: &[shmr::OptionParams]) -> Vec<Pair> {
    options
        .iter()
        .enumerate()
        .map(|(i, o)| (be(i as u64), black_scholes::render_row(o).into_bytes()))
        .collect()
}

pub fn bloom_filter(filter: &BloomFilter, elements: &[Vec<u8>]) -> Vec<Pair> {
    let mut words = vec![0u64; filter.words() as usize];
    for e in elements {
        for bit in filter.positions(e) {
            words[(bit / 64) as usize] |= 1 << (bit % 64);
        }
    }
    words
        .iter()
        .enumerate()
        .filter(|(_, &w)| w != 0)
        .map(|(i, w)| (be(i as u64), w.to_string().into_bytes()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use shmr::apps::reverse_index::scan_links;

    #[test]
    fn word_count_small() {
        let got = word_count(b"a b a");
        assert_eq!(got, vec![(b"a".to_vec(), b"2".to_vec()), (b"b".to_vec(), b"1".to_vec())]);
    }

    #[test]
    fn extractor_agrees_with_scanner() {
        for s in [
            &br#"<a href="x">"#[..],
            br#"HREF="a" href="" hReF="b" href="open"#,
            br#"no links"#,
            b"href=\"a\0b\" href=\"c\"",
        ] {
            let want: Vec<Vec<u8>> = scan_links(s).targets.iter().map(|t| t.to_vec()).collect();
            assert_eq!(link_targets(s), want);
        }
    }

    #[test]
    fn histogram_small() {
        let got = histogram(&[0, 0, 2], 3).unwrap();
        assert_eq!(got, vec![(be(0), b"2".to_vec()), (be(2), b"1".to_vec())]);
        assert!(histogram(&[3], 3).is_err());
    }
}
