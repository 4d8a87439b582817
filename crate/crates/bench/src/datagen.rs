//! Seeded synthetic datasets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use shmr::apps::Document;
use shmr::OptionParams;
use std::fmt::Write as _;

pub const VOCABULARY: usize = 50_000;
/// Average links per file of the generated reverse-index corpus.
pub const LINKS_PER_FILE: f64 = 3.93;
pub const KMER_LEN: usize = 31;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn random_word(r: &mut ChaCha8Rng) -> String {
    let len = r.random_range(2..=10);
    (0..len).map(|_| r.random_range(b'a'..=b'z') as char).collect()
}

/// About `bytes` of text with a Zipf(1.0) vocabulary, some capitalized words
/// and punctuation, wrapped every dozen words.
pub fn word_corpus(bytes: usize, seed: u64) -> Vec<u8> {
    let mut r = rng(seed, 0);
    let vocab: Vec<String> = (0..VOCABULARY).map(|_| random_word(&mut r)).collect();
    let zipf = Zipf::new(VOCABULARY as f64, 1.0).expect("valid zipf");
    let mut out = String::with_capacity(bytes + 64);
    let mut col = 0;
    while out.len() < bytes {
        let word = &vocab[zipf.sample(&mut r) as usize - 1];
        match r.random_range(0..20) {
            0 => {
                let mut w = word.clone();
                w[..1].make_ascii_uppercase();
                out.push_str(&w);
            }
            1 => {
                out.push_str(word);
                out.push(*[',', '.', ';', '!'].get(r.random_range(0..4)).unwrap());
            }
            _ => out.push_str(word),
        }
        col += 1;
        if col == 12 {
            out.push('\n');
            col = 0;
        } else {
            out.push(' ');
        }
    }
    out.into_bytes()
}

pub fn doc_name(id: u64) -> String {
    format!("doc{id:06}.html")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkedDocs {
    pub docs: Vec<Document>,
    /// Links written by the generator.
    pub links: u64,
}

/// `files` documents forming a 4-ary tree: every non-root file links to its
/// parent and to a few random files, about [`LINKS_PER_FILE`] links each.
pub fn linked_docs(files: usize, seed: u64) -> LinkedDocs {
    let mut r = rng(seed, 1);
    let mut links = 0;
    let docs = (0..files as u64)
        .map(|id| {
            let mut targets = Vec::new();
            if id > 0 {
                targets.push((id - 1) / 4);
            }
            let extra = r.random_range(0..=5) + u64::from(r.random_bool(0.43));
            for _ in 0..extra {
                targets.push(r.random_range(0..files as u64));
            }
            let mut html = format!("<html><head><title>Document {id}</title></head><body>\n");
            for t in &targets {
                let attr = if r.random_bool(0.1) { "HREF" } else { "href" };
                let _ = writeln!(
                    html,
                    "<p>{} <a {attr}=\"{}\">{}</a></p>",
                    random_word(&mut r),
                    doc_name(*t),
                    random_word(&mut r)
                );
            }
            html.push_str("</body></html>\n");
            links += targets.len() as u64;
            Document {
                id,
                contents: html.into_bytes(),
            }
        })
        .collect();
    LinkedDocs { docs, links }
}

pub fn uniform_u32(n: usize, buckets: u64, seed: u64) -> Vec<u32> {
    assert!(buckets >= 1 && buckets <= 1 << 32, "buckets must fit in u32 range");
    let mut r = rng(seed, 2);
    (0..n).map(|_| r.random_range(0..buckets) as u32).collect()
}

pub fn option_records(n: usize, seed: u64) -> Vec<OptionParams> {
    let mut r = rng(seed, 3);
    (0..n)
        .map(|_| OptionParams {
            spot: r.random_range(10.0..200.0),
            strike: r.random_range(10.0..200.0),
            rate: r.random_range(0.0..0.1),
            sigma: r.random_range(0.05..0.6),
            maturity: r.random_range(0.1..3.0),
        })
        .collect()
}

/// `n` k-mers cut from a random ACGT sequence, one per position.
pub fn kmers(n: usize, seed: u64) -> Vec<Vec<u8>> {
    let mut r = rng(seed, 4);
    let genome: Vec<u8> = (0..n + KMER_LEN - 1)
        .map(|_| b"ACGT"[r.random_range(0..4)])
        .collect();
    genome.windows(KMER_LEN).map(<[u8]>::to_vec).collect()
}
