//! The six benchmark applications.

pub mod black_scholes;
pub mod bloom_filter;
pub mod histogram;
pub mod monte_carlo;
pub mod reverse_index;
pub mod word_count;

pub use black_scholes::BlackScholes;
pub use bloom_filter::BloomFilter;
pub use histogram::Histogram;
pub use monte_carlo::MonteCarlo;
pub use reverse_index::{Document, ReverseIndex};
pub use word_count::{WordCount, WordCountInput};

use crate::app::Payload;

pub const APP_IDS: [&str; 6] = [
    "word_count",
    "reverse_index",
    "histogram",
    "monte_carlo",
    "black_scholes",
    "bloom_filter",
];

pub(crate) fn render_word(payload: Payload<'_>) -> Vec<u8> {
    match payload {
        Payload::Word(v) => v.to_string().into_bytes(),
        Payload::List(items) => {
            let parts: Vec<String> = items.iter().map(|i| i.value.to_string()).collect();
            parts.join(",").into_bytes()
        }
    }
}

/// `x` with nine significant digits, in plain decimal notation.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32 + 1;
    let decimals = (9 - magnitude).clamp(0, 40) as usize;
    format!("{x:.decimals$}")
}

/// Decodes an 8-byte big-endian integer key.
pub fn int_key(key: &[u8]) -> Option<u64> {
    Some(u64::from_be_bytes(key.try_into().ok()?))
}
