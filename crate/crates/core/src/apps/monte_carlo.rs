//! European call pricing by simulation.
//!
//! Each path index seeds its own ChaCha stream, so a path draws the same
//! normal no matter which worker runs it. Payoffs are summed as fixed-point
//! integers: cell `2i` holds the payoff sum of option `i` and cell `2i + 1`
//! the sum of squared payoffs, which keeps the result independent of the
//! order in which workers combine.

use super::{format_sig9, int_key};
use crate::app::{App, AppSpec, ArraySize, ContainerHint, Emit, Pair, Payload};
use crate::containers::{CombinerKind, KeyRef};
use crate::error::{Error, Result};
use crate::pricing::{discounted_call_payoff, OptionParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Fixed-point scale of accumulated payoffs.
pub const PAYOFF_SCALE: f64 = (1u64 << 20) as f64;
/// Fixed-point scale of accumulated squared payoffs.
pub const SQUARE_SCALE: f64 = (1u64 << 8) as f64;

#[derive(Debug, Clone)]
pub struct MonteCarlo {
    options: Vec<OptionParams<f64>>,
    paths: u64,
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub price: f64,
    pub std_error: f64,
}

impl MonteCarlo {
    pub fn new(options: Vec<OptionParams<f64>>, paths: u64, seed: u64) -> Result<Self> {
        if options.is_empty() || paths == 0 {
            return Err(Error::InvalidArgument(
                "monte carlo needs at least one option and one path".into(),
            ));
        }
        for o in &options {
            o.validate()?;
        }
        Ok(MonteCarlo {
            options,
            paths,
            seed,
        })
    }

    pub fn options(&self) -> &[OptionParams<f64>] {
        &self.options
    }

    pub fn paths(&self) -> u64 {
        self.paths
    }

    /// Standard normal draw of global path `index` (Box-Muller).
    pub fn normal(&self, index: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let u1 = 1.0 - rng.random::<f64>();
        let u2 = rng.random::<f64>();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Recovers the estimates from the rendered job output.
    pub fn estimates(&self, pairs: &[Pair]) -> Result<Vec<Estimate>> {
        pairs
            .iter()
            .map(|(_, v)| {
                parse_estimate(v).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "malformed estimate {:?}",
                        String::from_utf8_lossy(v)
                    ))
                })
            })
            .collect()
    }
}

pub fn parse_estimate(value: &[u8]) -> Option<Estimate> {
    let s = std::str::from_utf8(value).ok()?;
    let (p, e) = s.split_once(',')?;
    Some(Estimate {
        price: p.parse().ok()?,
        std_error: e.parse().ok()?,
    })
}

/// Mean and standard error from fixed-point sums over `n` paths.
pub fn estimate_from_sums(sum: u64, sum_sq: u64, n: u64) -> Estimate {
    let n_f = n as f64;
    let mean = sum as f64 / PAYOFF_SCALE / n_f;
    let mean_sq = sum_sq as f64 / SQUARE_SCALE / n_f;
    let var = if n > 1 {
        ((mean_sq - mean * mean) * n_f / (n_f - 1.0)).max(0.0)
    } else {
        0.0
    };
    Estimate {
        price: mean,
        std_error: (var / n_f).sqrt(),
    }
}

impl App for MonteCarlo {
    type Input = ();

    fn spec(&self) -> AppSpec {
        AppSpec {
            app_id: "monte_carlo",
            container_hint: ContainerHint::Array {
                size: ArraySize::Small,
                lo: 0,
                hi: 2 * self.options.len() as u64 - 1,
            },
            combiner: CombinerKind::SumU64,
        }
    }

    fn len(&self, _input: &()) -> usize {
        self.options.len() * self.paths as usize
    }

    fn map<E: Emit>(&self, _input: &(), index: usize, out: &mut E) -> Result<()> {
        let option = index as u64 / self.paths;
        let payoff = discounted_call_payoff(&self.options[option as usize], self.normal(index as u64));
        out.emit(KeyRef::Int(2 * option), (payoff * PAYOFF_SCALE).round() as u64)?;
        out.emit(KeyRef::Int(2 * option + 1), (payoff * payoff * SQUARE_SCALE).round() as u64)
    }

    fn render(&self, _key: &[u8], payload: Payload<'_>) -> Vec<u8> {
        match payload {
            Payload::Word(v) => v.to_be_bytes().to_vec(),
            Payload::List(_) => unreachable!("monte carlo uses a sum combiner"),
        }
    }

    /// Turns the raw cell sums into one `price,stderr` row per option.
    fn finish(&self, pairs: Vec<Pair>) -> Vec<Pair> {
        let mut sums = vec![0u64; 2 * self.options.len()];
        for (k, v) in &pairs {
            if let (Some(cell), Some(sum)) = (int_key(k), int_key(v)) {
                sums[cell as usize] = sum;
            }
        }
        sums.chunks_exact(2)
            .enumerate()
            .map(|(i, s)| {
                let e = estimate_from_sums(s[0], s[1], self.paths);
                let value = format!("{},{}", format_sig9(e.price), format_sig9(e.std_error));
                ((i as u64).to_be_bytes().to_vec(), value.into_bytes())
            })
            .collect()
    }
}
