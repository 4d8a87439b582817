use super::format_sig9;
use crate::app::{App, AppSpec, ContainerHint, Emit, Payload};
use crate::containers::CombinerKind;
use crate::error::Result;
use crate::pricing::{bs_prices, OptionParams};

/// Closed-form call and put prices, one `call,put` row per option.
#[derive(Debug, Clone, Copy, Default)]
pub struct BlackScholes;

pub fn render_row(p: &OptionParams<f64>) -> String {
    let (call, put) = bs_prices(p);
    format!("{},{}", format_sig9(call), format_sig9(put))
}

impl App for BlackScholes {
    type Input = [OptionParams<f64>];

    fn spec(&self) -> AppSpec {
        AppSpec {
            app_id: "black_scholes",
            container_hint: ContainerHint::MapOnly,
            combiner: CombinerKind::SumU64,
        }
    }

    fn len(&self, input: &[OptionParams<f64>]) -> usize {
        input.len()
    }

    fn map<E: Emit>(&self, input: &[OptionParams<f64>], index: usize, out: &mut E) -> Result<()> {
        let p = &input[index];
        p.validate()?;
        out.emit_row(render_row(p).into_bytes())
    }

    fn render(&self, _key: &[u8], _payload: Payload<'_>) -> Vec<u8> {
        unreachable!("black scholes output is map-only")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apps::int_key;
    use crate::config::JobConfig;
    use crate::job::run_job;

    #[test]
    fn rows_in_input_order() {
        let input: Vec<OptionParams<f64>> = (1..=20)
            .map(|i| OptionParams::new(10.0 * i as f64, 100.0, 0.05, 0.2, 1.0).unwrap())
            .collect();
        let mut cfg = JobConfig::new("black_scholes");
        cfg.map_workers = 6;
        let pairs = run_job(&cfg, &BlackScholes, &input[..]).unwrap().pairs;
        assert_eq!(pairs.len(), 20);
        for (i, (k, v)) in pairs.iter().enumerate() {
            assert_eq!(int_key(k), Some(i as u64));
            assert_eq!(v, render_row(&input[i]).as_bytes());
        }
        assert_eq!(pairs[9].1, b"10.4505836,5.57352602");
    }

    #[test]
    fn invalid_params_fail() {
        let bad = [OptionParams {
            spot: -1.0,
            strike: 1.0,
            rate: 0.0,
            sigma: 0.1,
            maturity: 1.0,
        }];
        assert!(run_job(&JobConfig::new("black_scholes"), &BlackScholes, &bad[..]).is_err());
    }
}
