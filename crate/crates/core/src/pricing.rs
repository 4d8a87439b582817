//! European option pricing under geometric Brownian motion.
//!
//! Everything here is generic over the floating-point type; the applications
//! use `f64`.

use crate::error::{Error, Result};
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionParams<T> {
    pub spot: T,
    pub strike: T,
    /// Continuously compounded risk-free rate per year.
    pub rate: T,
    /// Annualized volatility.
    pub sigma: T,
    /// Years to expiry.
    pub maturity: T,
}

impl<T: Float> OptionParams<T> {
    pub fn new(spot: T, strike: T, rate: T, sigma: T, maturity: T) -> Result<Self> {
        let p = OptionParams {
            spot,
            strike,
            rate,
            sigma,
            maturity,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.spot > T::zero()
            && self.strike >= T::zero()
            && self.sigma >= T::zero()
            && self.maturity >= T::zero()
            && [self.spot, self.strike, self.rate, self.sigma, self.maturity]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "option parameters need S > 0, K >= 0, sigma >= 0, T >= 0, all finite".into(),
            ))
        }
    }

    /// `e^{-rT}`.
    pub fn discount(&self) -> T {
        (-self.rate * self.maturity).exp()
    }
}

fn c<T: Float>(v: f64) -> T {
    T::from(v).expect("float constant")
}

/// `erfc(z)` for `z >= 0`.
fn erfc_nonneg<T: Float>(z: T) -> T {
    let eps = T::epsilon();
    let frac_1_sqrt_pi: T = c(0.564_189_583_547_756_3);
    if z < T::one() {
        // erf(z) = 2/sqrt(pi) e^{-z^2} sum_n 2^n z^{2n+1} / (2n+1)!!, all terms positive.
        let z2 = z * z;
        let mut term = z;
        let mut sum = z;
        let mut n = T::zero();
        loop {
            n = n + T::one();
            term = term * (z2 + z2) / (n + n + T::one());
            sum = sum + term;
            if term <= sum * eps {
                break;
            }
        }
        T::one() - (frac_1_sqrt_pi + frac_1_sqrt_pi) * (-z2).exp() * sum
    } else if z.is_infinite() {
        T::zero()
    } else {
        // erfc(z) = e^{-z^2}/sqrt(pi) * 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + ...)))), modified Lentz.
        let tiny = T::min_positive_value() / eps;
        let half = c::<T>(0.5);
        let mut f = z;
        let mut cc = z;
        let mut d = T::zero();
        let mut k = T::zero();
        for _ in 0..1000 {
            k = k + T::one();
            let a = k * half;
            d = z + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            cc = z + a / cc;
            if cc.abs() < tiny {
                cc = tiny;
            }
            d = d.recip();
            let delta = cc * d;
            f = f * delta;
            if (delta - T::one()).abs() <= eps {
                break;
            }
        }
        frac_1_sqrt_pi * (-z * z).exp() / f
    }
}

/// Standard normal CDF. Both tails come from the same `erfc` evaluation, so
/// `normal_cdf(x) + normal_cdf(-x)` is 1 to within rounding.
pub fn normal_cdf<T: Float>(x: T) -> T {
    if x.is_nan() {
        return x;
    }
    let tail = c::<T>(0.5) * erfc_nonneg(x.abs() * c(std::f64::consts::FRAC_1_SQRT_2));
    if x < T::zero() {
        tail
    } else {
        T::one() - tail
    }
}

/// Closed-form `(call, put)`.
pub fn bs_prices<T: Float>(p: &OptionParams<T>) -> (T, T) {
    let df = p.discount();
    let k_disc = p.strike * df;
    if p.strike == T::zero() {
        return (p.spot, T::zero());
    }
    let vol = p.sigma * p.maturity.sqrt();
    if vol == T::zero() {
        let fwd = p.spot - k_disc;
        return (fwd.max(T::zero()), (-fwd).max(T::zero()));
    }
    let half = c::<T>(0.5);
    let d1 = ((p.spot / p.strike).ln() + (p.rate + half * p.sigma * p.sigma) * p.maturity) / vol;
    let d2 = d1 - vol;
    let call = p.spot * normal_cdf(d1) - k_disc * normal_cdf(d2);
    let put = k_disc * normal_cdf(-d2) - p.spot * normal_cdf(-d1);
    (call, put)
}

pub fn bs_call_price<T: Float>(p: &OptionParams<T>) -> T {
    bs_prices(p).0
}

pub fn bs_put_price<T: Float>(p: &OptionParams<T>) -> T {
    bs_prices(p).1
}

/// Discounted call payoff at the terminal price reached with standard normal
/// draw `z`.
pub fn discounted_call_payoff<T: Float>(p: &OptionParams<T>, z: T) -> T {
    let half = c::<T>(0.5);
    let drift = (p.rate - half * p.sigma * p.sigma) * p.maturity;
    let terminal = p.spot * (drift + p.sigma * p.maturity.sqrt() * z).exp();
    p.discount() * (terminal - p.strike).max(T::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    // 30-digit evaluations of the closed form.
    const ATM_CALL: f64 = 10.450_583_572_185_566_78;
    const ATM_PUT: f64 = 5.573_526_022_256_967_69;

    fn atm() -> OptionParams<f64> {
        OptionParams::new(100.0, 100.0, 0.05, 0.2, 1.0).unwrap()
    }

    #[test]
    fn atm_reference_prices() {
        let (call, put) = bs_prices(&atm());
        assert!((call - ATM_CALL).abs() < 1e-12, "{call}");
        assert!((put - ATM_PUT).abs() < 1e-12, "{put}");
    }

    #[test]
    fn f32_is_close_to_f64() {
        let p = OptionParams::<f32>::new(100.0, 100.0, 0.05, 0.2, 1.0).unwrap();
        assert!((bs_call_price(&p) as f64 - ATM_CALL).abs() < 1e-3);
    }

    #[test]
    fn cdf_against_high_precision_table() {
        // 30-digit evaluations.
        let table = [
            (-8.0, 6.2209605742717841235e-16),
            (-6.0, 9.865876450376981407e-10),
            (-4.0, 0.000031671241833119921254),
            (-3.66, 0.00012610762413848666883),
            (-3.0, 0.0013498980316300945267),
            (-2.6, 0.0046611880237187490446),
            (-2.5, 0.006209665325776135167),
            (-1.0, 0.15865525393145705141),
            (-0.3, 0.38208857781104736693),
            (0.4, 0.65542174161032417491),
            (1.5, 0.933192798731141934),
            (2.4, 0.99180246407540386857),
            (3.2, 0.99931286206208415197),
        ];
        for (x, want) in table {
            let got = normal_cdf(x);
            assert!((got - want).abs() <= 1e-13 * want, "x={x} got={got} want={want}");
        }
        assert_eq!(normal_cdf(f64::INFINITY), 1.0);
        assert_eq!(normal_cdf(f64::NEG_INFINITY), 0.0);
        assert_eq!(normal_cdf(0.0), 0.5);
    }

    #[test]
    fn cdf_against_statrs() {
        // statrs is itself only good to about 1e-10 relative in the tails.
        let n = Normal::new(0.0, 1.0).unwrap();
        for i in -4000..=4000 {
            let x = i as f64 / 400.0;
            let got = normal_cdf(x);
            let want = n.cdf(x);
            assert!((got - want).abs() <= 1e-15 + 1e-9 * want, "x={x} got={got} want={want}");
        }
    }

    #[test]
    fn limits() {
        let mut p = atm();
        p.strike = 0.0;
        assert_eq!(bs_prices(&p), (100.0, 0.0));

        let mut p = atm();
        p.maturity = 0.0;
        p.strike = 90.0;
        assert_eq!(bs_prices(&p), (10.0, 0.0));
        p.strike = 110.0;
        assert_eq!(bs_prices(&p), (0.0, 10.0));

        let mut p = atm();
        p.sigma = 0.0;
        let (call, _) = bs_prices(&p);
        assert!((call - (100.0 - 100.0 * (-0.05f64).exp())).abs() < 1e-12);

        let mut p = atm();
        p.sigma = 1e4;
        assert!((bs_call_price(&p) - 100.0).abs() < 1e-9);
    }

    #[test]
    fn zero_noise_payoff() {
        let p = OptionParams::new(100.0, 90.0, 0.05, 0.2, 1.0).unwrap();
        let want = (-0.05f64).exp() * (100.0 * (0.05f64 - 0.02).exp() - 90.0);
        assert!((discounted_call_payoff(&p, 0.0) - want).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid() {
        assert!(OptionParams::new(0.0, 1.0, 0.0, 0.1, 1.0).is_err());
        assert!(OptionParams::new(1.0, -1.0, 0.0, 0.1, 1.0).is_err());
        assert!(OptionParams::new(1.0, 1.0, 0.0, -0.1, 1.0).is_err());
        assert!(OptionParams::new(1.0, 1.0, 0.0, 0.1, f64::NAN).is_err());
    }

    fn params() -> impl Strategy<Value = OptionParams<f64>> {
        (1.0..500.0f64, 0.0..500.0f64, -0.05..0.2f64, 0.0..1.5f64, 0.0..10.0f64)
            .prop_map(|(s, k, r, v, t)| OptionParams::new(s, k, r, v, t).unwrap())
    }

    proptest! {
        #[test]
        fn put_call_parity(p in params()) {
            let (call, put) = bs_prices(&p);
            let fwd = p.spot - p.strike * p.discount();
            let scale = p.spot.max(p.strike * p.discount());
            prop_assert!((call - put - fwd).abs() <= 1e-9 * scale);
            prop_assert!(call >= 0.0 && put >= 0.0 && call <= p.spot);
        }

        #[test]
        fn call_monotone_in_spot_and_sigma(p in params(), ds in 0.0..50.0f64, dv in 0.0..0.5f64) {
            let tol = 1e-12 * p.spot.max(p.strike);
            let base = bs_call_price(&p);
            let up_s = OptionParams { spot: p.spot + ds, ..p };
            prop_assert!(bs_call_price(&up_s) >= base - tol);
            let up_v = OptionParams { sigma: p.sigma + dv, ..p };
            prop_assert!(bs_call_price(&up_v) >= base - tol);
        }

        #[test]
        fn cdf_symmetry(x in -40.0..40.0f64) {
            prop_assert!((normal_cdf(x) + normal_cdf(-x) - 1.0).abs() <= 2.0 * f64::EPSILON);
        }
    }
}
