//! "Put tail down": move mass `p` of a symmetric finite-variance law to the
//! origin. The variance shrinks to `(1 - p) sigma^2` while each tail is only
//! scaled by `1 - p`, so studentized outliers can become more frequent.
//!
//! The inequality routines treat the asymptotic tail forms `C e^{-a x}` and
//! `C x^{-alpha}` as exact. `C` cancels from both sides and is ignored.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailKind {
    /// `F(x) ~ C e^{-a x}`.
    ExponentialTail { c: f64, a: f64 },
    /// `F(x) ~ C / x^alpha_tail`, `alpha_tail > 2`.
    PowerTail { c: f64, alpha_tail: f64 },
}

/// Asymptotic upper-tail shape of a base law with standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailModel {
    pub kind: TailKind,
    pub sigma: f64,
}

impl TailModel {
    pub fn exponential(c: f64, a: f64, sigma: f64) -> Result<Self> {
        Self::checked(TailKind::ExponentialTail { c, a }, sigma)
    }

    pub fn power(c: f64, alpha_tail: f64, sigma: f64) -> Result<Self> {
        Self::checked(TailKind::PowerTail { c, alpha_tail }, sigma)
    }

    fn checked(kind: TailKind, sigma: f64) -> Result<Self> {
        let model = Self { kind, sigma };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        let valid = ok(self.sigma)
            && match self.kind {
                TailKind::ExponentialTail { c, a } => ok(c) && ok(a),
                TailKind::PowerTail { c, alpha_tail } => ok(c) && alpha_tail.is_finite() && alpha_tail > 2.0,
            };
        if valid {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid tail model {self:?}")))
        }
    }

    /// The model's survival function `C e^{-a x}` or `C x^{-alpha}`.
    pub fn survival(&self, x: f64) -> f64 {
        match self.kind {
            TailKind::ExponentialTail { c, a } => c * (-a * x).exp(),
            TailKind::PowerTail { c, alpha_tail } => c * x.powf(-alpha_tail),
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")))
    }
}

/// `F_p(x) = (1 - p) F(x) + p H(x)` with the right-continuous step `H(0) = 1`.
pub fn put_tail_down_cdf<F: Fn(f64) -> f64>(base_cdf: F, p: f64, x: f64) -> Result<f64> {
    check_p(p)?;
    let step = if x >= 0.0 { 1.0 } else { 0.0 };
    Ok((1.0 - p) * base_cdf(x) + p * step)
}

/// `P{|Y_p| > k sqrt(1 - p) sigma} = 2 (1 - p) F(k sqrt(1 - p) sigma)`, with
/// `F` the base survival function.
pub fn outlier_prob_ptd<F: Fn(f64) -> f64>(base_tail: F, p: f64, k: f64, sigma: f64) -> Result<f64> {
    check_p(p)?;
    if !(k > 0.0 && sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("need k > 0 and sigma > 0, got k={k}, sigma={sigma}")));
    }
    Ok(2.0 * (1.0 - p) * base_tail(k * (1.0 - p).sqrt() * sigma))
}

/// The sufficient condition `(1 - p) F(k sqrt(1 - p) sigma) > F(k sigma)`,
/// reduced for the model's tail form:
/// exponential: `1 - p > exp(-a k sigma (1 - sqrt(1 - p)))`;
/// power: `(1 - p)^(alpha/2 - 1) < 1`, independent of `k`.
pub fn gain_inequality_holds(model: &TailModel, p: f64, k: f64) -> bool {
    if model.validate().is_err() || check_p(p).is_err() || !(k > 0.0) {
        return false;
    }
    match model.kind {
        TailKind::ExponentialTail { a, .. } => {
            let shrink = p / (1.0 + (1.0 - p).sqrt()); // 1 - sqrt(1 - p)
            (-p).ln_1p() > -a * k * model.sigma * shrink
        }
        TailKind::PowerTail { alpha_tail, .. } => (1.0 - p).powf(0.5 * alpha_tail - 1.0) < 1.0,
    }
}

/// Direct evaluation of the sufficient condition for an arbitrary survival
/// function.
pub fn gain_inequality_exact<F: Fn(f64) -> f64>(base_tail: F, p: f64, k: f64, sigma: f64) -> Result<bool> {
    check_p(p)?;
    Ok((1.0 - p) * base_tail(k * (1.0 - p).sqrt() * sigma) > base_tail(k * sigma))
}

/// `k* = -ln(1 - p) / (a sigma (1 - sqrt(1 - p)))`: the exponential-tail
/// condition holds exactly for `k > k*`.
pub fn exponential_threshold_k(model: &TailModel, p: f64) -> Result<f64> {
    model.validate()?;
    check_p(p)?;
    let TailKind::ExponentialTail { a, .. } = model.kind else {
        return Err(Error::InvalidParameter("threshold k needs an exponential tail".into()));
    };
    let shrink = p / (1.0 + (1.0 - p).sqrt());
    Ok(-(-p).ln_1p() / (a * model.sigma * shrink))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{normal_cdf, normal_sf};
    use proptest::prelude::*;

    #[test]
    fn cdf_values() {
        assert!(put_tail_down_cdf(normal_cdf, 0.3, -1e9).unwrap().abs() < 1e-15);
        assert_eq!(put_tail_down_cdf(normal_cdf, 0.3, 1e9).unwrap(), 1.0);
        assert_eq!(put_tail_down_cdf(normal_cdf, 0.5, 0.0).unwrap(), 0.75);
        assert!(put_tail_down_cdf(normal_cdf, 0.0, 1.0).is_err());
        assert!(put_tail_down_cdf(normal_cdf, 1.0, 1.0).is_err());
    }

    #[test]
    fn eq3_values() {
        let small = outlier_prob_ptd(normal_sf, 1e-12, 3.0, 1.0).unwrap();
        assert!((small - 2.0 * normal_sf(3.0)).abs() < 1e-13);
        let half = outlier_prob_ptd(normal_sf, 0.5, 3.0, 1.0).unwrap();
        assert!((half - normal_sf(3.0 / 2f64.sqrt())).abs() < 1e-15);

        let model = TailModel::exponential(0.5, 2f64.sqrt(), 1.0).unwrap();
        let v = outlier_prob_ptd(|x| model.survival(x), 0.2, 3.0, 1.0).unwrap();
        let expect = 2.0 * 0.8 * 0.5 * (-(2f64.sqrt()) * 3.0 * 0.8f64.sqrt()).exp();
        assert!((v - expect).abs() < 1e-16);
        // the exponential threshold for these parameters is below 3, so Eq. 4 holds
        assert!(exponential_threshold_k(&model, 0.2).unwrap() < 3.0);
        assert!(gain_inequality_holds(&model, 0.2, 3.0));
        assert!(v > 2.0 * model.survival(3.0));
    }

    #[test]
    fn gain_patterns() {
        let power = TailModel::power(1.0, 3.0, 1.0).unwrap();
        for p in [0.01, 0.3, 0.5, 0.99] {
            assert!(gain_inequality_holds(&power, p, 1.0));
            assert!(gain_inequality_holds(&power, p, 100.0));
        }
        let expo = TailModel::exponential(1.0, 1.0, 1.0).unwrap();
        assert!(gain_inequality_holds(&expo, 0.5, 10.0));
        assert!(!gain_inequality_holds(&expo, 0.5, 1e-9));
        assert!(TailModel::power(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn threshold_values() {
        let expo = TailModel::exponential(1.0, 1.0, 1.0).unwrap();
        let k = exponential_threshold_k(&expo, 0.75).unwrap();
        assert!((k - 2.0 * 4f64.ln()).abs() < 1e-12);
        assert!((k - 2.772_588_722).abs() < 1e-8);
        let tiny = exponential_threshold_k(&expo, 1e-6).unwrap();
        assert!((tiny - 2.0).abs() < 1e-5, "{tiny}");
        let power = TailModel::power(1.0, 3.0, 1.0).unwrap();
        assert!(exponential_threshold_k(&power, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn threshold_separates(a in 0.1f64..5.0, sigma in 0.1f64..5.0, p in 0.01f64..0.99) {
            let m = TailModel::exponential(1.0, a, sigma).unwrap();
            let k = exponential_threshold_k(&m, p).unwrap();
            prop_assert!(gain_inequality_holds(&m, p, 1.01 * k));
            prop_assert!(!gain_inequality_holds(&m, p, 0.99 * k));
        }

        #[test]
        fn cdf_monotone_and_bounded(p in 0.01f64..0.99, x in -10.0f64..10.0, dx in 0.0f64..5.0) {
            let a = put_tail_down_cdf(normal_cdf, p, x).unwrap();
            let b = put_tail_down_cdf(normal_cdf, p, x + dx).unwrap();
            prop_assert!((0.0..=1.0).contains(&a) && a <= b);
        }

        #[test]
        fn cdf_symmetric(p in 0.01f64..0.99, x in 0.001f64..10.0) {
            let l = put_tail_down_cdf(normal_cdf, p, -x).unwrap();
            let r = put_tail_down_cdf(normal_cdf, p, x).unwrap();
            prop_assert!((l - (1.0 - r)).abs() < 1e-14);
        }

        #[test]
        fn exact_and_reduced_exponential_agree(p in 0.05f64..0.95, k in 0.1f64..10.0) {
            // exact exponential survival, so reduction is an identity
            let m = TailModel::exponential(0.5, 1.3, 0.9).unwrap();
            let kstar = exponential_threshold_k(&m, p).unwrap();
            prop_assume!((k / kstar - 1.0).abs() > 1e-9);
            let exact = gain_inequality_exact(|x| m.survival(x), p, k, m.sigma).unwrap();
            prop_assert_eq!(exact, gain_inequality_holds(&m, p, k));
        }
    }
}
