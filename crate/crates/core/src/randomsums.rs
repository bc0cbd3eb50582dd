//! Normalized sums of a random number of i.i.d. terms and their limit laws.
//!
//! A replicate draws `N` from the count law and returns
//! `sqrt(q / r) * sum_{i <= N} X_i`, where the `X_i` are the base law
//! standardized to mean 0 and variance 1 and `r` is the count law's shape
//! (1 for geometric). As `q -> 0` the geometric case tends to the unit
//! variance Laplace law (`b = 1/sqrt(2)`) and the negative-binomial case to
//! the unit variance symmetric gamma law with shape `r`
//! (`scale = 1/sqrt(2 r)`).

use rayon::prelude::*;

use crate::charfn::{build_cdf_grid, moments};
use crate::distribution::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, RngStream};
use crate::samplers::{draw_count, CountLaw, Sampler, GRID_TARGET_ERROR};

#[derive(Debug, Clone, PartialEq)]
pub struct RandomSumConfig {
    pub count_law: CountLaw,
    pub base: DistributionSpec,
    pub replicates: usize,
    pub seed: u64,
}

impl RandomSumConfig {
    pub fn validate(&self) -> Result<()> {
        self.count_law.validate()?;
        self.base.validate()?;
        if !self.base.has_finite_variance() {
            return Err(Error::InfiniteVariance(self.base.to_string()));
        }
        if self.replicates == 0 {
            return Err(Error::ZeroCount);
        }
        Ok(())
    }

    /// Factor applied to the raw sum.
    pub fn scale(&self) -> f64 {
        (self.count_law.q() / self.count_law.shape()).sqrt()
    }

    /// Variance of one normalized sum by Wald's identity: `scale^2 E[N]`.
    pub fn wald_variance(&self) -> f64 {
        self.scale().powi(2) * self.count_law.mean()
    }
}

/// One normalized random sum per replicate; replicate `i` uses stream `(seed, i)`.
pub fn random_sum_sample(config: &RandomSumConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let m = moments(&config.base);
    let (Some(mean), Some(sd)) = (m.mean, m.std_dev()) else {
        return Err(Error::InfiniteVariance(config.base.to_string()));
    };
    let sampler = Sampler::new(&config.base)?;
    let scale = config.scale();
    let law = config.count_law;
    Ok((0..config.replicates as u64)
        .into_par_iter()
        .map(|i| {
            let mut stream = RngStream::new(config.seed, i);
            let count = draw_count(&law, &mut stream);
            let mut sum = 0.0;
            for _ in 0..count {
                sum += (sampler.draw(&mut stream) - mean) / sd;
            }
            scale * sum
        })
        .collect())
}

/// Kolmogorov-Smirnov distance `sup_x |F_n(x) - F(x)|`.
pub fn ks_distance<F: Fn(f64) -> f64>(sample: &[f64], reference_cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    Ok(sorted.iter().enumerate().fold(0.0, |d: f64, (i, &x)| {
        let f = reference_cdf(x);
        d.max((i + 1) as f64 / n - f).max(f - i as f64 / n)
    }))
}

/// Two-sample Kolmogorov-Smirnov distance between empirical CDFs.
pub fn ks_distance_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Count law family for a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CountFamily {
    Geometric,
    NegativeBinomial { r: f64 },
}

impl CountFamily {
    pub fn at(&self, q: f64) -> CountLaw {
        match *self {
            CountFamily::Geometric => CountLaw::Geometric { q },
            CountFamily::NegativeBinomial { r } => CountLaw::NegativeBinomial { r, q },
        }
    }

    /// Unit-variance limit of the normalized sums as `q -> 0`.
    pub fn limit_law(&self) -> DistributionSpec {
        match *self {
            CountFamily::Geometric => DistributionSpec::Laplace {
                scale: std::f64::consts::FRAC_1_SQRT_2,
            },
            CountFamily::NegativeBinomial { r } => DistributionSpec::SymmetricGamma {
                shape: r,
                scale: (0.5 / r).sqrt(),
            },
        }
    }
}

/// CDF of a law, in closed form when available, otherwise from an inverted
/// CDF grid.
pub fn reference_cdf(spec: &DistributionSpec) -> Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    spec.validate()?;
    if spec.closed_form_cdf(0.0).is_some() {
        let s = spec.clone();
        return Ok(Box::new(move |x| s.closed_form_cdf(x).unwrap_or(f64::NAN)));
    }
    let grid = build_cdf_grid(spec, GRID_TARGET_ERROR)?;
    Ok(Box::new(move |x| grid.cdf(x)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub q: f64,
    pub ks: f64,
}

/// KS distance of normalized random sums to the family's limit law, one
/// row per `q`. `q_values` must be strictly decreasing.
pub fn convergence_table(
    family: CountFamily,
    q_values: &[f64],
    base: &DistributionSpec,
    replicates: usize,
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    if q_values.is_empty() || q_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(format!(
            "q_values must be nonempty and strictly decreasing, got {q_values:?}"
        )));
    }
    let cdf = reference_cdf(&family.limit_law())?;
    q_values
        .iter()
        .map(|&q| {
            let config = RandomSumConfig {
                count_law: family.at(q),
                base: base.clone(),
                replicates,
                seed: derive_seed(seed, q.to_bits()),
            };
            let xs = random_sum_sample(&config)?;
            Ok(ConvergenceRow {
                q,
                ks: ks_distance(&xs, &cdf)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::DistributionSpec as D;

    #[test]
    fn single_point_ks() {
        let d = ks_distance(&[0.0], |x| D::standard_normal().closed_form_cdf(x).unwrap()).unwrap();
        assert_eq!(d, 0.5);
        assert!(ks_distance(&[], |x| x).is_err());
    }

    #[test]
    fn ks_of_uniform_grid() {
        // points i/n against the uniform CDF: distance exactly 1/n
        let xs: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let d = ks_distance(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.1).abs() < 1e-15);
    }

    #[test]
    fn two_sample_ks() {
        assert_eq!(ks_distance_two_sample(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(ks_distance_two_sample(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 1.0);
        assert_eq!(ks_distance_two_sample(&[1.0, 3.0], &[2.0, 4.0]).unwrap(), 0.5);
    }

    #[test]
    fn geometric_q1_reproduces_base() {
        let base = D::Laplace { scale: 1.0 };
        let config = RandomSumConfig {
            count_law: CountLaw::Geometric { q: 1.0 },
            base: base.clone(),
            replicates: 20_000,
            seed: 3,
        };
        let xs = random_sum_sample(&config).unwrap();
        // standardized base: Laplace with unit variance
        let unit = D::Laplace { scale: std::f64::consts::FRAC_1_SQRT_2 };
        let d = ks_distance(&xs, |x| unit.closed_form_cdf(x).unwrap()).unwrap();
        assert!(d < 1.95 / (20_000f64).sqrt(), "{d}");
    }

    #[test]
    fn nb_shape_one_equals_geometric() {
        let mk = |law| RandomSumConfig {
            count_law: law,
            base: D::standard_normal(),
            replicates: 2000,
            seed: 11,
        };
        let a = random_sum_sample(&mk(CountLaw::Geometric { q: 0.1 })).unwrap();
        let b = random_sum_sample(&mk(CountLaw::NegativeBinomial { r: 1.0, q: 0.1 })).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wald_variance_values() {
        let c = RandomSumConfig {
            count_law: CountLaw::Geometric { q: 0.01 },
            base: D::standard_normal(),
            replicates: 1,
            seed: 0,
        };
        assert!((c.wald_variance() - 1.0).abs() < 1e-12);
        let nb = RandomSumConfig {
            count_law: CountLaw::NegativeBinomial { r: 2.0, q: 0.01 },
            ..c.clone()
        };
        assert!((nb.wald_variance() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_configs() {
        let c = RandomSumConfig {
            count_law: CountLaw::Geometric { q: 0.1 },
            base: D::SymmetricStable { alpha: 1.5 },
            replicates: 10,
            seed: 0,
        };
        assert!(random_sum_sample(&c).is_err());
        let c = RandomSumConfig {
            base: D::standard_normal(),
            replicates: 0,
            ..c
        };
        assert!(random_sum_sample(&c).is_err());
        let g = D::standard_normal();
        assert!(convergence_table(CountFamily::Geometric, &[0.1, 0.2], &g, 10, 0).is_err());
    }

    #[test]
    fn limit_laws_have_unit_variance() {
        for f in [CountFamily::Geometric, CountFamily::NegativeBinomial { r: 2.0 }, CountFamily::NegativeBinomial { r: 0.5 }] {
            let v = moments(&f.limit_law()).variance.unwrap();
            assert!((v - 1.0).abs() < 1e-12);
        }
    }
}
