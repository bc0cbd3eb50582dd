//! The studentized outlier probability
//! `p_n = P{|X_1 - mean_n| > k s_n}` and its Monte Carlo estimator.

use rayon::prelude::*;

use crate::distribution::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, RngStream};
use crate::samplers::Sampler;

/// Empirical mean and variance with divisor `n`.
pub fn empirical_stats(sample: &[f64]) -> Result<(f64, f64)> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = sample.len() as f64;
    let mean = sample.iter().sum::<f64>() / n;
    let var = sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    Ok((mean, var))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutlierFraction {
    pub fraction: f64,
    /// Set when `s_n = 0`; the fraction is then 0 by convention.
    pub degenerate: bool,
}

/// Share of points with `|x_j - mean| > k s` (strict inequality).
pub fn outlier_fraction(sample: &[f64], k: f64) -> Result<OutlierFraction> {
    if sample.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "outlier fraction needs at least 2 points, got {}",
            sample.len()
        )));
    }
    check_k(k)?;
    let (mean, var) = empirical_stats(sample)?;
    let s = var.sqrt();
    if s == 0.0 {
        return Ok(OutlierFraction {
            fraction: 0.0,
            degenerate: true,
        });
    }
    let threshold = k * s;
    let count = sample.iter().filter(|&&x| (x - mean).abs() > threshold).count();
    Ok(OutlierFraction {
        fraction: count as f64 / sample.len() as f64,
        degenerate: false,
    })
}

fn check_k(k: f64) -> Result<()> {
    if k.is_finite() && k > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("k must be positive, got {k}")))
    }
}

/// Monte Carlo estimate of `p_n` with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct OutlierEstimate {
    pub p_hat: f64,
    /// Standard deviation of the per-replicate fractions over `sqrt(m)`.
    pub std_error: f64,
    pub n: usize,
    pub m: usize,
    pub k: f64,
    pub spec: DistributionSpec,
    pub seed: u64,
    pub degenerate_replicates: usize,
}

/// Mean of per-replicate outlier fractions over `m` samples of size `n`.
///
/// Replicate `i` draws from stream `(seed, i)`; the result does not depend
/// on how rayon schedules the replicates.
pub fn estimate_pn(spec: &DistributionSpec, n: usize, k: f64, m: usize, seed: u64) -> Result<OutlierEstimate> {
    let sampler = Sampler::new(spec)?;
    estimate_pn_with(&sampler, n, k, m, seed)
}

/// [`estimate_pn`] with a prepared sampler.
pub fn estimate_pn_with(sampler: &Sampler, n: usize, k: f64, m: usize, seed: u64) -> Result<OutlierEstimate> {
    if n < 2 || m < 2 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 2 and m >= 2, got n={n}, m={m}"
        )));
    }
    check_k(k)?;
    let fractions: Vec<OutlierFraction> = (0..m as u64)
        .into_par_iter()
        .map_init(
            || vec![0.0; n],
            |buf, i| {
                sampler.fill(&mut RngStream::new(seed, i), buf);
                outlier_fraction(buf, k)
            },
        )
        .collect::<Result<_>>()?;

    let mf = m as f64;
    let p_hat = fractions.iter().map(|f| f.fraction).sum::<f64>() / mf;
    let ss = fractions.iter().map(|f| (f.fraction - p_hat).powi(2)).sum::<f64>();
    let std_error = (ss / (mf - 1.0)).sqrt() / mf.sqrt();
    Ok(OutlierEstimate {
        p_hat,
        std_error,
        n,
        m,
        k,
        spec: sampler.spec().clone(),
        seed,
        degenerate_replicates: fractions.iter().filter(|f| f.degenerate).count(),
    })
}

/// Seed used for the curve point at sample size `n`.
pub fn curve_point_seed(seed: u64, n: usize) -> u64 {
    derive_seed(seed, n as u64)
}

/// `p_n` estimates over a grid of sample sizes, each from its own streams.
pub fn pn_curve(spec: &DistributionSpec, k: f64, n_values: &[usize], m: usize, seed: u64) -> Result<Vec<OutlierEstimate>> {
    if n_values.is_empty() {
        return Err(Error::InvalidParameter("n_values is empty".into()));
    }
    let sampler = Sampler::new(spec)?;
    n_values
        .iter()
        .map(|&n| estimate_pn_with(&sampler, n, k, m, curve_point_seed(seed, n)))
        .collect()
}

/// Sample sizes 1,000 to 25,000 in steps of 2,000.
pub fn figure_n_grid() -> Vec<usize> {
    (0..13).map(|i| 1000 + 2000 * i).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::DistributionSpec as D;
    use proptest::prelude::*;

    #[test]
    fn stats_examples() {
        assert_eq!(empirical_stats(&[5.0]).unwrap(), (5.0, 0.0));
        assert_eq!(empirical_stats(&[1.0, -1.0, 1.0, -1.0]).unwrap(), (0.0, 1.0));
        let (m, v) = empirical_stats(&[0.0, 0.0, 3.0]).unwrap();
        assert_eq!(m, 1.0);
        assert!((v - 2.0).abs() < 1e-15);
        assert_eq!(empirical_stats(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn fraction_examples() {
        let f = outlier_fraction(&[1.0, -1.0, 1.0, -1.0], 3.0).unwrap();
        assert_eq!(f.fraction, 0.0);
        assert!(!f.degenerate);

        let mut spike = vec![0.0; 99];
        spike.push(100.0);
        assert_eq!(outlier_fraction(&spike, 3.0).unwrap().fraction, 0.01);

        let flat = outlier_fraction(&[2.0, 2.0, 2.0], 1.0).unwrap();
        assert_eq!(flat, OutlierFraction { fraction: 0.0, degenerate: true });
        assert!(outlier_fraction(&[1.0], 3.0).is_err());
        assert!(outlier_fraction(&[1.0, 2.0], 0.0).is_err());
    }

    #[test]
    fn strict_inequality() {
        // mean 0, s = 1; the points at +-1 sit exactly on k = 1
        let xs = [1.0, -1.0, 1.0, -1.0];
        assert_eq!(outlier_fraction(&xs, 1.0).unwrap().fraction, 0.0);
        assert_eq!(outlier_fraction(&xs, 0.999).unwrap().fraction, 1.0);
    }

    #[test]
    fn estimate_is_reproducible() {
        let spec = D::SymmetricStable { alpha: 1.5 };
        let a = estimate_pn(&spec, 500, 3.0, 40, 77).unwrap();
        let b = estimate_pn(&spec, 500, 3.0, 40, 77).unwrap();
        assert_eq!(a.p_hat.to_bits(), b.p_hat.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = estimate_pn(&spec, 500, 3.0, 40, 78).unwrap();
        assert_ne!(a.p_hat, c.p_hat);
    }

    #[test]
    fn estimate_rejects_small_inputs() {
        let g = D::standard_normal();
        assert!(estimate_pn(&g, 1, 3.0, 10, 0).is_err());
        assert!(estimate_pn(&g, 10, 3.0, 1, 0).is_err());
        assert!(pn_curve(&g, 3.0, &[], 10, 0).is_err());
    }

    #[test]
    fn heavy_put_tail_down_flags_degenerate_samples() {
        let spec = D::put_tail_down(D::standard_normal(), 0.999).unwrap();
        let est = estimate_pn(&spec, 2, 1.0, 200, 1).unwrap();
        assert!(est.degenerate_replicates > 150);
    }

    #[test]
    fn figure_grid_shape() {
        let g = figure_n_grid();
        assert_eq!(g.len(), 13);
        assert_eq!(g[0], 1000);
        assert_eq!(g[12], 25000);
    }

    proptest! {
        #[test]
        fn studentized_statistic_is_affine_invariant(
            xs in prop::collection::vec(-1e3f64..1e3, 2..200),
            c in prop_oneof![0.01f64..100.0, -100.0f64..-0.01],
            shift in -1e3f64..1e3,
            k in 0.5f64..4.0,
        ) {
            let base = outlier_fraction(&xs, k).unwrap();
            prop_assume!(!base.degenerate);
            let scaled: Vec<f64> = xs.iter().map(|x| c * x).collect();
            let moved: Vec<f64> = xs.iter().map(|x| x + shift).collect();
            prop_assert_eq!(outlier_fraction(&scaled, k).unwrap().fraction, base.fraction);
            prop_assert_eq!(outlier_fraction(&moved, k).unwrap().fraction, base.fraction);
        }

        #[test]
        fn fraction_is_a_probability(xs in prop::collection::vec(-1e6f64..1e6, 2..100), k in 0.1f64..5.0) {
            let f = outlier_fraction(&xs, k).unwrap().fraction;
            prop_assert!((0.0..=1.0).contains(&f));
            // Chebyshev: at most 1/k^2 of the points lie beyond k s
            prop_assert!(f <= 1.0 / (k * k) + 1e-12);
        }
    }
}
