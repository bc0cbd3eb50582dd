use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::time::Instant;

use rayon::prelude::*;

use super::report::{Axes, Check, ExperimentResult, Provenance, Series, SeriesPoint};
use super::REFERENCE;
use crate::charfn::{limit_outlier_prob, moments};
use crate::distribution::DistributionSpec;
use crate::error::{Error, Result};
use crate::outlier::{empirical_stats, estimate_pn, outlier_fraction, OutlierEstimate};
use crate::randomsums::{ks_distance, ks_distance_two_sample, random_sum_sample, reference_cdf, CountFamily, RandomSumConfig};
use crate::rng::{derive_seed, RngStream};
use crate::samplers::{CountLaw, Sampler};
use crate::tailtransform::{
    exponential_threshold_k, gain_inequality_exact, gain_inequality_holds, outlier_prob_ptd, TailModel,
};

fn provenance(seed: u64, m: Option<usize>, start: Instant) -> Provenance {
    Provenance {
        seed,
        m,
        runtime: start.elapsed(),
    }
}

/// Scalar claims: Gaussian and Laplace limits, the stable value at
/// n = 50000, and the decrease of `p_n` for alpha = 1.8.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimsConfig {
    pub m: usize,
    pub seed: u64,
    pub n: usize,
    pub decrease_n: (usize, usize),
}

impl ClaimsConfig {
    pub fn new(m: usize, seed: u64) -> Self {
        Self {
            m,
            seed,
            n: 50_000,
            decrease_n: (1_000, 25_000),
        }
    }
}

fn mc_point(e: &OutlierEstimate) -> SeriesPoint {
    SeriesPoint::line(e.n as f64, e.p_hat, e.std_error)
}

pub fn run_claims_table(config: &ClaimsConfig) -> Result<ExperimentResult> {
    let start = Instant::now();
    let (m, seed, k) = (config.m, config.seed, 3.0);
    let normal = DistributionSpec::standard_normal();
    let laplace = DistributionSpec::laplace(FRAC_1_SQRT_2)?;
    let stable = DistributionSpec::symmetric_stable(1.8)?;
    let mut checks = Vec::new();
    let mut series = Vec::new();

    let g_ref = REFERENCE.gaussian_k3.value;
    let g_inv = limit_outlier_prob(&normal, k)?;
    checks.push(Check::within("gaussian_k3_inversion", g_inv, g_ref - 1e-4, g_ref + 1e-4, REFERENCE.gaussian_k3.description));
    let g_mc = estimate_pn(&normal, config.n, k, m, derive_seed(seed, 1))?;
    checks.push(Check::within(
        "gaussian_k3_mc",
        (g_mc.p_hat - g_inv) / g_mc.std_error,
        -3.0,
        3.0,
        "Monte Carlo p_n minus the inverted limit, in standard errors",
    ));
    series.push(Series::new("gaussian_k3_inversion", vec![SeriesPoint::line(0.0, g_inv, 0.0)]));
    series.push(Series::new("gaussian_k3_mc", vec![mc_point(&g_mc)]));

    let l_ref = REFERENCE.laplace_k3.value;
    let l_exact = (-3.0 * SQRT_2).exp();
    let l_inv = limit_outlier_prob(&laplace, k)?;
    checks.push(Check::within("laplace_k3_analytic", l_exact, l_ref - 1e-5, l_ref + 1e-5, REFERENCE.laplace_k3.description));
    checks.push(Check::within("laplace_k3_inversion", l_inv, l_ref - 1e-5, l_ref + 1e-5, "Laplace limit by inversion"));
    series.push(Series::new("laplace_k3_analytic", vec![SeriesPoint::line(0.0, l_exact, 0.0)]));
    series.push(Series::new("laplace_k3_inversion", vec![SeriesPoint::line(0.0, l_inv, 0.0)]));

    let s_ref = REFERENCE.stable18_k3_n50000.value;
    let s_mc = estimate_pn(&stable, config.n, k, m, derive_seed(seed, 2))?;
    let (lo, hi) = if m < 1500 {
        (0.0049, 0.0069)
    } else {
        (s_ref - 3.0 * s_mc.std_error, s_ref + 3.0 * s_mc.std_error)
    };
    checks.push(Check::within("stable18_k3_mc", s_mc.p_hat, lo, hi, REFERENCE.stable18_k3_n50000.description));
    series.push(Series::new("stable18_k3_mc", vec![mc_point(&s_mc)]));

    let [edge, _] = REFERENCE.observed_outlier_range;
    checks.push(Check::within(
        "stable_below_observed",
        s_mc.p_hat + 3.0 * s_mc.std_error,
        0.0,
        edge,
        REFERENCE.observed_description,
    ));

    let (n0, n1) = config.decrease_n;
    let small = estimate_pn(&stable, n0, k, m, derive_seed(seed, 3))?;
    let large = estimate_pn(&stable, n1, k, m, derive_seed(seed, 4))?;
    checks.push(Check::within(
        "stable18_decrease",
        (small.p_hat - large.p_hat) / small.std_error.hypot(large.std_error),
        4.0,
        f64::INFINITY,
        "drop of p_n from the small to the large n, in combined standard errors",
    ));
    series.push(Series::new("stable18_k3_decrease", vec![mc_point(&small), mc_point(&large)]));

    let mut parameters = BTreeMap::new();
    parameters.insert("k".into(), k.to_string());
    parameters.insert("m".into(), m.to_string());
    parameters.insert("n".into(), config.n.to_string());
    Ok(ExperimentResult {
        experiment_id: "claims".into(),
        axes: Axes::new("n (0 = limit)", "outlier probability"),
        parameters,
        series,
        checks,
        provenance: provenance(seed, Some(m), start),
    })
}

const CHUNK: usize = 250_000;

/// `n` draws from `spec`, chunk `c` on stream `(seed, c)`.
fn chunked_sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::ZeroCount);
    }
    let sampler = Sampler::new(spec)?;
    let chunks: Vec<Vec<f64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut out = vec![0.0; CHUNK.min(n - c * CHUNK)];
            sampler.fill(&mut RngStream::new(seed, c as u64), &mut out);
            out
        })
        .collect();
    Ok(chunks.concat())
}

/// Put-tail-down transform of unit-variance Gaussian and Laplace bases.
#[derive(Debug, Clone, PartialEq)]
pub struct PtdConfig {
    pub n: usize,
    pub seed: u64,
    pub k: f64,
    pub p_values: Vec<f64>,
}

impl PtdConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            n: 1_000_000,
            seed,
            k: 3.0,
            p_values: vec![0.1, 0.3, 0.5],
        }
    }
}

pub fn run_ptd_demo(config: &PtdConfig) -> Result<ExperimentResult> {
    let start = Instant::now();
    let k = config.k;
    let n = config.n as f64;
    let mut checks = Vec::new();
    let mut series = Vec::new();
    let bases = [
        ("gaussian", DistributionSpec::standard_normal()),
        ("laplace", DistributionSpec::laplace(FRAC_1_SQRT_2)?),
    ];
    for (b, (name, base)) in bases.iter().enumerate() {
        let sigma = moments(base).std_dev().ok_or_else(|| Error::InfiniteVariance(base.to_string()))?;
        let tail = |x: f64| base.closed_form_survival(x).unwrap_or(f64::NAN);
        let base_sample = chunked_sample(base, config.n, derive_seed(config.seed, 100 + b as u64))?;
        let base_frac = outlier_fraction(&base_sample, k)?.fraction;
        let (mut var_pts, mut eq3_mc, mut eq3_exact, mut stud) = (vec![], vec![], vec![], vec![]);
        stud.push(SeriesPoint::line(0.0, base_frac, (base_frac * (1.0 - base_frac) / n).sqrt()));
        for (j, &p) in config.p_values.iter().enumerate() {
            let spec = DistributionSpec::put_tail_down(base.clone(), p)?;
            let label = derive_seed(config.seed, (b * 1000 + j) as u64);
            let xs = chunked_sample(&spec, config.n, label)?;
            let (_, var) = empirical_stats(&xs)?;
            let ratio = var / ((1.0 - p) * sigma * sigma);
            checks.push(Check::within(
                format!("variance_{name}_p{p}"),
                ratio,
                0.98,
                1.02,
                "empirical variance over (1 - p) sigma^2",
            ));
            var_pts.push(SeriesPoint::line(p, ratio, 0.0));

            let exact = outlier_prob_ptd(tail, p, k, sigma)?;
            let threshold = k * (1.0 - p).sqrt() * sigma;
            let hits = xs.iter().filter(|x| x.abs() > threshold).count() as f64 / n;
            let se = (exact * (1.0 - exact) / n).sqrt();
            checks.push(Check::within(
                format!("outlier_identity_{name}_p{p}"),
                (hits - exact) / se,
                -4.0,
                4.0,
                "fraction beyond k sqrt(1-p) sigma vs 2 (1-p) F(k sqrt(1-p) sigma), in standard errors",
            ));
            eq3_mc.push(SeriesPoint::line(p, hits, se));
            eq3_exact.push(SeriesPoint::line(p, exact, 0.0));

            let frac = outlier_fraction(&xs, k)?.fraction;
            let se_diff = ((frac * (1.0 - frac) + base_frac * (1.0 - base_frac)) / n).sqrt();
            stud.push(SeriesPoint::line(p, frac, (frac * (1.0 - frac) / n).sqrt()));
            if gain_inequality_exact(tail, p, k, sigma)? {
                checks.push(Check::within(
                    format!("more_outliers_{name}_p{p}"),
                    (frac - base_frac) / se_diff,
                    3.0,
                    f64::INFINITY,
                    "studentized outlier fraction gain over the base law, in standard errors",
                ));
            }
        }
        series.push(Series::new(format!("variance_ratio_{name}"), var_pts));
        series.push(Series::new(format!("outlier_identity_mc_{name}"), eq3_mc));
        series.push(Series::new(format!("outlier_identity_exact_{name}"), eq3_exact));
        series.push(Series::new(format!("studentized_fraction_{name}"), stud));
    }

    let power = TailModel::power(1.0, 3.0, 1.0)?;
    let power_ps = [0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99];
    checks.push(Check::flag(
        "gain_power_tail",
        power_ps.iter().all(|&p| gain_inequality_holds(&power, p, k)),
        "power tail alpha=3: the gain condition holds for every p",
    ));
    let expo = TailModel::exponential(0.5, 1.0, 1.0)?;
    let mut threshold_pts = Vec::new();
    let mut threshold_ok = true;
    for p in [0.1, 0.3, 0.5, 0.75] {
        let ks = exponential_threshold_k(&expo, p)?;
        threshold_ok &= gain_inequality_holds(&expo, p, 1.01 * ks) && !gain_inequality_holds(&expo, p, 0.99 * ks);
        threshold_pts.push(SeriesPoint::line(p, ks, 0.0));
    }
    checks.push(Check::flag(
        "gain_exponential_threshold",
        threshold_ok,
        "exponential tail: the gain condition holds above k* and fails below it",
    ));
    series.push(Series::new("exponential_threshold_k", threshold_pts));

    let mut parameters = BTreeMap::new();
    parameters.insert("k".into(), k.to_string());
    parameters.insert("n".into(), config.n.to_string());
    parameters.insert(
        "p_values".into(),
        config.p_values.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "),
    );
    Ok(ExperimentResult {
        experiment_id: "ptd".into(),
        axes: Axes::new("p", "value"),
        parameters,
        series,
        checks,
        provenance: provenance(config.seed, None, start),
    })
}

/// Random sums with geometric and negative-binomial counts.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSumDemoConfig {
    pub replicates: usize,
    pub outlier_replicates: usize,
    pub seed: u64,
    pub q_values: Vec<f64>,
    pub outlier_q: f64,
    pub k: f64,
}

impl RandomSumDemoConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            replicates: 100_000,
            outlier_replicates: 1_000_000,
            seed,
            q_values: vec![0.2, 0.05, 0.01],
            outlier_q: 0.005,
            k: 3.0,
        }
    }
}

pub fn run_randomsum_demo(config: &RandomSumDemoConfig) -> Result<ExperimentResult> {
    let start = Instant::now();
    if config.q_values.is_empty() || config.q_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("q_values must be nonempty and strictly decreasing".into()));
    }
    let normal = DistributionSpec::standard_normal();
    let mut checks = Vec::new();
    let mut series = Vec::new();
    let mut label = 0u64;
    let mut run = |count_law: CountLaw, base: &DistributionSpec, replicates: usize| {
        label += 1;
        let config = RandomSumConfig {
            count_law,
            base: base.clone(),
            replicates,
            seed: derive_seed(config.seed, label),
        };
        random_sum_sample(&config).map(|xs| (xs, config.wald_variance()))
    };
    let mut wald_ratios: Vec<(String, f64)> = Vec::new();

    let laplace_cdf = reference_cdf(&CountFamily::Geometric.limit_law())?;
    let mut ks_pts = Vec::new();
    let mut last = None;
    for &q in &config.q_values {
        let (xs, w) = run(CountLaw::Geometric { q }, &normal, config.replicates)?;
        let ks = ks_distance(&xs, &laplace_cdf)?;
        ks_pts.push(SeriesPoint::line(q, ks, 0.0));
        last = Some((xs, w, ks));
    }
    let (geo_normal, geo_w, last_ks) = last.expect("q_values is nonempty");
    checks.push(Check::flag(
        "ks_decreasing",
        ks_pts.windows(2).all(|w| w[1].y < w[0].y),
        "KS distance to the Laplace limit strictly decreases as q shrinks",
    ));
    checks.push(Check::within("ks_geometric_gaussian", last_ks, 0.0, 0.02, "smallest q, Gaussian base"));
    wald_ratios.push(("geometric_gaussian".into(), empirical_stats(&geo_normal)?.1 / geo_w));
    series.push(Series::new("ks_geometric_gaussian", ks_pts));

    let q = *config.q_values.last().expect("nonempty");
    let laplace_base = DistributionSpec::laplace(1.0)?;
    let (xs, w) = run(CountLaw::Geometric { q }, &laplace_base, config.replicates)?;
    let ks = ks_distance(&xs, &laplace_cdf)?;
    checks.push(Check::within("ks_geometric_laplace", ks, 0.0, 0.02, "smallest q, Laplace base"));
    wald_ratios.push(("geometric_laplace".into(), empirical_stats(&xs)?.1 / w));
    series.push(Series::new("ks_geometric_laplace", vec![SeriesPoint::line(q, ks, 0.0)]));

    let nb = CountFamily::NegativeBinomial { r: 2.0 };
    let (xs, w) = run(nb.at(q), &normal, config.replicates)?;
    let ks = ks_distance(&xs, reference_cdf(&nb.limit_law())?)?;
    checks.push(Check::within("ks_negbin2_gaussian", ks, 0.0, 0.03, "smallest q, r=2, symmetric gamma limit"));
    wald_ratios.push(("negbin2_gaussian".into(), empirical_stats(&xs)?.1 / w));
    series.push(Series::new("ks_negbin2_gaussian", vec![SeriesPoint::line(q, ks, 0.0)]));

    let (xs, w) = run(CountLaw::Geometric { q }, &DistributionSpec::exponential(1.0)?, config.replicates)?;
    let ks = ks_distance_two_sample(&geo_normal, &xs)?;
    checks.push(Check::within(
        "universality",
        ks,
        0.0,
        0.02,
        "two-sample KS between Gaussian-base and centered exponential-base sums",
    ));
    wald_ratios.push(("geometric_exponential".into(), empirical_stats(&xs)?.1 / w));
    series.push(Series::new("ks_universality", vec![SeriesPoint::line(q, ks, 0.0)]));

    let mut wald_pts = Vec::new();
    for (i, (name, ratio)) in wald_ratios.into_iter().enumerate() {
        checks.push(Check::within(format!("wald_{name}"), ratio, 0.98, 1.02, "empirical variance over Wald's identity"));
        wald_pts.push(SeriesPoint::line(i as f64, ratio, 0.0));
    }
    series.push(Series::new("wald_variance_ratio", wald_pts));

    let (xs, _) = run(CountLaw::Geometric { q: config.outlier_q }, &normal, config.outlier_replicates)?;
    let frac = outlier_fraction(&xs, config.k)?.fraction;
    let target = REFERENCE.laplace_k3.value;
    let se = (target * (1.0 - target) / xs.len() as f64).sqrt();
    checks.push(Check::within(
        "outlier_fraction_laplace_limit",
        (frac - target) / se,
        -3.0,
        3.0,
        "studentized outlier fraction of the sums vs the Laplace limit, in standard errors",
    ));
    series.push(Series::new("outlier_fraction", vec![SeriesPoint::line(config.outlier_q, frac, se)]));

    let mut parameters = BTreeMap::new();
    parameters.insert("replicates".into(), config.replicates.to_string());
    parameters.insert("outlier_replicates".into(), config.outlier_replicates.to_string());
    parameters.insert("k".into(), config.k.to_string());
    parameters.insert(
        "q_values".into(),
        config.q_values.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" "),
    );
    Ok(ExperimentResult {
        experiment_id: "randomsums".into(),
        axes: Axes::new("q", "value"),
        parameters,
        series,
        checks,
        provenance: provenance(config.seed, None, start),
    })
}
