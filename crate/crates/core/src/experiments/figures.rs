use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use super::report::{Axes, Check, ExperimentResult, Provenance, Series, SeriesPoint};
use super::REFERENCE;
use crate::charfn::{limit_outlier_prob, moments};
use crate::distribution::{normal_sf, DistributionSpec};
use crate::error::{Error, Result};
use crate::outlier::{figure_n_grid, pn_curve, OutlierEstimate};
use crate::rng::{derive_seed, RngStream};
use crate::samplers::Sampler;

const STABLE_LABEL: u64 = 1;
const GAUSSIAN_LABEL: u64 = 2;
const MIN_REPLICATES: usize = 50;

/// Stable vs Gaussian `p_n` over a grid of sample sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct PnFigureConfig {
    pub experiment_id: String,
    pub stable_alpha: f64,
    pub k: f64,
    pub m: usize,
    pub seed: u64,
    pub n_values: Vec<usize>,
    /// Inclusive range the crossover sample size must fall in.
    pub crossover_window: (usize, usize),
}

impl PnFigureConfig {
    pub fn figure1(m: usize, seed: u64) -> Self {
        Self {
            experiment_id: "fig1".into(),
            stable_alpha: 1.2,
            k: 3.0,
            m,
            seed,
            n_values: figure_n_grid(),
            crossover_window: if m >= 1500 { (17_000, 19_000) } else { (11_000, 25_000) },
        }
    }

    pub fn figure2(m: usize, seed: u64) -> Self {
        Self {
            experiment_id: "fig2".into(),
            stable_alpha: 1.8,
            k: 2.5,
            m,
            seed,
            n_values: figure_n_grid(),
            crossover_window: if m >= 1500 { (3_000, 5_000) } else { (1_000, 9_000) },
        }
    }

    /// Same figure with a different `k`; the crossover window is dropped
    /// since it only applies at the default.
    pub fn with_k(mut self, k: f64) -> Self {
        if k != self.k {
            self.k = k;
            self.crossover_window = (0, usize::MAX);
        }
        self
    }
}

/// First sample size from which the stable curve stays below the Gaussian
/// curve through the end of the grid.
pub fn crossover_n(stable: &[OutlierEstimate], gaussian: &[OutlierEstimate]) -> Option<usize> {
    let below: Vec<bool> = stable.iter().zip(gaussian).map(|(s, g)| s.p_hat < g.p_hat).collect();
    let first = below.iter().rposition(|&b| !b).map_or(0, |i| i + 1);
    stable.get(first).map(|s| s.n)
}

fn combined_se(a: &OutlierEstimate, b: &OutlierEstimate) -> f64 {
    a.std_error.hypot(b.std_error)
}

fn curve_series(label: String, curve: &[OutlierEstimate]) -> Series {
    Series::new(
        label,
        curve
            .iter()
            .map(|e| SeriesPoint::line(e.n as f64, e.p_hat, e.std_error))
            .collect(),
    )
}

pub fn run_pn_figure(config: &PnFigureConfig) -> Result<ExperimentResult> {
    if config.m < MIN_REPLICATES {
        return Err(Error::InvalidParameter(format!(
            "m must be at least {MIN_REPLICATES}, got {}",
            config.m
        )));
    }
    let start = Instant::now();
    let stable_spec = DistributionSpec::symmetric_stable(config.stable_alpha)?;
    let k = config.k;
    let stable = pn_curve(
        &stable_spec,
        k,
        &config.n_values,
        config.m,
        derive_seed(config.seed, STABLE_LABEL),
    )?;
    let gaussian = pn_curve(
        &DistributionSpec::standard_normal(),
        k,
        &config.n_values,
        config.m,
        derive_seed(config.seed, GAUSSIAN_LABEL),
    )?;

    let mut checks = Vec::new();
    let crossover = crossover_n(&stable, &gaussian);
    let (lo, hi) = config.crossover_window;
    checks.push(Check::within(
        "crossover_n",
        crossover.map_or(f64::NAN, |n| n as f64),
        lo as f64,
        hi as f64,
        "first n after which the stable curve stays below the Gaussian curve",
    ));

    let limit = 2.0 * normal_sf(k);
    let worst_z = gaussian
        .iter()
        .map(|g| ((g.p_hat - limit) / g.std_error).abs())
        .fold(0.0, f64::max);
    checks.push(Check::within(
        "gaussian_flat",
        worst_z,
        0.0,
        4.0,
        "largest |p_n - 2 Phi(-k)| over the grid, in standard errors",
    ));

    let worst_rise = stable
        .windows(2)
        .filter(|w| w[0].n >= 5000)
        .map(|w| (w[1].p_hat - w[0].p_hat) / combined_se(&w[0], &w[1]))
        .fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::within(
        "stable_decreasing",
        worst_rise,
        f64::NEG_INFINITY,
        3.0,
        "largest rise between neighbouring stable points beyond n=5000, in combined standard errors",
    ));

    let (first, last) = (&stable[0], &stable[stable.len() - 1]);
    checks.push(Check::within(
        "stable_drop",
        (first.p_hat - last.p_hat) / combined_se(first, last),
        4.0,
        f64::INFINITY,
        "drop of the stable curve from the smallest to the largest n, in combined standard errors",
    ));

    let mut series = vec![
        curve_series(format!("stable_alpha_{}", config.stable_alpha), &stable),
        curve_series("gaussian".into(), &gaussian),
    ];
    if let Some(n) = crossover {
        let s = stable.iter().find(|e| e.n == n).expect("crossover lies on the grid");
        series.push(Series::new("crossover", vec![SeriesPoint::line(n as f64, s.p_hat, 0.0)]));
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("alpha".into(), config.stable_alpha.to_string());
    parameters.insert("k".into(), k.to_string());
    parameters.insert("m".into(), config.m.to_string());
    parameters.insert(
        "n_values".into(),
        config.n_values.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" "),
    );
    Ok(ExperimentResult {
        experiment_id: config.experiment_id.clone(),
        axes: Axes::new("n", "p_n"),
        parameters,
        series,
        checks,
        provenance: Provenance {
            seed: config.seed,
            m: Some(config.m),
            runtime: start.elapsed(),
        },
    })
}

pub fn run_figure1(m: usize, seed: u64) -> Result<ExperimentResult> {
    run_pn_figure(&PnFigureConfig::figure1(m, seed))
}

pub fn run_figure2(m: usize, seed: u64) -> Result<ExperimentResult> {
    run_pn_figure(&PnFigureConfig::figure2(m, seed))
}

/// Midpoints of `cells` equal cells spanning `(lo, hi)`.
pub fn surface_axis(lo: f64, hi: f64, cells: usize) -> Vec<f64> {
    (0..cells)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / cells as f64)
        .collect()
}

/// Limit outlier probability of the symmetric tempered stable law over an
/// `(alpha, lambda)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceConfig {
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub a: f64,
    pub k: f64,
    pub seed: u64,
    /// `(alpha index, lambda index)` cells cross-checked by Monte Carlo.
    pub spot_cells: Vec<(usize, usize)>,
    pub spot_draws: usize,
}

impl SurfaceConfig {
    pub fn figure3(cells: usize, k: f64, seed: u64) -> Self {
        Self {
            alphas: surface_axis(1.1, 1.9, cells),
            lambdas: surface_axis(0.2, 4.0, cells),
            a: 1.0,
            k,
            seed,
            spot_cells: vec![(cells * 9 / 20, cells / 5), (0, 0)],
            spot_draws: 10_000_000,
        }
    }
}

const SPOT_CHUNK: usize = 1_000_000;

/// Fraction of `draws` grid-sampler draws with `|Y| > k sigma`, and its
/// binomial standard error.
fn spot_fraction(spec: &DistributionSpec, k: f64, draws: usize, seed: u64) -> Result<(f64, f64)> {
    let sampler = Sampler::new(spec)?;
    let sigma = moments(spec).std_dev().ok_or_else(|| Error::InfiniteVariance(spec.to_string()))?;
    let threshold = k * sigma;
    let chunks = draws.div_ceil(SPOT_CHUNK);
    let hits: usize = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut stream = RngStream::new(seed, c as u64);
            let len = SPOT_CHUNK.min(draws - c * SPOT_CHUNK);
            (0..len).filter(|_| sampler.draw(&mut stream).abs() > threshold).count()
        })
        .sum();
    let f = hits as f64 / draws as f64;
    Ok((f, (f * (1.0 - f) / draws as f64).sqrt()))
}

pub fn run_figure3(config: &SurfaceConfig) -> Result<ExperimentResult> {
    if config.alphas.is_empty() || config.lambdas.is_empty() {
        return Err(Error::InvalidParameter("surface grid is empty".into()));
    }
    if config.spot_cells.iter().any(|&(i, j)| i >= config.alphas.len() || j >= config.lambdas.len()) {
        return Err(Error::InvalidParameter("spot cell outside the grid".into()));
    }
    let start = Instant::now();
    let cells: Vec<(f64, f64)> = config
        .alphas
        .iter()
        .flat_map(|&a| config.lambdas.iter().map(move |&l| (a, l)))
        .collect();
    let values: Vec<Result<f64>> = cells
        .par_iter()
        .map(|&(alpha, lambda)| {
            limit_outlier_prob(&DistributionSpec::tempered_stable(alpha, lambda, config.a)?, config.k)
        })
        .collect();
    let failures = values.iter().filter(|v| v.is_err()).count();
    let surface: Vec<SeriesPoint> = cells
        .iter()
        .zip(&values)
        .map(|(&(a, l), v)| SeriesPoint::surface(a, l, *v.as_ref().unwrap_or(&f64::NAN), 0.0))
        .collect();

    let mut checks = vec![Check::within(
        "cell_failures",
        failures as f64,
        0.0,
        0.0,
        "cells whose inversion did not reach tolerance",
    )];
    let finite = || surface.iter().map(|p| p.y).filter(|y| y.is_finite());
    let max = finite().fold(f64::NEG_INFINITY, f64::max);
    let edge = REFERENCE.observed_outlier_range[0];
    checks.push(Check::within(
        "surface_below_observed",
        max,
        0.0,
        edge,
        format!(
            "largest limit probability on the grid; {} of {} cells are at or above {edge}",
            finite().filter(|&y| y >= edge).count(),
            surface.len()
        ),
    ));
    let corner = surface[surface.len() - 1];
    let gaussian = 2.0 * normal_sf(config.k);
    checks.push(Check::within(
        "corner_near_gaussian",
        corner.y / gaussian,
        0.95,
        1.05,
        "largest alpha and lambda cell relative to the Gaussian limit",
    ));

    let mut spots = Vec::new();
    for (idx, &(i, j)) in config.spot_cells.iter().enumerate() {
        let (alpha, lambda) = (config.alphas[i], config.lambdas[j]);
        let spec = DistributionSpec::tempered_stable(alpha, lambda, config.a)?;
        let (f, se) = spot_fraction(&spec, config.k, config.spot_draws, derive_seed(config.seed, idx as u64))?;
        let exact = surface[i * config.lambdas.len() + j].y;
        checks.push(Check::within(
            format!("spot_{i}_{j}"),
            (f - exact) / se,
            -4.0,
            4.0,
            format!("Monte Carlo vs inversion at alpha={alpha}, lambda={lambda}, in standard errors"),
        ));
        spots.push(SeriesPoint::surface(alpha, lambda, f, se));
    }

    let mut parameters = BTreeMap::new();
    parameters.insert("k".into(), config.k.to_string());
    parameters.insert("a".into(), config.a.to_string());
    parameters.insert("alpha_cells".into(), config.alphas.len().to_string());
    parameters.insert("lambda_cells".into(), config.lambdas.len().to_string());
    parameters.insert("spot_draws".into(), config.spot_draws.to_string());
    Ok(ExperimentResult {
        experiment_id: "fig3".into(),
        axes: Axes::surface("alpha", "lambda", "limit probability"),
        parameters,
        series: vec![Series::new("limit_prob", surface), Series::new("spot_mc", spots)],
        checks,
        provenance: Provenance {
            seed: config.seed,
            m: None,
            runtime: start.elapsed(),
        },
    })
}
