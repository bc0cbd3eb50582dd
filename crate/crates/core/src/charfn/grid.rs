use rayon::prelude::*;

use super::{density_unchecked, moments, tail_unchecked, INVERSION_TOLERANCE};
use crate::distribution::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Largest monotonicity repair a grid may absorb.
pub const GRID_REPAIR_BUDGET: f64 = 1e-6;

const POINTS_PER_SD: f64 = 25.0;
const MAX_SIGMAS: f64 = 400.0;
const MAX_REFINEMENTS: u32 = 3;

/// CDF tabulated by characteristic-function inversion on a uniform grid,
/// interpolated by monotone cubic Hermite pieces.
///
/// Beyond the grid the tails are continued exponentially, matching value and
/// density at the end points.
#[derive(Debug, Clone)]
pub struct CharFnGrid {
    pub spec: DistributionSpec,
    pub abscissae: Vec<f64>,
    pub cdf_values: Vec<f64>,
    /// Hermite slopes after the monotonicity limiter.
    pub slopes: Vec<f64>,
    pub max_monotonicity_repair: f64,
    /// Worst gap between interpolant and direct inversion at cell midpoints.
    pub max_interpolation_error: f64,
}

/// Tabulates the CDF of a finite-variance law.
///
/// The range `mean +- c sd` grows until the mass outside it falls below
/// `target_error`; the spacing halves until midpoint interpolation error is
/// within `max(target_error, 1e-6)`.
pub fn build_cdf_grid(spec: &DistributionSpec, target_error: f64) -> Result<CharFnGrid> {
    spec.validate()?;
    if !(target_error > 0.0 && target_error <= 1e-3) {
        return Err(Error::InvalidParameter(format!(
            "target_error must lie in (0, 1e-3], got {target_error}"
        )));
    }
    if matches!(spec, DistributionSpec::PutTailDown { .. }) {
        return Err(Error::Unsupported(format!("cdf grid for {spec} (atom at 0)")));
    }
    let m = moments(spec);
    let (Some(mean), Some(sd)) = (m.mean, m.std_dev()) else {
        return Err(Error::InfiniteVariance(spec.to_string()));
    };

    let outside = |c: f64| -> Result<f64> {
        let upper = checked(tail_unchecked(spec, mean + c * sd)?)?;
        let lower = 1.0 - checked(tail_unchecked(spec, mean - c * sd)?)?;
        Ok(upper + lower)
    };
    let mut c = 6.0;
    loop {
        let mass = outside(c)?;
        if mass < target_error {
            break;
        }
        if c * 1.25 > MAX_SIGMAS {
            return Err(Error::TailMassUnreachable {
                tail_mass: mass,
                target: target_error,
                sigmas: c,
            });
        }
        c *= 1.25;
    }

    let accuracy = target_error.max(INVERSION_TOLERANCE);
    let mut cells = (2.0 * c * POINTS_PER_SD).ceil() as usize;
    cells += cells % 2;
    let mut refinements = 0;
    loop {
        let grid = tabulate(spec, mean - c * sd, mean + c * sd, cells)?;
        if grid.max_interpolation_error <= accuracy || refinements == MAX_REFINEMENTS {
            return Ok(grid);
        }
        cells *= 2;
        refinements += 1;
    }
}

fn checked(r: super::Integral) -> Result<f64> {
    if r.abs_error > INVERSION_TOLERANCE {
        return Err(Error::Quadrature {
            achieved: r.abs_error,
            requested: INVERSION_TOLERANCE,
        });
    }
    Ok(r.value)
}

fn tabulate(spec: &DistributionSpec, lo: f64, hi: f64, cells: usize) -> Result<CharFnGrid> {
    let h = (hi - lo) / cells as f64;
    let abscissae: Vec<f64> = (0..=cells).map(|i| lo + h * i as f64).collect();
    let evaluated: Vec<(f64, f64)> = abscissae
        .par_iter()
        .map(|&x| {
            let cdf = 1.0 - checked(tail_unchecked(spec, x)?)?;
            let pdf = checked(density_unchecked(spec, x)?)?;
            Ok((cdf, pdf))
        })
        .collect::<Result<_>>()?;

    let mut cdf_values = Vec::with_capacity(evaluated.len());
    let mut slopes = Vec::with_capacity(evaluated.len());
    let mut repair: f64 = 0.0;
    let mut running: f64 = 0.0;
    for &(cdf, pdf) in &evaluated {
        let clamped = cdf.clamp(0.0, 1.0);
        if clamped < running {
            repair = repair.max(running - clamped);
        }
        running = running.max(clamped);
        cdf_values.push(running);
        slopes.push(pdf.max(0.0));
    }
    if repair > GRID_REPAIR_BUDGET {
        return Err(Error::RepairBudgetExceeded {
            repair,
            budget: GRID_REPAIR_BUDGET,
        });
    }
    limit_slopes(&cdf_values, &mut slopes, h);

    let mut grid = CharFnGrid {
        spec: spec.clone(),
        abscissae,
        cdf_values,
        slopes,
        max_monotonicity_repair: repair,
        max_interpolation_error: 0.0,
    };
    let mids: Vec<f64> = grid.abscissae.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let worst = mids
        .par_iter()
        .map(|&x| {
            let direct = 1.0 - checked(tail_unchecked(spec, x)?)?;
            Ok((grid.cdf(x) - direct).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    grid.max_interpolation_error = worst;
    Ok(grid)
}

/// Fritsch-Carlson limiter: keeps every Hermite piece monotone.
fn limit_slopes(values: &[f64], slopes: &mut [f64], h: f64) {
    for i in 0..values.len() - 1 {
        let secant = (values[i + 1] - values[i]) / h;
        if secant <= 0.0 {
            slopes[i] = 0.0;
            slopes[i + 1] = 0.0;
            continue;
        }
        let a = slopes[i] / secant;
        let b = slopes[i + 1] / secant;
        let r2 = a * a + b * b;
        if r2 > 9.0 {
            let tau = 3.0 / r2.sqrt();
            slopes[i] = tau * a * secant;
            slopes[i + 1] = tau * b * secant;
        }
    }
}

#[inline]
fn hermite(t: f64, y0: f64, y1: f64, m0: f64, m1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
}

#[inline]
fn hermite_slope(t: f64, y0: f64, y1: f64, m0: f64, m1: f64) -> f64 {
    let t2 = t * t;
    (6.0 * t2 - 6.0 * t) * (y0 - y1) + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (3.0 * t2 - 2.0 * t) * m1
}

impl CharFnGrid {
    fn step(&self) -> f64 {
        self.abscissae[1] - self.abscissae[0]
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.len() - 1;
        let (x0, xn) = (self.abscissae[0], self.abscissae[n]);
        let (f0, fnn) = (self.cdf_values[0], self.cdf_values[n]);
        if x <= x0 {
            return if self.slopes[0] > 0.0 && f0 > 0.0 {
                f0 * ((x - x0) * self.slopes[0] / f0).exp()
            } else if x < x0 {
                0.0
            } else {
                f0
            };
        }
        if x >= xn {
            let s = 1.0 - fnn;
            return if self.slopes[n] > 0.0 && s > 0.0 {
                1.0 - s * (-(x - xn) * self.slopes[n] / s).exp()
            } else if x > xn {
                1.0
            } else {
                fnn
            };
        }
        let h = self.step();
        let i = (((x - x0) / h) as usize).min(n - 1);
        let t = (x - self.abscissae[i]) / h;
        hermite(
            t,
            self.cdf_values[i],
            self.cdf_values[i + 1],
            h * self.slopes[i],
            h * self.slopes[i + 1],
        )
    }

    /// Inverse of [`CharFnGrid::cdf`] for `v` in (0, 1).
    pub fn quantile(&self, v: f64) -> f64 {
        let n = self.len() - 1;
        let (f0, fnn) = (self.cdf_values[0], self.cdf_values[n]);
        if v <= f0 {
            let x0 = self.abscissae[0];
            return if self.slopes[0] > 0.0 && f0 > 0.0 {
                x0 + (v / f0).ln() * f0 / self.slopes[0]
            } else {
                x0
            };
        }
        if v >= fnn {
            let xn = self.abscissae[n];
            let s = 1.0 - fnn;
            return if self.slopes[n] > 0.0 && s > 0.0 {
                xn + (s / (1.0 - v)).ln() * s / self.slopes[n]
            } else {
                xn
            };
        }
        // cdf_values[i] <= v < cdf_values[i + 1]
        let i = self.cdf_values.partition_point(|&c| c <= v) - 1;
        let h = self.step();
        let (y0, y1) = (self.cdf_values[i], self.cdf_values[i + 1]);
        let (m0, m1) = (h * self.slopes[i], h * self.slopes[i + 1]);
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut t = (v - y0) / (y1 - y0);
        for _ in 0..60 {
            let g = hermite(t, y0, y1, m0, m1) - v;
            if g > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            if g.abs() < 1e-15 || hi - lo < 1e-14 {
                break;
            }
            let d = hermite_slope(t, y0, y1, m0, m1);
            let newton = t - g / d;
            t = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        self.abscissae[i] + t * h
    }

    /// Inverse-transform draw.
    #[inline]
    pub fn sample(&self, stream: &mut RngStream) -> f64 {
        self.quantile(stream.open01())
    }
}
