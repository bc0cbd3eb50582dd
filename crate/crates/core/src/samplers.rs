//! Random variate generation for every supported law.
//!
//! Draws are a pure function of the stream state: equal `(spec, seed,
//! stream_id, n)` always yield bit-identical samples.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};

use crate::charfn::{build_cdf_grid, CharFnGrid};
use crate::distribution::DistributionSpec;
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Target CDF accuracy of the grids behind tempered stable sampling.
pub const GRID_TARGET_ERROR: f64 = 1e-6;

#[derive(Debug, Clone)]
enum Kind {
    Gaussian { mu: f64, sigma: f64 },
    Cauchy,
    Stable { alpha: f64 },
    OneSided { alpha: f64 },
    Laplace { scale: f64 },
    SymGamma(Gamma<f64>),
    Grid(Arc<CharFnGrid>),
    PutTailDown { base: Box<Kind>, p: f64 },
    Pareto { alpha: f64, x_min: f64 },
    Exponential { rate: f64 },
}

/// A law prepared for repeated sampling. Construction does all the
/// expensive work (CDF grids), so build once and share across threads.
#[derive(Debug, Clone)]
pub struct Sampler {
    spec: DistributionSpec,
    kind: Kind,
}

fn prepare(spec: &DistributionSpec) -> Result<Kind> {
    use DistributionSpec as D;
    Ok(match spec {
        D::Gaussian { mu, sigma } => Kind::Gaussian {
            mu: *mu,
            sigma: *sigma,
        },
        D::SymmetricStable { alpha } if *alpha == 1.0 => Kind::Cauchy,
        D::SymmetricStable { alpha } => Kind::Stable { alpha: *alpha },
        D::OneSidedStable { alpha } => Kind::OneSided { alpha: *alpha },
        D::Laplace { scale } => Kind::Laplace { scale: *scale },
        D::ShiftedExponentialSym { rate } => Kind::Laplace { scale: 1.0 / rate },
        D::SymmetricGamma { shape, scale } => Kind::SymGamma(
            Gamma::new(*shape, *scale).map_err(|e| Error::InvalidSpec(e.to_string()))?,
        ),
        D::TemperedStableSym { .. } => Kind::Grid(Arc::new(build_cdf_grid(spec, GRID_TARGET_ERROR)?)),
        D::PutTailDown { base, p } => Kind::PutTailDown {
            base: Box::new(prepare(base)?),
            p: *p,
        },
        D::SymmetricPareto { alpha_tail, x_min } => Kind::Pareto {
            alpha: *alpha_tail,
            x_min: *x_min,
        },
        D::Exponential { rate } => Kind::Exponential { rate: *rate },
    })
}

/// Chambers-Mallows-Stuck draw with CF `exp(-|u|^alpha)`, `alpha != 1`.
#[inline]
fn cms_symmetric(alpha: f64, stream: &mut RngStream) -> f64 {
    let u = stream.uniform(-FRAC_PI_2, FRAC_PI_2);
    let w = stream.exp1();
    let inv = 1.0 / alpha;
    (alpha * u).sin() / u.cos().powf(inv) * (((1.0 - alpha) * u).cos() / w).powf((1.0 - alpha) * inv)
}

/// Kanter's form of the positive stable law with `E exp(-sX) = exp(-s^alpha)`.
#[inline]
fn one_sided_stable(alpha: f64, stream: &mut RngStream) -> f64 {
    let u = stream.uniform(0.0, PI);
    let w = stream.exp1();
    let a = (alpha * u).sin().powf(alpha / (1.0 - alpha)) * ((1.0 - alpha) * u).sin()
        / u.sin().powf(1.0 / (1.0 - alpha));
    (a / w).powf((1.0 - alpha) / alpha)
}

impl Kind {
    #[inline]
    fn draw(&self, stream: &mut RngStream) -> f64 {
        match self {
            Kind::Gaussian { mu, sigma } => {
                let z: f64 = stream.sample(StandardNormal);
                mu + sigma * z
            }
            Kind::Cauchy => stream.uniform(-FRAC_PI_2, FRAC_PI_2).tan(),
            Kind::Stable { alpha } => cms_symmetric(*alpha, stream),
            Kind::OneSided { alpha } => one_sided_stable(*alpha, stream),
            Kind::Laplace { scale } => {
                let u = stream.open01() - 0.5;
                -scale * u.signum() * (-2.0 * u.abs()).ln_1p()
            }
            Kind::SymGamma(g) => g.sample(stream) - g.sample(stream),
            Kind::Grid(grid) => grid.sample(stream),
            Kind::PutTailDown { base, p } => {
                if stream.open01() < *p {
                    0.0
                } else {
                    base.draw(stream)
                }
            }
            Kind::Pareto { alpha, x_min } => {
                let mag = x_min * stream.open01().powf(-1.0 / alpha);
                if stream.coin() {
                    mag
                } else {
                    -mag
                }
            }
            Kind::Exponential { rate } => stream.exp1() / rate,
        }
    }
}

impl Sampler {
    pub fn new(spec: &DistributionSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            spec: spec.clone(),
            kind: prepare(spec)?,
        })
    }

    pub fn spec(&self) -> &DistributionSpec {
        &self.spec
    }

    /// The CDF grid behind grid-based laws.
    pub fn grid(&self) -> Option<&CharFnGrid> {
        match &self.kind {
            Kind::Grid(g) => Some(g),
            _ => None,
        }
    }

    #[inline]
    pub fn draw(&self, stream: &mut RngStream) -> f64 {
        self.kind.draw(stream)
    }

    pub fn fill(&self, stream: &mut RngStream, out: &mut [f64]) {
        for x in out.iter_mut() {
            *x = self.kind.draw(stream);
        }
    }

    pub fn sample(&self, stream: &mut RngStream, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::ZeroCount);
        }
        let mut out = vec![0.0; n];
        self.fill(stream, &mut out);
        Ok(out)
    }
}

/// `n` i.i.d. draws. Prefer [`Sampler`] when sampling the same law repeatedly.
pub fn sample(spec: &DistributionSpec, stream: &mut RngStream, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::ZeroCount);
    }
    Sampler::new(spec)?.sample(stream, n)
}

/// Law of the number of summands in a random sum.
///
/// Both laws count trials, so the support starts at 1:
/// * `Geometric { q }`: `P{N = j} = q (1 - q)^(j - 1)`, `j >= 1`, mean `1/q`.
/// * `NegativeBinomial { r, q }`: `ceil(r)` plus a negative-binomial number
///   of failures with shape `r` and success probability `q`. For integer `r`
///   this is the number of trials until the `r`-th success, so `r = 1`
///   coincides with `Geometric { q }` draw for draw. Mean
///   `ceil(r) + r (1 - q) / q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CountLaw {
    Geometric { q: f64 },
    NegativeBinomial { r: f64, q: f64 },
}

impl CountLaw {
    pub fn validate(&self) -> Result<()> {
        let (r, q) = match *self {
            CountLaw::Geometric { q } => (1.0, q),
            CountLaw::NegativeBinomial { r, q } => (r, q),
        };
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidParameter(format!("q must lie in (0, 1], got {q}")));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
        }
        Ok(())
    }

    pub fn q(&self) -> f64 {
        match *self {
            CountLaw::Geometric { q } | CountLaw::NegativeBinomial { q, .. } => q,
        }
    }

    /// Shape parameter; 1 for the geometric law.
    pub fn shape(&self) -> f64 {
        match *self {
            CountLaw::Geometric { .. } => 1.0,
            CountLaw::NegativeBinomial { r, .. } => r,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            CountLaw::Geometric { q } => 1.0 / q,
            CountLaw::NegativeBinomial { r, q } => r.ceil() + r * (1.0 - q) / q,
        }
    }
}

#[inline]
fn geometric_failures(q: f64, stream: &mut RngStream) -> u64 {
    if q >= 1.0 {
        return 0;
    }
    (stream.open01().ln() / (-q).ln_1p()).floor() as u64
}

/// One draw of a count law (always >= 1).
pub fn sample_count(law: &CountLaw, stream: &mut RngStream) -> Result<u64> {
    law.validate()?;
    Ok(draw_count(law, stream))
}

pub(crate) fn draw_count(law: &CountLaw, stream: &mut RngStream) -> u64 {
    match *law {
        CountLaw::Geometric { q } => 1 + geometric_failures(q, stream),
        CountLaw::NegativeBinomial { r, q } if r.fract() == 0.0 => {
            (0..r as u64).map(|_| 1 + geometric_failures(q, stream)).sum()
        }
        CountLaw::NegativeBinomial { r, q } => {
            let base = r.ceil() as u64;
            if q >= 1.0 {
                return base;
            }
            // Gamma-Poisson mixture for fractional shapes.
            let rate = Gamma::new(r, (1.0 - q) / q)
                .expect("validated shape")
                .sample(stream);
            let failures = if rate > 0.0 {
                Poisson::new(rate).map(|p| p.sample(stream) as u64).unwrap_or(0)
            } else {
                0
            };
            base + failures
        }
    }
}
