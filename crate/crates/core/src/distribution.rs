//! Tagged descriptions of every law the laboratory can sample or invert.

use std::f64::consts::PI;
use std::fmt;

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// A sampleable, analyzable law and its parameters.
///
/// Variants are public so specs can be written as literals; every operation
/// calls [`DistributionSpec::validate`] before using one.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    Gaussian { mu: f64, sigma: f64 },
    /// Standard-scale symmetric stable law with CF `exp(-|u|^alpha)`.
    SymmetricStable { alpha: f64 },
    /// Totally skewed positive stable law with Laplace transform `exp(-s^alpha)`.
    OneSidedStable { alpha: f64 },
    /// Density `exp(-|x|/scale) / (2 scale)`.
    Laplace { scale: f64 },
    /// Law of `G1 - G2` for independent `Gamma(shape, scale)` variables.
    SymmetricGamma { shape: f64, scale: f64 },
    /// Symmetric tempered stable law with CF
    /// `exp(a ((lambda - iu)^alpha + (lambda + iu)^alpha - 2 lambda^alpha))`.
    TemperedStableSym { alpha: f64, lambda: f64, a: f64 },
    /// Mixture `(1 - p) F + p H` of a symmetric finite-variance base `F` and
    /// a unit atom at the origin.
    PutTailDown { base: Box<DistributionSpec>, p: f64 },
    /// Symmetric power tail, `P{X > x} = (x_min / x)^alpha_tail / 2` for `x >= x_min`.
    SymmetricPareto { alpha_tail: f64, x_min: f64 },
    /// Symmetric law with `P{X > x} = exp(-rate x) / 2` for `x >= 0`.
    ShiftedExponentialSym { rate: f64 },
    /// One-sided exponential law with the given rate.
    Exponential { rate: f64 },
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSpec(format!("{name} must be positive and finite, got {v}")))
    }
}

fn within(name: &str, v: f64, lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<()> {
    let above = if lo_closed { v >= lo } else { v > lo };
    let below = if hi_closed { v <= hi } else { v < hi };
    if v.is_finite() && above && below {
        Ok(())
    } else {
        let l = if lo_closed { '[' } else { '(' };
        let r = if hi_closed { ']' } else { ')' };
        Err(Error::InvalidSpec(format!("{name} must lie in {l}{lo}, {hi}{r}, got {v}")))
    }
}

impl DistributionSpec {
    pub fn standard_normal() -> Self {
        DistributionSpec::Gaussian { mu: 0.0, sigma: 1.0 }
    }

    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        Self::checked(DistributionSpec::Gaussian { mu, sigma })
    }

    pub fn symmetric_stable(alpha: f64) -> Result<Self> {
        Self::checked(DistributionSpec::SymmetricStable { alpha })
    }

    pub fn one_sided_stable(alpha: f64) -> Result<Self> {
        Self::checked(DistributionSpec::OneSidedStable { alpha })
    }

    pub fn laplace(scale: f64) -> Result<Self> {
        Self::checked(DistributionSpec::Laplace { scale })
    }

    pub fn symmetric_gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::checked(DistributionSpec::SymmetricGamma { shape, scale })
    }

    pub fn tempered_stable(alpha: f64, lambda: f64, a: f64) -> Result<Self> {
        Self::checked(DistributionSpec::TemperedStableSym { alpha, lambda, a })
    }

    pub fn put_tail_down(base: DistributionSpec, p: f64) -> Result<Self> {
        Self::checked(DistributionSpec::PutTailDown {
            base: Box::new(base),
            p,
        })
    }

    pub fn symmetric_pareto(alpha_tail: f64, x_min: f64) -> Result<Self> {
        Self::checked(DistributionSpec::SymmetricPareto { alpha_tail, x_min })
    }

    pub fn shifted_exponential_sym(rate: f64) -> Result<Self> {
        Self::checked(DistributionSpec::ShiftedExponentialSym { rate })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::checked(DistributionSpec::Exponential { rate })
    }

    fn checked(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        use DistributionSpec::*;
        match self {
            Gaussian { mu, sigma } => {
                if !mu.is_finite() {
                    return Err(Error::InvalidSpec(format!("mu must be finite, got {mu}")));
                }
                positive("sigma", *sigma)
            }
            SymmetricStable { alpha } => within("alpha", *alpha, 0.0, 2.0, false, true),
            OneSidedStable { alpha } => within("alpha", *alpha, 0.0, 1.0, false, false),
            Laplace { scale } => positive("scale", *scale),
            SymmetricGamma { shape, scale } => {
                positive("shape", *shape)?;
                positive("scale", *scale)
            }
            TemperedStableSym { alpha, lambda, a } => {
                within("alpha", *alpha, 1.0, 2.0, false, false)?;
                positive("lambda", *lambda)?;
                positive("A", *a)
            }
            PutTailDown { base, p } => {
                // p = 0 is admitted as the identity transform.
                within("p", *p, 0.0, 1.0, true, false)?;
                base.validate()?;
                if !base.has_finite_variance() {
                    return Err(Error::InvalidSpec(format!(
                        "put-tail-down base {base} must have finite variance"
                    )));
                }
                if base.symmetry_center() != Some(0.0) {
                    return Err(Error::InvalidSpec(format!(
                        "put-tail-down base {base} must be symmetric about 0"
                    )));
                }
                Ok(())
            }
            SymmetricPareto { alpha_tail, x_min } => {
                if !(alpha_tail.is_finite() && *alpha_tail > 2.0) {
                    return Err(Error::InvalidSpec(format!(
                        "alpha_tail must exceed 2, got {alpha_tail}"
                    )));
                }
                positive("x_min", *x_min)
            }
            ShiftedExponentialSym { rate } | Exponential { rate } => positive("rate", *rate),
        }
    }

    /// Structural finite-variance test; does not validate parameters.
    pub fn has_finite_variance(&self) -> bool {
        match self {
            DistributionSpec::SymmetricStable { alpha } => *alpha >= 2.0,
            DistributionSpec::OneSidedStable { .. } => false,
            DistributionSpec::PutTailDown { base, .. } => base.has_finite_variance(),
            _ => true,
        }
    }

    /// Point `c` with `F(c - x) = 1 - F(c + x)`, when the law is symmetric.
    pub fn symmetry_center(&self) -> Option<f64> {
        match self {
            DistributionSpec::Gaussian { mu, .. } => Some(*mu),
            DistributionSpec::OneSidedStable { .. } | DistributionSpec::Exponential { .. } => None,
            _ => Some(0.0),
        }
    }

    /// Short stable identifier used in file names and series labels.
    pub fn label(&self) -> String {
        self.to_string()
    }

    /// CDF in closed form where one exists.
    ///
    /// Atoms are right-continuous: the put-tail-down CDF at 0 includes the
    /// full atom.
    pub fn closed_form_cdf(&self, x: f64) -> Option<f64> {
        use DistributionSpec::*;
        let v = match self {
            Gaussian { mu, sigma } => normal_cdf((x - mu) / sigma),
            SymmetricStable { alpha } if *alpha == 2.0 => normal_cdf(x / 2f64.sqrt()),
            SymmetricStable { alpha } if *alpha == 1.0 => 0.5 + x.atan() / PI,
            SymmetricStable { .. } => return None,
            // Levy law: exp(-sqrt(s)) is the transform of scale 1/2.
            OneSidedStable { alpha } if *alpha == 0.5 => {
                if x <= 0.0 {
                    0.0
                } else {
                    erfc(0.5 / x.sqrt())
                }
            }
            OneSidedStable { .. } => return None,
            Laplace { scale } => laplace_cdf(x, *scale),
            ShiftedExponentialSym { rate } => laplace_cdf(x, 1.0 / rate),
            SymmetricPareto { alpha_tail, x_min } => {
                if x.abs() < *x_min {
                    0.5
                } else {
                    let half_tail = 0.5 * (x_min / x.abs()).powf(*alpha_tail);
                    if x > 0.0 {
                        1.0 - half_tail
                    } else {
                        half_tail
                    }
                }
            }
            Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            PutTailDown { base, p } => {
                let step = if x >= 0.0 { 1.0 } else { 0.0 };
                (1.0 - p) * base.closed_form_cdf(x)? + p * step
            }
            SymmetricGamma { .. } | TemperedStableSym { .. } => return None,
        };
        Some(v)
    }

    /// `P{X > x}` in closed form, computed without cancellation in the upper tail.
    pub fn closed_form_survival(&self, x: f64) -> Option<f64> {
        use DistributionSpec::*;
        match self {
            Gaussian { mu, sigma } => Some(normal_sf((x - mu) / sigma)),
            SymmetricStable { alpha } if *alpha == 2.0 => Some(normal_sf(x / 2f64.sqrt())),
            Laplace { scale } => Some(laplace_cdf(-x, *scale)),
            ShiftedExponentialSym { rate } => Some(laplace_cdf(-x, 1.0 / rate)),
            SymmetricPareto { .. } if x > 0.0 => self.closed_form_cdf(-x),
            Exponential { rate } => Some(if x <= 0.0 { 1.0 } else { (-rate * x).exp() }),
            PutTailDown { base, p } => {
                let atom = if x < 0.0 { 1.0 } else { 0.0 };
                Some((1.0 - p) * base.closed_form_survival(x)? + p * atom)
            }
            _ => self.closed_form_cdf(x).map(|c| 1.0 - c),
        }
    }
}

pub(crate) fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

pub(crate) fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

fn laplace_cdf(x: f64, b: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / b).exp()
    } else {
        1.0 - 0.5 * (-x / b).exp()
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use DistributionSpec::*;
        match self {
            Gaussian { mu, sigma } => write!(f, "gaussian(mu={mu},sigma={sigma})"),
            SymmetricStable { alpha } => write!(f, "stable(alpha={alpha})"),
            OneSidedStable { alpha } => write!(f, "one_sided_stable(alpha={alpha})"),
            Laplace { scale } => write!(f, "laplace(b={scale})"),
            SymmetricGamma { shape, scale } => write!(f, "sym_gamma(r={shape},scale={scale})"),
            TemperedStableSym { alpha, lambda, a } => {
                write!(f, "tempered_stable(alpha={alpha},lambda={lambda},A={a})")
            }
            PutTailDown { base, p } => write!(f, "put_tail_down({base},p={p})"),
            SymmetricPareto { alpha_tail, x_min } => {
                write!(f, "sym_pareto(alpha={alpha_tail},x_min={x_min})")
            }
            ShiftedExponentialSym { rate } => write!(f, "sym_exponential(a={rate})"),
            Exponential { rate } => write!(f, "exponential(rate={rate})"),
        }
    }
}
