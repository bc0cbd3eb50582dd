//! Characteristic functions, moments and Gil-Pelaez inversion.
//!
//! Tail probabilities come from
//! `P{Y > x} = 1/2 + (1/pi) int_0^inf Im(e^{-iux} phi(u)) / u du`,
//! which for a law symmetric about `c` reduces to
//! `1/2 - (1/pi) int_0^inf sin(u (x - c)) psi(u) / u du` with `psi` the real
//! CF of the centred law.

mod grid;
pub mod quad;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::distribution::DistributionSpec;
use crate::error::{Error, Result};

pub use grid::{build_cdf_grid, CharFnGrid, GRID_REPAIR_BUDGET};
pub use quad::Integral;

/// Absolute error budget for every inversion.
pub const INVERSION_TOLERANCE: f64 = 1e-6;

// Integrals are driven well below the public budget so that grids built from
// thousands of inversions stay comfortably inside it.
const INTERNAL_TOLERANCE: f64 = 1e-9;

/// First two moments of a law. `variance` is `None` when infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: Option<f64>,
    pub variance: Option<f64>,
}

impl Moments {
    pub fn finite(&self) -> bool {
        self.variance.is_some()
    }

    pub fn std_dev(&self) -> Option<f64> {
        self.variance.map(f64::sqrt)
    }
}

/// Characteristic function `E exp(iuY)`.
pub fn cf_eval(spec: &DistributionSpec, u: f64) -> Result<Complex64> {
    spec.validate()?;
    cf_unchecked(spec, u)
}

fn cf_unchecked(spec: &DistributionSpec, u: f64) -> Result<Complex64> {
    use DistributionSpec::*;
    let v = match spec {
        Gaussian { mu, .. } => Complex64::from_polar(centered_cf(spec, u)?, mu * u),
        OneSidedStable { alpha } => {
            // phi(u) = exp(-(-iu)^alpha)
            let arg = -0.5 * PI * alpha * u.signum();
            (-Complex64::from_polar(u.abs().powf(*alpha), arg)).exp()
        }
        Exponential { rate } => Complex64::new(*rate, 0.0) / Complex64::new(*rate, -u),
        PutTailDown { base, p } => cf_unchecked(base, u)? * (1.0 - p) + *p,
        _ => Complex64::new(centered_cf(spec, u)?, 0.0),
    };
    Ok(v)
}

/// Real CF of a symmetric law after moving its centre to the origin.
fn centered_cf(spec: &DistributionSpec, u: f64) -> Result<f64> {
    use DistributionSpec::*;
    let v = match spec {
        Gaussian { sigma, .. } => (-0.5 * sigma * sigma * u * u).exp(),
        SymmetricStable { alpha } => (-u.abs().powf(*alpha)).exp(),
        Laplace { scale } => 1.0 / (1.0 + scale * scale * u * u),
        ShiftedExponentialSym { rate } => rate * rate / (rate * rate + u * u),
        SymmetricGamma { shape, scale } => (1.0 + scale * scale * u * u).powf(-shape),
        TemperedStableSym { alpha, lambda, a } => {
            // (lambda - iu)^alpha + (lambda + iu)^alpha = 2 |lambda + iu|^alpha cos(alpha theta)
            let modulus = lambda.hypot(u);
            let theta = u.atan2(*lambda);
            let s = 2.0 * modulus.powf(*alpha) * (alpha * theta).cos() - 2.0 * lambda.powf(*alpha);
            (a * s).exp()
        }
        PutTailDown { base, p } => (1.0 - p) * centered_cf(base, u)? + p,
        SymmetricPareto { .. } => {
            return Err(Error::Unsupported(format!("characteristic function of {spec}")))
        }
        OneSidedStable { .. } | Exponential { .. } => {
            return Err(Error::Unsupported(format!("real characteristic function of {spec}")))
        }
    };
    Ok(v)
}

/// Mean and variance; the variance is `None` for infinite-variance laws.
pub fn moments(spec: &DistributionSpec) -> Moments {
    use DistributionSpec::*;
    let (mean, variance) = match spec {
        Gaussian { mu, sigma } => (Some(*mu), Some(sigma * sigma)),
        SymmetricStable { alpha } if *alpha >= 2.0 => (Some(0.0), Some(2.0)),
        SymmetricStable { alpha } if *alpha > 1.0 => (Some(0.0), None),
        SymmetricStable { .. } | OneSidedStable { .. } => (None, None),
        Laplace { scale } => (Some(0.0), Some(2.0 * scale * scale)),
        ShiftedExponentialSym { rate } => (Some(0.0), Some(2.0 / (rate * rate))),
        SymmetricGamma { shape, scale } => (Some(0.0), Some(2.0 * shape * scale * scale)),
        TemperedStableSym { alpha, lambda, a } => (
            Some(0.0),
            Some(2.0 * a * alpha * (alpha - 1.0) * lambda.powf(alpha - 2.0)),
        ),
        PutTailDown { base, p } => {
            let m = moments(base);
            (m.mean.map(|mu| (1.0 - p) * mu), m.variance.map(|v| (1.0 - p) * v))
        }
        SymmetricPareto { alpha_tail, x_min } => (
            Some(0.0),
            Some(alpha_tail * x_min * x_min / (alpha_tail - 2.0)),
        ),
        Exponential { rate } => (Some(1.0 / rate), Some(1.0 / (rate * rate))),
    };
    Moments { mean, variance }
}

/// Frequency scale at which the CF has visibly decayed.
fn frequency_scale(spec: &DistributionSpec) -> f64 {
    match spec {
        DistributionSpec::PutTailDown { base, .. } => frequency_scale(base),
        _ => match moments(spec).std_dev() {
            Some(sd) => 1.0 / sd,
            None => 1.0,
        },
    }
}

fn sin_over_u(u: f64, x: f64) -> f64 {
    let ux = u * x;
    if ux.abs() < 1e-4 {
        x * (1.0 - ux * ux / 6.0)
    } else {
        ux.sin() / u
    }
}

/// `P{Y > x}` by Gil-Pelaez inversion, with its error estimate.
pub fn tail_prob_with_error(spec: &DistributionSpec, x: f64) -> Result<Integral> {
    spec.validate()?;
    tail_unchecked(spec, x)
}

fn tail_unchecked(spec: &DistributionSpec, x: f64) -> Result<Integral> {
    if let DistributionSpec::PutTailDown { base, p } = spec {
        // The atom keeps the CF from decaying; invert the base alone.
        let b = tail_unchecked(base, x)?;
        let atom = if x < 0.0 { *p } else { 0.0 };
        return Ok(Integral {
            value: (1.0 - p) * b.value + atom,
            abs_error: (1.0 - p) * b.abs_error,
        });
    }
    let scale = frequency_scale(spec);
    let integral = match spec.symmetry_center() {
        Some(c) => {
            let y = x - c;
            if y == 0.0 {
                return Ok(Integral {
                    value: 0.5,
                    abs_error: 0.0,
                });
            }
            centered_cf(spec, 0.0)?;
            quad::oscillatory_half_line(
                |u| sin_over_u(u, y) * centered_cf(spec, u).unwrap_or(0.0),
                |u| centered_cf(spec, u).unwrap_or(0.0).abs() / u,
                y,
                scale,
                INTERNAL_TOLERANCE,
            )?
        }
        None => {
            let r = quad::oscillatory_half_line(
                |u| {
                    let phi = cf_unchecked(spec, u).unwrap_or_default();
                    (Complex64::from_polar(1.0, -u * x) * phi).im / u
                },
                |u| cf_unchecked(spec, u).unwrap_or_default().norm() / u,
                x,
                scale,
                INTERNAL_TOLERANCE,
            )?;
            Integral {
                value: -r.value,
                abs_error: r.abs_error,
            }
        }
    };
    let value = (0.5 - integral.value / PI).clamp(0.0, 1.0);
    Ok(Integral {
        value,
        abs_error: integral.abs_error / PI,
    })
}

/// `P{Y > x}` by characteristic-function inversion, accurate to
/// [`INVERSION_TOLERANCE`].
pub fn tail_prob(spec: &DistributionSpec, x: f64) -> Result<f64> {
    let r = tail_prob_with_error(spec, x)?;
    if r.abs_error > INVERSION_TOLERANCE {
        return Err(Error::Quadrature {
            achieved: r.abs_error,
            requested: INVERSION_TOLERANCE,
        });
    }
    Ok(r.value)
}

/// Density by Fourier inversion. Put-tail-down laws return the density of
/// their continuous part.
pub fn density(spec: &DistributionSpec, x: f64) -> Result<f64> {
    spec.validate()?;
    density_unchecked(spec, x).map(|r| r.value)
}

fn density_unchecked(spec: &DistributionSpec, x: f64) -> Result<Integral> {
    if let DistributionSpec::PutTailDown { base, p } = spec {
        let b = density_unchecked(base, x)?;
        return Ok(Integral {
            value: (1.0 - p) * b.value,
            abs_error: (1.0 - p) * b.abs_error,
        });
    }
    let scale = frequency_scale(spec);
    let r = match spec.symmetry_center() {
        Some(c) => {
            let y = x - c;
            centered_cf(spec, 0.0)?;
            quad::oscillatory_half_line(
                |u| (u * y).cos() * centered_cf(spec, u).unwrap_or(0.0),
                |u| centered_cf(spec, u).unwrap_or(0.0).abs(),
                y,
                scale,
                INTERNAL_TOLERANCE,
            )?
        }
        None => quad::oscillatory_half_line(
            |u| (Complex64::from_polar(1.0, -u * x) * cf_unchecked(spec, u).unwrap_or_default()).re,
            |u| cf_unchecked(spec, u).unwrap_or_default().norm(),
            x,
            scale,
            INTERNAL_TOLERANCE,
        )?,
    };
    Ok(Integral {
        value: (r.value / PI).max(0.0),
        abs_error: r.abs_error / PI,
    })
}

/// Limit of the outlier probability for a finite-variance law:
/// `P{|Y - mean| > k sigma}`.
pub fn limit_outlier_prob(spec: &DistributionSpec, k: f64) -> Result<f64> {
    spec.validate()?;
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
    }
    let m = moments(spec);
    let (Some(mean), Some(sd)) = (m.mean, m.std_dev()) else {
        return Err(Error::InfiniteVariance(spec.to_string()));
    };
    let upper = tail_prob(spec, mean + k * sd)?;
    if spec.symmetry_center().is_some() {
        return Ok(2.0 * upper);
    }
    let below = 1.0 - tail_prob(spec, mean - k * sd)?;
    Ok(upper + below)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::DistributionSpec as D;

    #[test]
    fn every_cf_is_one_at_origin() {
        let specs = [
            D::standard_normal(),
            D::Gaussian { mu: 2.0, sigma: 3.0 },
            D::SymmetricStable { alpha: 0.7 },
            D::OneSidedStable { alpha: 0.5 },
            D::Laplace { scale: 2.0 },
            D::SymmetricGamma { shape: 2.0, scale: 0.5 },
            D::TemperedStableSym { alpha: 1.5, lambda: 1.0, a: 1.0 },
            D::TemperedStableSym { alpha: 1.1, lambda: 0.2, a: 3.0 },
            D::put_tail_down(D::standard_normal(), 0.3).unwrap(),
            D::ShiftedExponentialSym { rate: 1.5 },
            D::Exponential { rate: 2.0 },
        ];
        for s in &specs {
            let c = cf_eval(s, 0.0).unwrap();
            assert!((c.re - 1.0).abs() < 1e-15 && c.im.abs() < 1e-15, "{s}: {c}");
        }
    }

    #[test]
    fn gaussian_cf_value() {
        let c = cf_eval(&D::standard_normal(), 1.0).unwrap();
        assert!((c.re - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(c.im, 0.0);
    }

    #[test]
    fn pareto_cf_is_unsupported() {
        let par = D::SymmetricPareto {
            alpha_tail: 3.0,
            x_min: 1.0,
        };
        assert!(matches!(cf_eval(&par, 1.0), Err(Error::Unsupported(_))));
        assert!(tail_prob(&par, 1.0).is_err());
    }

    #[test]
    fn moments_closed_forms() {
        let m = moments(&D::TemperedStableSym {
            alpha: 1.5,
            lambda: 1.0,
            a: 1.0,
        });
        assert!((m.variance.unwrap() - 1.5).abs() < 1e-15);
        assert_eq!(moments(&D::Laplace { scale: 1.0 }).variance, Some(2.0));
        let base = D::Laplace { scale: 1.5 };
        let ptd0 = D::put_tail_down(base.clone(), 0.0).unwrap();
        assert_eq!(moments(&ptd0).variance, moments(&base).variance);
        let ptd = D::put_tail_down(base, 0.25).unwrap();
        assert!((moments(&ptd).variance.unwrap() - 0.75 * 4.5).abs() < 1e-14);
        assert!(!moments(&D::SymmetricStable { alpha: 1.8 }).finite());
        assert!(!moments(&D::OneSidedStable { alpha: 0.5 }).finite());
        assert_eq!(moments(&D::SymmetricStable { alpha: 2.0 }).variance, Some(2.0));
    }

    #[test]
    fn tail_prob_examples() {
        let g = tail_prob(&D::standard_normal(), 3.0).unwrap();
        assert!((g - 0.0013499).abs() < 1e-7, "{g}");
        assert_eq!(tail_prob(&D::Laplace { scale: 2.0 }, 0.0).unwrap(), 0.5);
        let c = tail_prob(&D::SymmetricStable { alpha: 1.0 }, 1.0).unwrap();
        assert!((c - 0.25).abs() < 1e-6, "{c}");
    }

    #[test]
    fn shifted_gaussian_tail() {
        let s = D::Gaussian { mu: 2.0, sigma: 3.0 };
        for x in [-4.0, 0.0, 2.0, 5.0, 11.0] {
            let t = tail_prob(&s, x).unwrap();
            let e = s.closed_form_survival(x).unwrap();
            assert!((t - e).abs() < 1e-8, "x={x}: {t} vs {e}");
        }
    }

    #[test]
    fn asymmetric_inversion_matches_exponential_and_levy() {
        let e = D::Exponential { rate: 2.0 };
        for x in [0.1, 0.5, 1.0, 2.0] {
            let t = tail_prob(&e, x).unwrap();
            assert!((t - (-2.0 * x).exp()).abs() < 1e-6, "x={x}: {t}");
        }
        let levy = D::OneSidedStable { alpha: 0.5 };
        for x in [0.5, 2.0, 10.0] {
            let t = tail_prob_with_error(&levy, x).unwrap();
            let e = levy.closed_form_survival(x).unwrap();
            assert!((t.value - e).abs() < 1e-6, "x={x}: {t:?} vs {e}");
        }
    }

    #[test]
    fn put_tail_down_tail_uses_atom() {
        let s = D::put_tail_down(D::standard_normal(), 0.4).unwrap();
        let left = tail_prob(&s, -1e-9).unwrap();
        assert!((left - (0.6 * 0.5 + 0.4)).abs() < 1e-8);
        assert!((tail_prob(&s, 0.0).unwrap() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn density_of_gaussian_and_laplace() {
        let g = density(&D::standard_normal(), 1.0).unwrap();
        assert!((g - (-0.5f64).exp() / (2.0 * PI).sqrt()).abs() < 1e-9);
        let l = density(&D::Laplace { scale: 1.0 }, 0.5).unwrap();
        assert!((l - 0.5 * (-0.5f64).exp()).abs() < 1e-7, "{l}");
    }

    #[test]
    fn limit_prob_rejects_infinite_variance_and_bad_k() {
        let s = D::SymmetricStable { alpha: 1.8 };
        assert!(matches!(limit_outlier_prob(&s, 3.0), Err(Error::InfiniteVariance(_))));
        assert!(limit_outlier_prob(&D::standard_normal(), 0.0).is_err());
    }

    #[test]
    fn limit_prob_of_exponential_is_two_sided() {
        // mean 1, sd 1: P{|Y-1| > 1.5} = P{Y > 2.5}
        let p = limit_outlier_prob(&D::Exponential { rate: 1.0 }, 1.5).unwrap();
        assert!((p - (-2.5f64).exp()).abs() < 2e-6, "{p}");
    }
}
