//! Gauss-Kronrod panels for the half-line oscillatory integrals of CF inversion.

use std::f64::consts::PI;

use crate::error::{Error, Result};

// 15-point Kronrod abscissae; odd indices are the 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_DEPTH: u32 = 100;
const MAX_PANELS: usize = 4_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
}

/// One 15-point Kronrod pass. Returns (kronrod, |kronrod - gauss|, sum |f| w).
pub(crate) fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = fc.abs() * WGK[7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        abs_sum += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    (
        kronrod * half,
        ((kronrod - gauss) * half).abs(),
        abs_sum * half.abs(),
    )
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Integral {
    let (value, err, abs_sum) = gk15(f, a, b);
    let floor = 50.0 * f64::EPSILON * abs_sum;
    if err <= tol.max(floor) || depth >= MAX_DEPTH {
        return Integral {
            value,
            abs_error: err,
        };
    }
    let mid = 0.5 * (a + b);
    let left = adaptive(f, a, mid, 0.5 * tol, depth + 1);
    let right = adaptive(f, mid, b, 0.5 * tol, depth + 1);
    Integral {
        value: left.value + right.value,
        abs_error: left.abs_error + right.abs_error,
    }
}

/// Adaptive bisection Gauss-Kronrod on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Integral {
    adaptive(&f, a, b, tol, 0)
}

/// Iterated pairwise averaging of partial sums; for an alternating series
/// with smooth terms each round gains a power of the term index.
fn averaged(sums: &[f64]) -> f64 {
    let mut level = sums.to_vec();
    while level.len() > 1 {
        level = level.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    level[0]
}

const AVERAGING_DEPTH: usize = 12;

/// Integrates `f` over `(0, inf)` where `f(u) = trig(omega u) * g(u)` with
/// `|g| <= envelope`.
///
/// Panels are at most a quarter of the oscillation half-period `pi/omega`
/// wide, and never wider than a quarter of `u_scale`, the natural frequency
/// scale of the characteristic function. Summation stops once the remaining
/// tail, bounded by one envelope-weighted hump, is below `tol / 100`. For
/// slowly decaying envelopes the half-period partial sums are extrapolated
/// by iterated averaging once the envelope is small.
pub(crate) fn oscillatory_half_line<F, E>(
    f: F,
    envelope: E,
    omega: f64,
    u_scale: f64,
    tol: f64,
) -> Result<Integral>
where
    F: Fn(f64) -> f64,
    E: Fn(f64) -> f64,
{
    let omega = omega.abs();
    let half_period = if omega > 0.0 { PI / omega } else { f64::INFINITY };
    // A cycle spans one half-period, split into at least four panels, unless
    // the oscillation is too slow to matter.
    let oscillating = half_period <= 1000.0 * u_scale;
    let per_cycle = if oscillating {
        4 * (half_period / u_scale).ceil().max(1.0) as usize
    } else {
        4
    };
    let width = if oscillating {
        half_period / per_cycle as f64
    } else {
        0.25 * u_scale
    };
    let panel_tol = (tol * 1e-6).max(1e-15);
    let regime_gate = tol.sqrt();

    let mut total = Integral {
        value: 0.0,
        abs_error: 0.0,
    };
    let mut recent: Vec<f64> = Vec::with_capacity(AVERAGING_DEPTH + 1);
    let mut previous_average: Option<f64> = None;
    let mut u = 0.0;
    let mut panels = 0usize;
    loop {
        for _ in 0..per_cycle {
            let piece = adaptive(&f, u, u + width, panel_tol, 0);
            total.value += piece.value;
            total.abs_error += piece.abs_error;
            u += width;
        }
        panels += per_cycle;
        let hump = half_period.min(u.max(1.0));
        let remainder = envelope(u) * hump;
        if remainder < 0.01 * tol {
            total.abs_error += remainder;
            break;
        }
        if oscillating && remainder < regime_gate {
            if recent.len() == AVERAGING_DEPTH + 1 {
                recent.remove(0);
            }
            recent.push(total.value);
            if recent.len() == AVERAGING_DEPTH + 1 {
                let avg = averaged(&recent);
                if let Some(prev) = previous_average {
                    let change = (avg - prev).abs();
                    if change < 0.01 * tol {
                        total.value = avg;
                        total.abs_error += change;
                        break;
                    }
                }
                previous_average = Some(avg);
            }
        }
        if panels >= MAX_PANELS {
            return Err(Error::Quadrature {
                achieved: total.abs_error + remainder,
                requested: tol,
            });
        }
    }
    if total.abs_error > tol {
        return Err(Error::Quadrature {
            achieved: total.abs_error,
            requested: tol,
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((s - 2.0).abs() < 1e-14);
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((g - 2.0).abs() < 1e-14);
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        // Kronrod 15 integrates degree 22 exactly; the Gauss part degree 13.
        let (k, _, _) = gk15(&|x: f64| x.powi(22), 0.0, 1.0);
        assert!((k - 1.0 / 23.0).abs() < 1e-15);
        let (k, e, _) = gk15(&|x: f64| x.powi(12), -1.0, 1.0);
        assert!((k - 2.0 / 13.0).abs() < 1e-15);
        assert!(e < 1e-14);
    }

    #[test]
    fn dirichlet_integral_with_gaussian_damping() {
        // int_0^inf sin(3u)/u exp(-u^2/2) du = (pi/2) erf(3/sqrt 2)
        let x = 3.0;
        let r = oscillatory_half_line(
            |u: f64| (u * x).sin() / u * (-0.5 * u * u).exp(),
            |u: f64| (-0.5 * u * u).exp() / u,
            x,
            1.0,
            1e-10,
        )
        .unwrap();
        let expect = 0.5 * PI * (1.0 - statrs::function::erf::erfc(x / 2f64.sqrt()));
        assert!((r.value - expect).abs() < 1e-10, "{} vs {}", r.value, expect);
    }

    #[test]
    fn slowly_decaying_algebraic_integrand() {
        // int_0^inf cos(2u)/(1+u^2) du = (pi/2) e^{-2}
        let r = oscillatory_half_line(
            |u: f64| (2.0 * u).cos() / (1.0 + u * u),
            |u: f64| 1.0 / (1.0 + u * u),
            2.0,
            1.0,
            1e-8,
        )
        .unwrap();
        assert!((r.value - 0.5 * PI * (-2f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let r = integrate(|u: f64| u.powf(-0.5), 0.0, 1.0, 1e-10);
        assert!((r.value - 2.0).abs() < 1e-8, "{r:?}");
    }
}
