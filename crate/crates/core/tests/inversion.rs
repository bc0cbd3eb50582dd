use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use outlier_lab::charfn::{cf_eval, density, limit_outlier_prob, moments, tail_prob};
use outlier_lab::DistributionSpec as D;

/// `1/2 - (1/pi) int_0^inf sin(u x) psi(u) / u du` by the plain trapezoid
/// rule; the integrand is even and analytic, so this converges fast.
fn trapezoid_tail(psi: impl Fn(f64) -> f64, x: f64, h: f64, upper: f64) -> f64 {
    let steps = (upper / h) as usize;
    let mut sum = 0.5 * x; // limit of sin(ux)/u at 0, psi(0) = 1
    for i in 1..=steps {
        let u = i as f64 * h;
        sum += (u * x).sin() / u * psi(u);
    }
    0.5 - sum * h / PI
}

/// Symmetric tempered stable CF built directly from complex powers.
fn tempered_cf(alpha: f64, lambda: f64, a: f64, u: f64) -> f64 {
    let plus = Complex64::new(lambda, u).powf(alpha);
    let minus = Complex64::new(lambda, -u).powf(alpha);
    (a * (plus + minus - 2.0 * lambda.powf(alpha))).exp().re
}

#[test]
fn gaussian_and_laplace_tails_match_closed_forms() {
    let laws = [D::standard_normal(), D::laplace(FRAC_1_SQRT_2).unwrap(), D::laplace(2.0).unwrap()];
    for spec in &laws {
        for x in [0.0, 1.0, 2.0, 3.0, 5.0] {
            let exact = spec.closed_form_survival(x).unwrap();
            let got = tail_prob(spec, x).unwrap();
            assert!((got - exact).abs() < 1e-8, "{spec} at {x}: {got} vs {exact}");
        }
    }
}

#[test]
fn tempered_cf_at_one() {
    let expected = (2.0 * 2f64.powf(0.75) * (3.0 * PI / 8.0).cos() - 2.0).exp();
    assert!((tempered_cf(1.5, 1.0, 1.0, 1.0) - expected).abs() < 1e-14);
    let spec = D::tempered_stable(1.5, 1.0, 1.0).unwrap();
    let got = cf_eval(&spec, 1.0).unwrap();
    assert!((got.re - expected).abs() < 1e-12 && got.im.abs() < 1e-15);
    assert!((moments(&spec).variance.unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn tempered_tail_matches_trapezoid_oracle() {
    for (alpha, lambda, upper) in [(1.5, 1.0, 40.0), (1.12, 0.295, 400.0), (1.88, 3.905, 40.0)] {
        let spec = D::tempered_stable(alpha, lambda, 1.0).unwrap();
        let sigma = moments(&spec).std_dev().unwrap();
        let x = 3.0 * sigma;
        let oracle = trapezoid_tail(|u| tempered_cf(alpha, lambda, 1.0, u), x, 0.002, upper);
        let got = tail_prob(&spec, x).unwrap();
        assert!((got - oracle).abs() < 1e-8, "({alpha}, {lambda}): {got} vs {oracle}");
    }
}

#[test]
fn heavy_tempered_corner_exceeds_observed_range_edge() {
    let spec = D::tempered_stable(1.1, 0.2, 1.0).unwrap();
    let p = limit_outlier_prob(&spec, 3.0).unwrap();
    // independent high-precision quadrature gives 0.0191823101
    assert!((p - 0.019_182_310_1).abs() < 1e-8, "{p}");
}

#[test]
fn outlier_limit_is_scale_and_shift_invariant() {
    let base = limit_outlier_prob(&D::standard_normal(), 2.5).unwrap();
    for (mu, sigma) in [(3.0, 0.5), (-10.0, 7.0)] {
        let p = limit_outlier_prob(&D::gaussian(mu, sigma).unwrap(), 2.5).unwrap();
        assert!((p - base).abs() < 1e-9);
    }
    let l1 = limit_outlier_prob(&D::laplace(0.3).unwrap(), 3.0).unwrap();
    let l2 = limit_outlier_prob(&D::laplace(5.0).unwrap(), 3.0).unwrap();
    assert!((l1 - l2).abs() < 1e-9);
}

#[test]
fn density_integrates_to_tail() {
    let spec = D::tempered_stable(1.5, 1.0, 1.0).unwrap();
    let (a, b) = (1.0, 2.0);
    let steps = 400;
    let h = (b - a) / steps as f64;
    let mut simpson = density(&spec, a).unwrap() + density(&spec, b).unwrap();
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        simpson += w * density(&spec, a + i as f64 * h).unwrap();
    }
    simpson *= h / 3.0;
    let diff = tail_prob(&spec, a).unwrap() - tail_prob(&spec, b).unwrap();
    assert!((simpson - diff).abs() < 1e-8);
}
