use outlier_lab::randomsums::{
    convergence_table, ks_distance, ks_distance_two_sample, random_sum_sample, reference_cdf, CountFamily,
    RandomSumConfig,
};
use outlier_lab::samplers::CountLaw;
use outlier_lab::DistributionSpec as D;

fn sums(q: f64, base: D, seed: u64) -> Vec<f64> {
    random_sum_sample(&RandomSumConfig {
        count_law: CountLaw::Geometric { q },
        base,
        replicates: 100_000,
        seed,
    })
    .unwrap()
}

#[test]
fn geometric_convergence_trend() {
    let rows = convergence_table(CountFamily::Geometric, &[0.2, 0.05, 0.01], &D::standard_normal(), 100_000, 5).unwrap();
    assert!(rows.windows(2).all(|w| w[1].ks < w[0].ks), "{rows:?}");
    assert!(rows[2].ks < 0.02);
}

#[test]
fn negative_binomial_limit() {
    let rows = convergence_table(
        CountFamily::NegativeBinomial { r: 2.0 },
        &[0.01],
        &D::standard_normal(),
        100_000,
        6,
    )
    .unwrap();
    assert!(rows[0].ks < 0.03, "{rows:?}");
}

#[test]
fn laplace_base_limit() {
    let cdf = reference_cdf(&CountFamily::Geometric.limit_law()).unwrap();
    assert!(ks_distance(&sums(0.01, D::laplace(1.0).unwrap(), 7), cdf).unwrap() < 0.02);
}

#[test]
fn skewed_base_gap_shrinks_like_sqrt_q() {
    let gap = |q| {
        ks_distance_two_sample(
            &sums(q, D::standard_normal(), 8),
            &sums(q, D::exponential(1.0).unwrap(), 9),
        )
        .unwrap()
    };
    let (wide, narrow) = (gap(0.04), gap(0.0025));
    // a factor 16 in q should shrink the skewness term about 4 times
    assert!(narrow < wide / 2.5, "{wide} {narrow}");
}

#[test]
fn universality_at_q_001() {
    let ks = ks_distance_two_sample(
        &sums(0.01, D::standard_normal(), 10),
        &sums(0.01, D::exponential(1.0).unwrap(), 11),
    )
    .unwrap();
    assert!(ks < 0.02, "two-sample KS {ks}");
}
