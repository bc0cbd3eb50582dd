//! Outlier probabilities under Gaussian, stable, tempered stable,
//! put-tail-down and random-sum laws.
//!
//! The studentized statistic `p_n = P{|X_1 - mean_n| > k s_n}` is estimated
//! by Monte Carlo ([`outlier`]) and, for finite-variance laws, its limit is
//! computed by characteristic-function inversion ([`charfn`]).

pub mod charfn;
pub mod distribution;
pub mod experiments;
pub mod error;
pub mod outlier;
pub mod randomsums;
pub mod rng;
pub mod samplers;
pub mod tailtransform;

pub use distribution::DistributionSpec;
pub use error::{Error, Result};
pub use rng::RngStream;
