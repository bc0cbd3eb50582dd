//! End-to-end experiments: each returns an [`ExperimentResult`] holding the
//! plotted series and a list of pass/fail checks.

mod demos;
mod figures;
mod report;
mod svg;

pub use demos::{
    run_claims_table, run_ptd_demo, run_randomsum_demo, ClaimsConfig, PtdConfig, RandomSumDemoConfig,
};
pub use figures::{
    crossover_n, run_figure1, run_figure2, run_figure3, run_pn_figure, surface_axis, PnFigureConfig, SurfaceConfig,
};
pub use report::{format_g9, format_sig, Axes, Check, ExperimentResult, Provenance, Series, SeriesPoint, CSV_HEADER};
pub use svg::to_svg;

/// A published numeric value together with what it measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceValue {
    pub value: f64,
    pub description: &'static str,
}

/// Numeric values the experiments are checked against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceConstants {
    pub gaussian_k3: ReferenceValue,
    pub stable18_k3_n50000: ReferenceValue,
    pub laplace_k3: ReferenceValue,
    /// Lower and upper edge of the outlier fraction seen in real data.
    pub observed_outlier_range: [f64; 2],
    pub observed_description: &'static str,
}

pub const REFERENCE: ReferenceConstants = ReferenceConstants {
    gaussian_k3: ReferenceValue {
        value: 0.0026998,
        description: "P{|Z| > 3} for a standard normal Z",
    },
    stable18_k3_n50000: ReferenceValue {
        value: 0.00591093,
        description: "studentized 3-sigma outlier fraction, symmetric stable alpha=1.8, n=50000",
    },
    laplace_k3: ReferenceValue {
        value: 0.0143696,
        description: "P{|Y| > 3 sigma} for a Laplace Y, equal to exp(-3 sqrt 2)",
    },
    observed_outlier_range: [0.009, 0.013],
    observed_description: "3-sigma outlier fraction typically observed in measured data",
};

impl ExperimentResult {
    pub fn to_svg(&self) -> String {
        to_svg(self)
    }
}
