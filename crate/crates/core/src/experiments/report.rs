use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

/// One plotted point. Line series leave `x2` empty; surfaces set it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPoint {
    pub x: f64,
    pub x2: Option<f64>,
    pub y: f64,
    /// Monte Carlo standard error; 0 for analytic values.
    pub y_err: f64,
}

impl SeriesPoint {
    pub fn line(x: f64, y: f64, y_err: f64) -> Self {
        Self { x, x2: None, y, y_err }
    }

    pub fn surface(x: f64, x2: f64, y: f64, y_err: f64) -> Self {
        Self {
            x,
            x2: Some(x2),
            y,
            y_err,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<SeriesPoint>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<SeriesPoint>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }

    pub fn is_surface(&self) -> bool {
        self.points.first().is_some_and(|p| p.x2.is_some())
    }
}

/// A pass/fail row: `value` must lie in `[lower, upper]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub passed: bool,
    pub note: String,
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, lower: f64, upper: f64, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value,
            lower,
            upper,
            passed: value >= lower && value <= upper,
            note: note.into(),
        }
    }

    pub fn flag(name: impl Into<String>, ok: bool, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            lower: 1.0,
            upper: 1.0,
            passed: ok,
            note: note.into(),
        }
    }

    pub fn status(&self) -> &'static str {
        if self.passed {
            "pass"
        } else {
            "fail"
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub seed: u64,
    pub m: Option<usize>,
    pub runtime: Duration,
}

/// Axis titles for plots.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Axes {
    pub x: String,
    pub x2: String,
    pub y: String,
}

impl Axes {
    pub fn new(x: &str, y: &str) -> Self {
        Self {
            x: x.into(),
            x2: String::new(),
            y: y.into(),
        }
    }

    pub fn surface(x: &str, x2: &str, y: &str) -> Self {
        Self {
            x: x.into(),
            x2: x2.into(),
            y: y.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub experiment_id: String,
    pub parameters: BTreeMap<String, String>,
    pub axes: Axes,
    pub series: Vec<Series>,
    pub checks: Vec<Check>,
    pub provenance: Provenance,
}

pub const CSV_HEADER: &str = "experiment_id,series,x,x2,y,y_err";

impl ExperimentResult {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn series(&self, label: &str) -> Option<&Series> {
        self.series.iter().find(|s| s.label == label)
    }

    /// One row per point, LF line endings, 9 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        let id = csv_field(&self.experiment_id);
        for s in &self.series {
            let label = csv_field(&s.label);
            for p in &s.points {
                let x2 = p.x2.map(format_g9).unwrap_or_default();
                let _ = writeln!(
                    out,
                    "{id},{label},{},{x2},{},{}",
                    format_g9(p.x),
                    format_g9(p.y),
                    format_g9(p.y_err)
                );
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `%.9g`: 9 significant digits, trailing zeros removed, scientific
/// notation outside `1e-5 <= |v| < 1e9`.
pub fn format_g9(v: f64) -> String {
    format_sig(v, 9)
}

/// `%.{digits}g`.
pub fn format_sig(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.prec$e}", prec = digits - 1);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp >= -5 && exp < digits as i32 {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{v:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_fraction(mantissa))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g9_formatting() {
        assert_eq!(format_g9(0.0026998), "0.0026998");
        assert_eq!(format_g9(0.00591093), "0.00591093");
        assert_eq!(format_g9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_g9(25000.0), "25000");
        assert_eq!(format_g9(-2.5), "-2.5");
        assert_eq!(format_g9(1.23456789012e-7), "1.23456789e-7");
        assert_eq!(format_g9(6.02214076e23), "6.02214076e23");
        assert_eq!(format_g9(123456789.4), "123456789");
        assert_eq!(format_g9(f64::NAN), "NaN");
        assert_eq!(format_sig(0.00853666667, 3), "0.00854");
        assert_eq!(format_sig(25000.0, 3), "2.5e4");
    }

    #[test]
    fn csv_layout() {
        let r = ExperimentResult {
            experiment_id: "demo".into(),
            parameters: BTreeMap::new(),
            axes: Axes::default(),
            series: vec![
                Series::new("a,b", vec![SeriesPoint::line(1.0, 0.5, 0.0)]),
                Series::new("s", vec![SeriesPoint::surface(1.5, 0.2, 0.01, 0.001)]),
            ],
            checks: vec![],
            provenance: Provenance {
                seed: 1,
                m: None,
                runtime: Duration::ZERO,
            },
        };
        assert_eq!(
            r.to_csv(),
            "experiment_id,series,x,x2,y,y_err\ndemo,\"a,b\",1,,0.5,0\ndemo,s,1.5,0.2,0.01,0.001\n"
        );
    }

    proptest::proptest! {
        #[test]
        fn g9_round_trips(v in proptest::num::f64::NORMAL) {
            let back: f64 = format_g9(v).parse().unwrap();
            proptest::prop_assert!(((back - v) / v).abs() <= 5.1e-9);
        }
    }

    #[test]
    fn checks() {
        assert!(Check::within("a", 1.0, 0.0, 1.0, "").passed);
        assert!(!Check::within("a", f64::NAN, 0.0, 1.0, "").passed);
        assert_eq!(Check::flag("b", false, "").status(), "fail");
    }
}
