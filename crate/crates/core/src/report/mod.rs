//! Figure series, SVG scatter plots, text reports and the command line.

mod cli;
mod series;
mod svg;
mod text;

pub use cli::run_cli;
pub use series::{emit_series, SeriesFile, SeriesRow};
pub use svg::{emit_scatter_svg, jitter_curve, requirement_region, AxisBounds, Geometry};
pub use text::{budget_text, frontier_csv, frontier_text, gap_csv, gap_text, metrics_csv, metrics_text};

use std::fmt;
use std::str::FromStr;

use crate::dataset::SurveyRecord;
use crate::error::{Error, Result};
use crate::gap::RequirementSpec;
use crate::metrics::{MetricKey, Unit};
use crate::trends::{PowerLawFit, ReferenceTrend, TrendFit};

/// Significant digits of every human-readable number.
pub const DISPLAY_DIGITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log10,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "lin" => Ok(Scale::Linear),
            "log" | "log10" => Ok(Scale::Log10),
            other => Err(Error::domain("scale", format!("`{other}` is not linear/log10"))),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Linear => "linear",
            Scale::Log10 => "log10",
        })
    }
}

/// How plotted points are grouped into labelled series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Split {
    /// `enob<=t` versus `enob>t`; records without resolution form `enob?`.
    EnobClass(f64),
    Architecture,
}

impl Split {
    pub fn label(&self, r: &SurveyRecord) -> String {
        match self {
            Split::EnobClass(t) => match r.effective_enob() {
                Some(e) if e <= *t => format!("enob<={t}"),
                Some(_) => format!("enob>{t}"),
                None => "enob?".to_string(),
            },
            Split::Architecture => r
                .architecture
                .as_ref()
                .map_or_else(|| "unknown".to_string(), |a| a.to_string()),
        }
    }
}

impl FromStr for Split {
    type Err = Error;

    /// `enob:4` or `arch`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("arch") || s.eq_ignore_ascii_case("architecture") {
            return Ok(Split::Architecture);
        }
        if let Some(t) = s.strip_prefix("enob:") {
            let t: f64 = t
                .parse()
                .map_err(|_| Error::domain("split", format!("`{t}` is not a number")))?;
            return Ok(Split::EnobClass(t));
        }
        Err(Error::domain("split", format!("`{s}` is not enob:<bits> or arch")))
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Split::EnobClass(t) => write!(f, "enob:{t}"),
            Split::Architecture => f.write_str("arch"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Overlay {
    /// Aperture-jitter limit for an RMS jitter in seconds.
    JitterBound(f64),
    RequirementBox(RequirementSpec),
    /// A published tendency drawn through an anchor point (x, y).
    ReferenceTrend {
        trend: ReferenceTrend,
        anchor: (f64, f64),
    },
    FittedTrend(TrendFit),
    FittedPowerLaw(PowerLawFit),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub x_key: MetricKey,
    pub y_key: MetricKey,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub overlays: Vec<Overlay>,
    pub split: Option<Split>,
    pub osr: f64,
}

impl PlotSpec {
    /// Log-log plot without overlays at OSR 1.
    pub fn new(x_key: MetricKey, y_key: MetricKey) -> Self {
        PlotSpec {
            title: format!("{} vs {}", y_key.name(), x_key.name()),
            x_key,
            y_key,
            x_scale: default_scale(x_key),
            y_scale: default_scale(y_key),
            overlays: Vec::new(),
            split: None,
            osr: 1.0,
        }
    }
}

/// Log axes for quantities spanning decades; linear for years, bits and dB.
pub fn default_scale(key: MetricKey) -> Scale {
    match key.unit() {
        Unit::Year | Unit::Bits | Unit::Decibel => Scale::Linear,
        _ => Scale::Log10,
    }
}

/// Display unit label and the factor applied to SI values.
pub fn display_unit(key: MetricKey) -> (&'static str, f64) {
    match key {
        MetricKey::SpeedResolution | MetricKey::BandwidthResolution => ("Hz", 1.0),
        _ => match key.unit() {
            Unit::Year => ("", 1.0),
            Unit::Nanometre => ("nm", 1.0),
            Unit::Watt => ("mW", 1e3),
            Unit::Hertz => ("GHz", 1e-9),
            Unit::Decibel => ("dB", 1.0),
            Unit::Bits => ("bits", 1.0),
            Unit::SquareMillimetre => ("mm²", 1.0),
            Unit::JoulePerBit => ("pJ/bit", 1e12),
            Unit::HertzPerSquareMillimetre => ("GHz/mm²", 1e-9),
        },
    }
}

pub fn axis_label(key: MetricKey) -> String {
    match display_unit(key).0 {
        "" => key.name().to_string(),
        u => format!("{} ({u})", key.name()),
    }
}

/// Rounds to [`DISPLAY_DIGITS`] significant digits. Moderate magnitudes are
/// written positionally, others in scientific notation.
pub fn format_sig(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() {
            "NaN".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", DISPLAY_DIGITS - 1, v);
    let exp: i32 = sci[sci.find('e').expect("exponent") + 1..]
        .parse()
        .expect("integer exponent");
    if (-3..5).contains(&exp) {
        let decimals = (DISPLAY_DIGITS as i32 - 1 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        sci
    }
}

/// Calendar years, fractional ones included, to one decimal.
pub fn format_year(y: f64) -> String {
    format!("{y:.1}")
}

/// Full-precision scientific form for machine-readable files.
pub fn format_full(v: f64) -> String {
    format!("{v:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_formatting() {
        assert_eq!(format_sig(4.5), "4.500");
        assert_eq!(format_sig(0.35), "0.3500");
        assert_eq!(format_sig(1.9166666e-12), "1.917e-12");
        assert_eq!(format_sig(2025.6735), "2026");
        assert_eq!(format_sig(44.0364), "44.04");
        assert_eq!(format_sig(9.99961), "10.00");
        assert_eq!(format_sig(123456.0), "1.235e5");
        assert_eq!(format_sig(-0.0012346), "-0.001235");
        assert_eq!(format_sig(0.0), "0");
        assert_eq!(format_sig(f64::INFINITY), "inf");
        assert_eq!(format_year(2025.6735), "2025.7");
    }

    #[test]
    fn sig_formatting_round_trips_to_display_precision() {
        for &v in &[1.23456e-17, 3.25159, 2718.28, 6.02214e23, 0.000999951] {
            let back: f64 = format_sig(v).parse().unwrap();
            assert!(((back - v) / v).abs() < 5e-4, "{v} -> {back}");
        }
    }

    #[test]
    fn parse_options() {
        assert_eq!("log".parse::<Scale>().unwrap(), Scale::Log10);
        assert_eq!("enob:4".parse::<Split>().unwrap(), Split::EnobClass(4.0));
        assert_eq!("arch".parse::<Split>().unwrap(), Split::Architecture);
        assert!("enob:x".parse::<Split>().is_err());
        assert!("cubic".parse::<Scale>().is_err());
    }

    #[test]
    fn units() {
        assert_eq!(axis_label(MetricKey::SingleBitEnergy), "ebit_j (pJ/bit)");
        assert_eq!(display_unit(MetricKey::SamplingDensity), ("GHz/mm²", 1e-9));
        assert_eq!(axis_label(MetricKey::Year), "year");
    }
}
