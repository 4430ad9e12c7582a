use std::fmt::Write as _;

use super::{axis_label, display_unit, format_full, format_sig, Overlay, PlotSpec, Scale, SeriesFile};
use crate::error::{Error, Result};
use crate::gap::RequirementSpec;
use crate::metrics::{jitter_enob_limit, jitter_snr_limit, sndr_from_enob, MetricKey};
use crate::trends::{extrapolate, ReferenceLaw};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];
const CURVE_SAMPLES: usize = 64;

/// Canvas size and margins in user units. Purely presentational.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub width: f64,
    pub height: f64,
    pub margin_left: f64,
    pub margin_right: f64,
    pub margin_top: f64,
    pub margin_bottom: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Geometry {
            width: 720.0,
            height: 520.0,
            margin_left: 80.0,
            margin_right: 30.0,
            margin_top: 40.0,
            margin_bottom: 60.0,
        }
    }
}

impl Geometry {
    fn validate(&self) -> Result<()> {
        let ok = self.width > self.margin_left + self.margin_right
            && self.height > self.margin_top + self.margin_bottom
            && [self.margin_left, self.margin_right, self.margin_top, self.margin_bottom]
                .iter()
                .all(|m| *m >= 0.0 && m.is_finite());
        if ok {
            Ok(())
        } else {
            Err(Error::domain("geometry", "margins leave no plot area"))
        }
    }
}

/// Optional lower and upper limits on one axis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AxisBounds {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl AxisBounds {
    fn is_empty(&self) -> bool {
        self.lower.is_none() && self.upper.is_none()
    }
}

fn spec_bounds(spec: &RequirementSpec, key: MetricKey) -> AxisBounds {
    let lower = |v: f64| AxisBounds {
        lower: (v > 0.0 && v.is_finite()).then_some(v),
        upper: None,
    };
    let upper = |v: f64| AxisBounds {
        lower: None,
        upper: v.is_finite().then_some(v),
    };
    match key {
        MetricKey::Bandwidth => lower(spec.min_bandwidth),
        MetricKey::NyquistRate | MetricKey::SampleRate => lower(spec.min_nyquist),
        MetricKey::Enob => lower(spec.min_enob),
        MetricKey::Sndr => lower(sndr_from_enob(spec.min_enob).unwrap_or(0.0)),
        MetricKey::Area => upper(spec.max_area),
        MetricKey::SingleBitEnergy => upper(spec.max_energy_per_bit),
        MetricKey::SamplingDensity => lower(spec.min_nyquist / spec.max_area),
        _ => AxisBounds::default(),
    }
}

/// The region of an (x, y) plot that satisfies `spec`, or `None` when the
/// spec constrains neither axis.
pub fn requirement_region(
    spec: &RequirementSpec,
    x_key: MetricKey,
    y_key: MetricKey,
) -> Option<(AxisBounds, AxisBounds)> {
    let x = spec_bounds(spec, x_key);
    let y = spec_bounds(spec, y_key);
    (!(x.is_empty() && y.is_empty())).then_some((x, y))
}

/// Points of the aperture-jitter limit at the given x values. The input
/// frequency is the bandwidth itself, or half the rate for sample-rate and
/// Nyquist-rate axes. Supports ENOB and SNDR on y.
pub fn jitter_curve(jitter_rms: f64, x_key: MetricKey, y_key: MetricKey, xs: &[f64]) -> Result<Vec<(f64, f64)>> {
    let to_freq = match x_key {
        MetricKey::Bandwidth => 1.0,
        MetricKey::SampleRate | MetricKey::NyquistRate => 0.5,
        other => {
            return Err(Error::domain(
                "jitter overlay",
                format!("x axis `{other}` is not a frequency"),
            ))
        }
    };
    let limit: fn(f64, f64) -> Result<f64> = match y_key {
        MetricKey::Enob => jitter_enob_limit,
        MetricKey::Sndr => jitter_snr_limit,
        other => {
            return Err(Error::domain(
                "jitter overlay",
                format!("y axis `{other}` is not a resolution"),
            ))
        }
    };
    xs.iter().map(|&x| Ok((x, limit(x * to_freq, jitter_rms)?))).collect()
}

struct Axis {
    scale: Scale,
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn fit(scale: Scale, values: &[f64], px_lo: f64, px_hi: f64) -> Self {
        let t: Vec<f64> = values.iter().map(|&v| transform(scale, v)).collect();
        let min = t.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = match scale {
            Scale::Log10 => {
                let (lo, hi) = (min.floor(), max.ceil());
                if lo == hi {
                    (lo, lo + 1.0)
                } else {
                    (lo, hi)
                }
            }
            Scale::Linear => {
                let (min, max) = if min == max {
                    let pad = if min == 0.0 { 1.0 } else { min.abs() * 0.1 };
                    (min - pad, max + pad)
                } else {
                    (min, max)
                };
                let step = nice_step(max - min);
                ((min / step).floor() * step, (max / step).ceil() * step)
            }
        };
        Axis {
            scale,
            lo,
            hi,
            px_lo,
            px_hi,
        }
    }

    /// Maps a data value to a pixel coordinate.
    fn px(&self, v: f64) -> f64 {
        let t = transform(self.scale, v);
        self.px_lo + (t - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }

    fn ticks(&self) -> Vec<f64> {
        match self.scale {
            Scale::Log10 => {
                let decades = (self.hi - self.lo) as i64;
                let every = (decades + 9) / 10;
                (0..=decades)
                    .filter(|d| d % every.max(1) == 0)
                    .map(|d| 10f64.powf(self.lo + d as f64))
                    .collect()
            }
            Scale::Linear => {
                let step = nice_step(self.hi - self.lo);
                let n = ((self.hi - self.lo) / step).round() as i64;
                (0..=n).map(|i| self.lo + i as f64 * step).collect()
            }
        }
    }

    /// Sample positions spread evenly in axis space.
    fn samples(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let t = self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Log10 => 10f64.powf(t),
                    Scale::Linear => t,
                }
            })
            .collect()
    }

    fn domain(&self) -> (f64, f64) {
        match self.scale {
            Scale::Log10 => (10f64.powf(self.lo), 10f64.powf(self.hi)),
            Scale::Linear => (self.lo, self.hi),
        }
    }

    fn accepts(&self, v: f64) -> bool {
        v.is_finite() && (self.scale == Scale::Linear || v > 0.0)
    }
}

fn transform(scale: Scale, v: f64) -> f64 {
    match scale {
        Scale::Linear => v,
        Scale::Log10 => v.log10(),
    }
}

/// Tick spacing of 1, 2 or 5 times a power of ten giving about five ticks.
fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f <= 1.0 {
        1.0
    } else if f <= 2.0 {
        2.0
    } else if f <= 5.0 {
        5.0
    } else {
        10.0
    };
    m * mag
}

/// Compact tick label: display rounding with trailing zeros dropped.
fn tick_label(v: f64) -> String {
    let s = format_sig(v);
    let (mant, exp) = match s.find('e') {
        Some(p) => (&s[..p], &s[p..]),
        None => (s.as_str(), ""),
    };
    let mant = if mant.contains('.') {
        mant.trim_end_matches('0').trim_end_matches('.')
    } else {
        mant
    };
    format!("{mant}{exp}")
}

fn esc(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn polyline(out: &mut String, class: &str, style: &str, xa: &Axis, ya: &Axis, pts: &[(f64, f64)]) {
    let coords: Vec<String> = pts
        .iter()
        .filter(|(x, y)| xa.accepts(*x) && ya.accepts(*y))
        .map(|&(x, y)| format!("{:.2},{:.2}", xa.px(x), ya.px(y)))
        .collect();
    if coords.len() >= 2 {
        let _ = writeln!(
            out,
            r#"  <polyline class="{class}" fill="none" {style} points="{}"/>"#,
            coords.join(" ")
        );
    }
}

/// Renders a standalone SVG 1.1 scatter plot of `series` with the overlays
/// of `spec`.
pub fn emit_scatter_svg(series: &SeriesFile, spec: &PlotSpec, geometry: &Geometry) -> Result<String> {
    geometry.validate()?;
    if series.rows.is_empty() {
        return Err(Error::EmptyInput("nothing to plot".into()));
    }
    let mut offending: Vec<String> = series
        .rows
        .iter()
        .filter(|r| (spec.x_scale == Scale::Log10 && !(r.x > 0.0)) || (spec.y_scale == Scale::Log10 && !(r.y > 0.0)))
        .map(|r| r.id.clone())
        .collect();
    if !offending.is_empty() {
        offending.sort();
        return Err(Error::NonPositiveOnLogAxis(offending));
    }

    let mut xs: Vec<f64> = series.rows.iter().map(|r| r.x).collect();
    let mut ys: Vec<f64> = series.rows.iter().map(|r| r.y).collect();
    let region = spec.overlays.iter().find_map(|o| match o {
        Overlay::RequirementBox(s) => requirement_region(s, spec.x_key, spec.y_key),
        _ => None,
    });
    if let Some((bx, by)) = region {
        xs.extend(bx.lower.iter().chain(bx.upper.iter()));
        ys.extend(by.lower.iter().chain(by.upper.iter()));
    }
    let g = geometry;
    let (left, right) = (g.margin_left, g.width - g.margin_right);
    let (top, bottom) = (g.margin_top, g.height - g.margin_bottom);
    let xa = Axis::fit(spec.x_scale, &xs, left, right);
    let ya = Axis::fit(spec.y_scale, &ys, bottom, top);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = g.width,
        h = g.height
    );
    let _ = writeln!(out, "  <title>{}</title>", esc(&spec.title));
    let (x_dlo, x_dhi) = xa.domain();
    let (y_dlo, y_dhi) = ya.domain();
    let _ = writeln!(
        out,
        "  <desc>user units, origin top-left, y downward; plot area x {left}..{right}, y {top}..{bottom}; \
         x {} {} from {} to {}; y {} {} from {} to {} (SI units)</desc>",
        spec.x_key.name(),
        spec.x_scale,
        format_full(x_dlo),
        format_full(x_dhi),
        spec.y_key.name(),
        spec.y_scale,
        format_full(y_dlo),
        format_full(y_dhi)
    );
    let _ = writeln!(
        out,
        r#"  <defs><clipPath id="plot-area"><rect x="{left}" y="{top}" width="{}" height="{}"/></clipPath></defs>"#,
        right - left,
        bottom - top
    );
    let _ = writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#);

    // axes
    let _ = writeln!(out, r#"  <g class="axes" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(
        out,
        r#"  <rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    let (_, xf) = display_unit(spec.x_key);
    for t in xa.ticks() {
        let p = xa.px(t);
        let _ = writeln!(
            out,
            r##"  <line x1="{p:.2}" y1="{bottom}" x2="{p:.2}" y2="{top}" stroke="#dddddd"/><text x="{p:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            bottom + 16.0,
            esc(&tick_label(t * xf))
        );
    }
    let (_, yf) = display_unit(spec.y_key);
    for t in ya.ticks() {
        let p = ya.px(t);
        let _ = writeln!(
            out,
            r##"  <line x1="{left}" y1="{p:.2}" x2="{right}" y2="{p:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            left - 6.0,
            p + 4.0,
            esc(&tick_label(t * yf))
        );
    }
    let _ = writeln!(
        out,
        r#"  <text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
        (left + right) / 2.0,
        g.height - 16.0,
        esc(&axis_label(spec.x_key))
    );
    let _ = writeln!(
        out,
        r#"  <text x="18" y="{:.2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        esc(&axis_label(spec.y_key))
    );
    let _ = writeln!(
        out,
        r#"  <text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="14">{}</text>"#,
        (left + right) / 2.0,
        top - 14.0,
        esc(&spec.title)
    );
    let _ = writeln!(out, "  </g>");

    // overlays
    let mut legend: Vec<(String, String)> = Vec::new();
    let _ = writeln!(out, r#"  <g class="overlays" clip-path="url(#plot-area)">"#);
    for o in &spec.overlays {
        match o {
            Overlay::JitterBound(sigma) => {
                let pts = jitter_curve(*sigma, spec.x_key, spec.y_key, &xa.samples(CURVE_SAMPLES))?;
                polyline(&mut out, "jitter", r#"stroke="black" stroke-width="1""#, &xa, &ya, &pts);
                legend.push(("black".into(), format!("jitter {} ps", format_sig(sigma * 1e12))));
            }
            Overlay::RequirementBox(s) => {
                let Some((bx, by)) = requirement_region(s, spec.x_key, spec.y_key) else {
                    continue;
                };
                let x1 = bx.lower.map_or(left, |v| xa.px(v));
                let x2 = bx.upper.map_or(right, |v| xa.px(v));
                let y1 = by.upper.map_or(top, |v| ya.px(v));
                let y2 = by.lower.map_or(bottom, |v| ya.px(v));
                let _ = writeln!(
                    out,
                    r##"  <rect class="requirement" data-spec="{}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444444" stroke-dasharray="2,3"/>"##,
                    esc(&s.name),
                    x1,
                    y1,
                    (x2 - x1).max(0.0),
                    (y2 - y1).max(0.0)
                );
                legend.push(("#444444".into(), format!("{} targets", s.name)));
            }
            Overlay::ReferenceTrend { trend, anchor } => {
                let (ax, ay) = *anchor;
                let pts: Vec<(f64, f64)> = match (trend.law, spec.x_key) {
                    (ReferenceLaw::Period(t), MetricKey::Year) => xa
                        .samples(CURVE_SAMPLES)
                        .into_iter()
                        .map(|x| (x, ay * ((x - ax) / t).exp2()))
                        .collect(),
                    (ReferenceLaw::Exponent(k), MetricKey::TechNode) => xa
                        .samples(CURVE_SAMPLES)
                        .into_iter()
                        .map(|x| (x, ay * (x / ax).powf(k)))
                        .collect(),
                    _ => {
                        return Err(Error::domain(
                            "reference overlay",
                            format!("`{}` does not apply to a `{}` axis", trend.name, spec.x_key),
                        ))
                    }
                };
                polyline(
                    &mut out,
                    "reference",
                    r##"stroke="#999999" stroke-dasharray="8,4""##,
                    &xa,
                    &ya,
                    &pts,
                );
                legend.push(("#999999".into(), trend.name.to_string()));
            }
            Overlay::FittedTrend(fit) => {
                if spec.x_key != MetricKey::Year {
                    return Err(Error::domain("trend overlay", "needs a year x axis"));
                }
                let pts: Vec<(f64, f64)> = xa
                    .samples(CURVE_SAMPLES)
                    .into_iter()
                    .map(|x| (x, extrapolate(fit, x)))
                    .collect();
                polyline(
                    &mut out,
                    "fit",
                    r##"stroke="#d62728" stroke-dasharray="5,3""##,
                    &xa,
                    &ya,
                    &pts,
                );
                legend.push(("#d62728".into(), format!("fit: {fit}")));
            }
            Overlay::FittedPowerLaw(fit) => {
                if spec.x_key != MetricKey::TechNode {
                    return Err(Error::domain("power-law overlay", "needs a tech_nm x axis"));
                }
                let pts: Vec<(f64, f64)> = xa
                    .samples(CURVE_SAMPLES)
                    .into_iter()
                    .filter(|x| *x > 0.0)
                    .map(|x| (x, fit.predict(x)))
                    .collect();
                polyline(
                    &mut out,
                    "fit",
                    r##"stroke="#d62728" stroke-dasharray="5,3""##,
                    &xa,
                    &ya,
                    &pts,
                );
                legend.push(("#d62728".into(), format!("fit: {fit}")));
            }
        }
    }
    let _ = writeln!(out, "  </g>");

    // points
    let labels = series.labels();
    let _ = writeln!(out, r#"  <g class="points" clip-path="url(#plot-area)">"#);
    for r in &series.rows {
        let colour = PALETTE[labels.iter().position(|l| *l == r.label).unwrap_or(0) % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"  <circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{colour}" fill-opacity="0.8" data-id="{}" data-x="{}" data-y="{}"><title>{}</title></circle>"#,
            xa.px(r.x),
            ya.px(r.y),
            esc(&r.id),
            format_full(r.x),
            format_full(r.y),
            esc(&r.id)
        );
    }
    let _ = writeln!(out, "  </g>");

    // legend
    let mut entries: Vec<(String, String)> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (PALETTE[i % PALETTE.len()].to_string(), l.to_string()))
        .collect();
    entries.extend(legend);
    let _ = writeln!(out, r#"  <g class="legend" font-family="sans-serif" font-size="11">"#);
    for (i, (colour, text)) in entries.iter().enumerate() {
        let y = top + 14.0 + 14.0 * i as f64;
        let _ = writeln!(
            out,
            r#"  <rect x="{:.2}" y="{:.2}" width="8" height="8" fill="{colour}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            right - 190.0,
            y - 8.0,
            right - 178.0,
            y,
            esc(text)
        );
    }
    let _ = writeln!(out, "  </g>");
    let _ = writeln!(out, "</svg>");
    Ok(out)
}
