//! Exponential-in-time and power-law-in-feature-size trend fits.
//!
//! Both fits are ordinary least squares on log-transformed values: `log2`
//! against year for doubling laws, `log10` against `log10(λ)` for
//! technology scaling.

use std::collections::BTreeMap;
use std::fmt;

use crate::dataset::{Dataset, Predicate};
use crate::error::{Error, Result};
use crate::frontier::{pareto_frontier, yearly_envelope, Objective};
use crate::metrics::{derive_all, Direction, MetricKey};

pub const MIN_FIT_POINTS: usize = 3;

/// `log2(value) = intercept + slope·(year − reference_year)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendFit {
    /// Change of log2(value) per year.
    pub slope: f64,
    /// log2(value) on the fitted line at `reference_year`.
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    pub reference_year: i32,
}

impl TrendFit {
    /// Builds an exact exponential through an anchor point. `period` is the
    /// doubling time in years, negative for a halving law.
    pub fn from_period(period: f64, anchor_year: i32, anchor_value: f64) -> Result<Self> {
        if !(period.is_finite() && period != 0.0) {
            return Err(Error::domain("period", "must be finite and non-zero"));
        }
        if !(anchor_value > 0.0) {
            return Err(Error::domain("anchor value", "must be positive"));
        }
        Ok(TrendFit {
            slope: 1.0 / period,
            intercept: anchor_value.log2(),
            r_squared: 1.0,
            n_points: 0,
            reference_year: anchor_year,
        })
    }

    /// Signed time for the value to double: negative for a halving law,
    /// infinite for a flat fit.
    pub fn period(&self) -> f64 {
        1.0 / self.slope
    }

    pub fn doubling_time(&self) -> Option<f64> {
        (self.slope > 0.0).then(|| 1.0 / self.slope)
    }

    pub fn halving_time(&self) -> Option<f64> {
        (self.slope < 0.0).then(|| -1.0 / self.slope)
    }

    pub fn anchor_value(&self) -> f64 {
        self.intercept.exp2()
    }
}

impl fmt::Display for TrendFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.doubling_time(), self.halving_time()) {
            (Some(t), _) => write!(f, "doubles every {t:.4} years")?,
            (_, Some(t)) => write!(f, "halves every {t:.4} years")?,
            _ => write!(f, "flat")?,
        }
        write!(f, " (r² = {:.4}, n = {})", self.r_squared, self.n_points)
    }
}

/// `value = 10^log_coefficient · λ^exponent`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub log_coefficient: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

impl PowerLawFit {
    pub fn predict(&self, feature_size: f64) -> f64 {
        10f64.powf(self.log_coefficient + self.exponent * feature_size.log10())
    }
}

impl fmt::Display for PowerLawFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "scales as λ^{:.4} (r² = {:.4}, n = {})",
            self.exponent, self.r_squared, self.n_points
        )
    }
}

struct Ols {
    slope: f64,
    mean_x: f64,
    mean_y: f64,
    r_squared: f64,
}

/// Centred least squares. Requires at least two distinct x values.
fn ols(xs: &[f64], ys: &[f64]) -> Result<Ols> {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::domain("abscissae", "all points share one x value"));
    }
    let slope = sxy / sxx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (mean_y + slope * (x - mean_x));
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(Ols {
        slope,
        mean_x,
        mean_y,
        r_squared,
    })
}

fn check_points(points: &[(f64, f64)], what: &str, positive_x: bool) -> Result<()> {
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            context: what.to_string(),
            needed: MIN_FIT_POINTS,
            have: points.len(),
        });
    }
    for &(x, y) in points {
        if !x.is_finite() || (positive_x && x <= 0.0) {
            return Err(Error::domain("abscissa", format!("{x} is not usable in {what}")));
        }
        if !(y > 0.0 && y.is_finite()) {
            return Err(Error::domain("value", format!("{y} is not positive in {what}")));
        }
    }
    Ok(())
}

/// Fits `log2(value)` linearly against year.
pub fn fit_doubling(points: &[(f64, f64)]) -> Result<TrendFit> {
    check_points(points, "doubling fit", false)?;
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log2()).collect();
    let fit = ols(&xs, &ys)?;
    let reference_year = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).floor() as i32;
    Ok(TrendFit {
        slope: fit.slope,
        intercept: fit.mean_y + fit.slope * (f64::from(reference_year) - fit.mean_x),
        r_squared: fit.r_squared,
        n_points: points.len(),
        reference_year,
    })
}

/// Fits `log10(value)` linearly against `log10(feature_size)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    check_points(points, "power-law fit", true)?;
    let xs: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let fit = ols(&xs, &ys)?;
    Ok(PowerLawFit {
        exponent: fit.slope,
        log_coefficient: fit.mean_y - fit.slope * fit.mean_x,
        r_squared: fit.r_squared,
        n_points: points.len(),
    })
}

/// Value on the fitted line at `year` (fractional years allowed).
pub fn extrapolate(fit: &TrendFit, year: f64) -> f64 {
    (fit.intercept + fit.slope * (year - f64::from(fit.reference_year))).exp2()
}

/// Which side of a threshold counts as meeting it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Goal {
    AtMost(f64),
    AtLeast(f64),
}

impl Goal {
    pub fn threshold(self) -> f64 {
        match self {
            Goal::AtMost(t) | Goal::AtLeast(t) => t,
        }
    }

    pub fn is_met_by(self, value: f64) -> bool {
        match self {
            Goal::AtMost(t) => value <= t,
            Goal::AtLeast(t) => value >= t,
        }
    }

    /// The goal natural to a metric's preferred direction.
    pub fn for_direction(direction: Direction, threshold: f64) -> Self {
        match direction {
            Direction::Minimize => Goal::AtMost(threshold),
            Direction::Maximize => Goal::AtLeast(threshold),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Projection {
    Year(f64),
    /// The trend moves away from the threshold.
    Unreachable,
}

impl Projection {
    pub fn year(self) -> Option<f64> {
        match self {
            Projection::Year(y) => Some(y),
            Projection::Unreachable => None,
        }
    }
}

/// Year at which a trend with `fit`'s slope, started from `anchor`, meets
/// `goal`. An anchor that already meets the goal projects to its own year.
pub fn threshold_year(fit: &TrendFit, anchor: (f64, f64), goal: Goal) -> Result<Projection> {
    let (year, value) = anchor;
    if !(value > 0.0 && value.is_finite()) {
        return Err(Error::domain("anchor value", "must be positive"));
    }
    let t = goal.threshold();
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain("threshold", "must be positive"));
    }
    if goal.is_met_by(value) {
        return Ok(Projection::Year(year));
    }
    let toward = match goal {
        Goal::AtMost(_) => fit.slope < 0.0,
        Goal::AtLeast(_) => fit.slope > 0.0,
    };
    if !toward {
        return Ok(Projection::Unreachable);
    }
    Ok(Projection::Year(year + (t / value).log2() / fit.slope))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Year,
    TechNode,
}

impl std::str::FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "year" | "time" => Ok(Axis::Year),
            "tech" | "tech_nm" | "tech_node" | "lambda" => Ok(Axis::TechNode),
            other => Err(Error::domain("axis", format!("`{other}` is not year/tech"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    All,
    /// Pareto-optimal records in (axis, metric). On the year axis earlier is
    /// better, so the frontier is the sequence of record-setting designs; on
    /// the technology axis a larger node is better, giving the lowest-energy
    /// (or smallest) design achievable down to each node.
    Frontier,
    /// Best record per calendar year, or per node on the technology axis.
    YearlyBest,
}

impl std::str::FromStr for Selector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "all" => Ok(Selector::All),
            "frontier" | "pareto" => Ok(Selector::Frontier),
            "yearly_best" | "best" => Ok(Selector::YearlyBest),
            other => Err(Error::domain(
                "selector",
                format!("`{other}` is not all/frontier/yearly_best"),
            )),
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Selector::All => "all",
            Selector::Frontier => "frontier",
            Selector::YearlyBest => "yearly_best",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Fit {
    Doubling(TrendFit),
    PowerLaw(PowerLawFit),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetFit {
    pub fit: Fit,
    /// (axis value, metric value, record id) of every fitted point.
    pub points: Vec<(f64, f64, String)>,
}

fn axis_key(axis: Axis) -> MetricKey {
    match axis {
        Axis::Year => MetricKey::Year,
        Axis::TechNode => MetricKey::TechNode,
    }
}

/// Selects points with `selector`, then fits a doubling law (year axis) or a
/// power law (technology axis).
pub fn fit_on_subset(dataset: &Dataset, key: MetricKey, axis: Axis, selector: Selector, osr: f64) -> Result<SubsetFit> {
    let points = select_points(dataset, key, axis, selector, osr)?;
    if points.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientData {
            context: format!("selector `{selector}`"),
            needed: MIN_FIT_POINTS,
            have: points.len(),
        });
    }
    let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.0, p.1)).collect();
    let fit = match axis {
        Axis::Year => Fit::Doubling(fit_doubling(&xy)?),
        Axis::TechNode => Fit::PowerLaw(fit_power_law(&xy)?),
    };
    Ok(SubsetFit { fit, points })
}

pub fn select_points(
    dataset: &Dataset,
    key: MetricKey,
    axis: Axis,
    selector: Selector,
    osr: f64,
) -> Result<Vec<(f64, f64, String)>> {
    let ak = axis_key(axis);
    let direction = key.preferred_direction();
    let mut all = Vec::new();
    for r in dataset.records() {
        let m = derive_all(r, osr)?;
        if let (Some(x), Some(y)) = (ak.value(r, &m), key.value(r, &m)) {
            all.push((x, y, r.id.clone()));
        }
    }
    let out = match (selector, axis) {
        (Selector::All, _) => all,
        (Selector::Frontier, _) => {
            let axis_dir = match axis {
                Axis::Year => Direction::Minimize,
                Axis::TechNode => Direction::Maximize,
            };
            let f = pareto_frontier(
                dataset,
                &[Objective::new(ak, axis_dir), Objective::new(key, direction)],
                osr,
            )?;
            all.into_iter().filter(|p| f.members.contains(&p.2)).collect()
        }
        (Selector::YearlyBest, Axis::Year) => yearly_envelope(dataset, key, direction, &Predicate::default(), osr)?
            .points
            .into_iter()
            .map(|p| (f64::from(p.year), p.value, p.record_id))
            .collect(),
        (Selector::YearlyBest, Axis::TechNode) => {
            let mut best: BTreeMap<u64, (f64, f64, String)> = BTreeMap::new();
            for p in all {
                best.entry(p.0.to_bits())
                    .and_modify(|cur| {
                        if direction.better(p.1, cur.1) || (p.1 == cur.1 && p.2 < cur.2) {
                            *cur = p.clone();
                        }
                    })
                    .or_insert(p);
            }
            let mut v: Vec<_> = best.into_values().collect();
            v.sort_by(|a, b| a.0.total_cmp(&b.0));
            v
        }
    };
    Ok(out)
}

/// A published scaling tendency, kept for overlays and comparison; never
/// substituted for a fitted value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceTrend {
    pub name: &'static str,
    pub metric: MetricKey,
    pub law: ReferenceLaw,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceLaw {
    /// Signed doubling period in years (negative halves).
    Period(f64),
    /// Exponent k in value ∼ λ^k.
    Exponent(f64),
}

pub const REFERENCE_TRENDS: [ReferenceTrend; 7] = [
    ReferenceTrend {
        name: "speed-resolution-4yr",
        metric: MetricKey::SpeedResolution,
        law: ReferenceLaw::Period(4.0),
    },
    ReferenceTrend {
        name: "ebit-1.8yr",
        metric: MetricKey::SingleBitEnergy,
        law: ReferenceLaw::Period(-1.8),
    },
    ReferenceTrend {
        name: "density-1.8yr",
        metric: MetricKey::SamplingDensity,
        law: ReferenceLaw::Period(1.8),
    },
    ReferenceTrend {
        name: "energy-lambda-1.7",
        metric: MetricKey::SingleBitEnergy,
        law: ReferenceLaw::Exponent(1.7),
    },
    ReferenceTrend {
        name: "sar-energy-lambda-2.3",
        metric: MetricKey::SingleBitEnergy,
        law: ReferenceLaw::Exponent(2.3),
    },
    ReferenceTrend {
        name: "area-lambda-2",
        metric: MetricKey::Area,
        law: ReferenceLaw::Exponent(2.0),
    },
    ReferenceTrend {
        name: "area-lambda-1.6",
        metric: MetricKey::Area,
        law: ReferenceLaw::Exponent(1.6),
    },
];

pub fn reference_trend(name: &str) -> Result<ReferenceTrend> {
    REFERENCE_TRENDS
        .iter()
        .find(|t| t.name == name)
        .copied()
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::SurveyRecord;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_doubling() {
        let f = fit_doubling(&[(2000.0, 1.0), (2004.0, 2.0), (2008.0, 4.0)]).unwrap();
        assert_eq!(f.doubling_time(), Some(4.0));
        assert_eq!(f.r_squared, 1.0);
        assert_eq!(f.n_points, 3);
        assert_eq!(f.reference_year, 2008);
        assert_eq!(f.anchor_value(), 4.0);
    }

    #[test]
    fn exact_halving() {
        let f = fit_doubling(&[(2010.0, 8.0), (2011.8, 4.0), (2013.6, 2.0)]).unwrap();
        assert_relative_eq!(f.halving_time().unwrap(), 1.8, max_relative = 1e-12);
        assert_eq!(f.doubling_time(), None);
        assert_relative_eq!(f.period(), -1.8, max_relative = 1e-12);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(
            fit_doubling(&[(2000.0, 1.0), (2001.0, 2.0)]),
            Err(Error::InsufficientData { needed: 3, have: 2, .. })
        ));
        assert!(fit_doubling(&[(2000.0, 1.0), (2001.0, 0.0), (2002.0, 1.0)]).is_err());
        assert!(fit_doubling(&[(2000.0, 1.0), (2000.0, 2.0), (2000.0, 3.0)]).is_err());
        assert!(fit_power_law(&[(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = [16.0, 28.0, 40.0, 65.0]
            .iter()
            .map(|&l: &f64| (l, 2.0 * l.powf(1.7)))
            .collect();
        let f = fit_power_law(&pts).unwrap();
        assert_relative_eq!(f.exponent, 1.7, max_relative = 1e-12);
        assert_relative_eq!(f.log_coefficient, 2f64.log10(), epsilon = 1e-12);
        assert_relative_eq!(f.r_squared, 1.0, epsilon = 1e-15);
        assert_relative_eq!(f.predict(28.0), 2.0 * 28f64.powf(1.7), max_relative = 1e-12);

        let flat = fit_power_law(&[(16.0, 3.0), (28.0, 3.0), (65.0, 3.0)]).unwrap();
        assert_eq!(flat.exponent, 0.0);
    }

    #[test]
    fn noisy_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &t in &[1.8, 4.0, -1.8, 10.0] {
            let pts: Vec<_> = (0..21)
                .map(|i| {
                    let year = 1998.0 + f64::from(i);
                    let noise = 1.0 + rng.gen_range(-0.05..0.05);
                    (year, 3.0 * ((year - 1998.0) / t).exp2() * noise)
                })
                .collect();
            let f = fit_doubling(&pts).unwrap();
            assert!(((f.period() - t) / t).abs() < 0.1, "{t} -> {}", f.period());
        }
    }

    #[test]
    fn extrapolation_anchors() {
        let f = TrendFit::from_period(-1.8, 2018, 1.92e-12).unwrap();
        assert_relative_eq!(extrapolate(&f, 2018.0), 1.92e-12, max_relative = 1e-15);
        assert_relative_eq!(extrapolate(&f, 2019.8), 0.96e-12, max_relative = 1e-12);
        let y = 2018.0 + 1.8 * 19.2f64.log2();
        assert_relative_eq!(extrapolate(&f, y), 1e-13, max_relative = 1e-12);
        assert!((y - 2025.67).abs() < 0.01);

        let g = fit_doubling(&[(2000.0, 1.0), (2004.0, 2.0), (2008.0, 4.0)]).unwrap();
        assert_relative_eq!(extrapolate(&g, 2004.0), 2.0, max_relative = 1e-15);
        assert_relative_eq!(extrapolate(&g, 2012.0), 8.0, max_relative = 1e-15);
    }

    #[test]
    fn threshold_examples() {
        let f = TrendFit::from_period(-1.8, 2018, 1.92e-12).unwrap();
        let y = threshold_year(&f, (2018.0, 1.92e-12), Goal::AtMost(1e-13))
            .unwrap()
            .year()
            .unwrap();
        assert!((y - 2025.7).abs() < 0.1, "{y}");
        assert_eq!(
            threshold_year(&f, (2018.0, 0.5e-13), Goal::AtMost(1e-13)).unwrap(),
            Projection::Year(2018.0)
        );
        let up = TrendFit::from_period(4.0, 2018, 1.0).unwrap();
        assert_eq!(
            threshold_year(&up, (2018.0, 1.0), Goal::AtMost(0.5)).unwrap(),
            Projection::Unreachable
        );
        let y = threshold_year(&up, (2018.0, 1.0), Goal::AtLeast(4.0)).unwrap();
        assert_eq!(y, Projection::Year(2026.0));
    }

    #[test]
    fn reference_trends_resolve() {
        assert_eq!(
            reference_trend("speed-resolution-4yr").unwrap().law,
            ReferenceLaw::Period(4.0)
        );
        assert!(reference_trend("nope").is_err());
    }

    fn synthetic(n: usize) -> Dataset {
        // E_bit halves every 2 years, one record per year
        let recs = (0..n)
            .map(|i| {
                let year = 2000 + i as i32;
                let p = 1e-2 * (-(i as f64) / 2.0).exp2();
                SurveyRecord {
                    tech_node: Some(180.0 / (1.0 + i as f64)),
                    ..SurveyRecord::new(format!("r{i}"), year, p, 2e9)
                }
            })
            .collect();
        Dataset::new(recs, vec![]).unwrap()
    }

    #[test]
    fn subset_selectors_compose() {
        let ds = synthetic(8);
        let all = fit_on_subset(&ds, MetricKey::SingleBitEnergy, Axis::Year, Selector::All, 1.0).unwrap();
        let Fit::Doubling(f) = &all.fit else { panic!() };
        assert_relative_eq!(f.halving_time().unwrap(), 2.0, max_relative = 1e-9);
        let direct: Vec<_> = ds
            .records()
            .iter()
            .map(|r| (f64::from(r.year), r.power / 1e9))
            .collect();
        assert_eq!(all.fit, Fit::Doubling(fit_doubling(&direct).unwrap()));
        // every record sets a record, so frontier and yearly best equal all
        let fr = fit_on_subset(&ds, MetricKey::SingleBitEnergy, Axis::Year, Selector::Frontier, 1.0).unwrap();
        assert_eq!(fr.fit, all.fit);
        let yb = fit_on_subset(&ds, MetricKey::SingleBitEnergy, Axis::Year, Selector::YearlyBest, 1.0).unwrap();
        assert_eq!(yb.fit, all.fit);

        let tech = fit_on_subset(&ds, MetricKey::SingleBitEnergy, Axis::TechNode, Selector::All, 1.0).unwrap();
        assert!(matches!(tech.fit, Fit::PowerLaw(_)));

        assert!(matches!(
            fit_on_subset(
                &synthetic(2),
                MetricKey::SingleBitEnergy,
                Axis::Year,
                Selector::All,
                1.0
            ),
            Err(Error::InsufficientData { .. })
        ));
        assert!(fit_on_subset(&ds, MetricKey::Enob, Axis::Year, Selector::YearlyBest, 1.0).is_err());
    }

    fn sample() -> Dataset {
        crate::dataset::parse_converter_csv(include_str!("../data/adc_sample.csv"))
            .unwrap()
            .0
    }

    fn period(key: MetricKey) -> f64 {
        match fit_on_subset(&sample(), key, Axis::Year, Selector::YearlyBest, 1.0)
            .unwrap()
            .fit
        {
            Fit::Doubling(f) => f.period(),
            Fit::PowerLaw(_) => unreachable!(),
        }
    }

    fn exponent(selector: Selector) -> (f64, usize) {
        match fit_on_subset(&sample(), MetricKey::SingleBitEnergy, Axis::TechNode, selector, 1.0)
            .unwrap()
            .fit
        {
            Fit::PowerLaw(p) => (p.exponent, p.n_points),
            Fit::Doubling(_) => unreachable!(),
        }
    }

    // Pinned against a numpy polyfit of the bundled sample.
    #[test]
    fn sample_regression_values() {
        let t = period(MetricKey::SpeedResolution);
        assert_relative_eq!(t, 3.526878343110882, max_relative = 1e-9);
        assert!((3.0..=6.0).contains(&t));
        assert_relative_eq!(
            period(MetricKey::SingleBitEnergy),
            -2.2127730101677785,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            period(MetricKey::SamplingDensity),
            2.014838191168887,
            max_relative = 1e-9
        );

        let (all, n_all) = exponent(Selector::All);
        let (front, n_front) = exponent(Selector::Frontier);
        let (per_node, n_nodes) = exponent(Selector::YearlyBest);
        assert_relative_eq!(all, 1.6535381572379768, max_relative = 1e-9);
        assert_relative_eq!(front, 1.7668338115237738, max_relative = 1e-9);
        assert_relative_eq!(per_node, 2.055433289521639, max_relative = 1e-9);
        assert_eq!((n_all, n_front, n_nodes), (45, 7, 13));
        // frontier-only fit stays within half a unit of the average fit
        assert!((front - all).abs() < 0.5);
    }

    proptest! {
        #[test]
        fn exact_recovery(t in prop_oneof![0.5f64..20.0, -20.0f64..-0.5], a in 1e-15f64..1e15,
                          start in 1970i32..2050, n in 3usize..25) {
            let pts: Vec<_> = (0..n)
                .map(|i| (f64::from(start) + i as f64, a * (i as f64 / t).exp2()))
                .collect();
            let f = fit_doubling(&pts).unwrap();
            prop_assert!(((f.period() - t) / t).abs() < 1e-6);
            prop_assert!((f.r_squared - 1.0).abs() < 1e-12);
        }

        #[test]
        fn shift_and_scale(t in 0.5f64..20.0, shift in -50f64..50.0, c in 1e-6f64..1e6) {
            let base: Vec<_> = (0..6).map(|i| (2000.0 + f64::from(i) * 1.5, (f64::from(i) / t).exp2() * (1.0 + 0.03 * f64::from(i % 3)))).collect();
            let f0 = fit_doubling(&base).unwrap();
            let shifted: Vec<_> = base.iter().map(|&(x, y)| (x + shift, y)).collect();
            let scaled: Vec<_> = base.iter().map(|&(x, y)| (x, y * c)).collect();
            prop_assert!((fit_doubling(&shifted).unwrap().period() - f0.period()).abs() < 1e-9);
            prop_assert!((fit_doubling(&scaled).unwrap().period() - f0.period()).abs() < 1e-9);

            let pl: Vec<_> = base.iter().map(|&(x, y)| (x - 1990.0, y)).collect();
            let p0 = fit_power_law(&pl).unwrap();
            let pls: Vec<_> = pl.iter().map(|&(x, y)| (x, y * c)).collect();
            prop_assert!((fit_power_law(&pls).unwrap().exponent - p0.exponent).abs() < 1e-9);
        }

        #[test]
        fn threshold_then_extrapolate(t in prop_oneof![0.5f64..20.0, -20.0f64..-0.5],
                                      anchor in 1e-14f64..1e-10, factor in 1.01f64..1e4) {
            let f = TrendFit::from_period(t, 2018, anchor).unwrap();
            let (goal, thr) = if t < 0.0 {
                (Goal::AtMost(anchor / factor), anchor / factor)
            } else {
                (Goal::AtLeast(anchor * factor), anchor * factor)
            };
            let y = threshold_year(&f, (2018.0, anchor), goal).unwrap().year().unwrap();
            prop_assert!((extrapolate(&f, y) / thr - 1.0).abs() < 1e-9);
        }
    }
}
