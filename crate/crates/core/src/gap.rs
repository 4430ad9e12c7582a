//! Requirement specifications, per-record verdicts and feasibility
//! projections.

use std::fmt;

use crate::dataset::{Dataset, Predicate, SurveyRecord, TransceiverRecord};
use crate::error::{Error, Result};
use crate::frontier::yearly_envelope;
use crate::metrics::{derive_all, DerivedMetrics, MetricKey};
use crate::trends::{fit_doubling, threshold_year, Goal, Projection, TrendFit};

/// Converter-level demands of a wireless on-chip link.
///
/// Lower bounds may be zero and upper bounds infinite, which disables the
/// corresponding criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct RequirementSpec {
    pub name: String,
    /// Hz.
    pub min_bandwidth: f64,
    /// Hz.
    pub min_nyquist: f64,
    pub max_osr: f64,
    /// Bits. A converter passes when its ENOB reaches this floor.
    pub min_enob: f64,
    /// mm².
    pub max_area: f64,
    /// J/bit.
    pub max_energy_per_bit: f64,
}

impl RequirementSpec {
    /// ≥10 GHz bandwidth, ≥20 GHz Nyquist rate, OSR ≤ 4, 4 effective bits,
    /// ≤0.1 mm², ≤1 pJ/bit.
    pub fn table2_adc() -> Self {
        RequirementSpec {
            name: "table2-adc".into(),
            min_bandwidth: 10e9,
            min_nyquist: 20e9,
            max_osr: 4.0,
            min_enob: 4.0,
            max_area: 0.1,
            max_energy_per_bit: 1e-12,
        }
    }

    /// As [`table2_adc`](Self::table2_adc) with a one-bit resolution floor.
    pub fn table2_adc_1bit() -> Self {
        RequirementSpec {
            name: "table2-adc-1bit".into(),
            min_enob: 1.0,
            ..Self::table2_adc()
        }
    }

    /// Every criterion disabled.
    pub fn unconstrained(name: impl Into<String>) -> Self {
        RequirementSpec {
            name: name.into(),
            min_bandwidth: 0.0,
            min_nyquist: 0.0,
            max_osr: f64::INFINITY,
            min_enob: 0.0,
            max_area: f64::INFINITY,
            max_energy_per_bit: f64::INFINITY,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lower = [
            ("min_bandwidth", self.min_bandwidth),
            ("min_nyquist", self.min_nyquist),
            ("min_enob", self.min_enob),
        ];
        for (q, v) in lower {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(q, format!("{v} must be finite and non-negative")));
            }
        }
        let upper = [
            ("max_area", self.max_area),
            ("max_energy_per_bit", self.max_energy_per_bit),
        ];
        for (q, v) in upper {
            if !(v > 0.0) {
                return Err(Error::domain(q, format!("{v} must be positive")));
            }
        }
        if !(self.max_osr >= 1.0) {
            return Err(Error::domain("max_osr", "must be at least 1"));
        }
        Ok(())
    }

    pub fn threshold(&self, c: Criterion) -> f64 {
        match c {
            Criterion::Bandwidth => self.min_bandwidth,
            Criterion::NyquistRate => self.min_nyquist,
            Criterion::Resolution => self.min_enob,
            Criterion::Area => self.max_area,
            Criterion::Energy => self.max_energy_per_bit,
        }
    }

    pub fn threshold_mut(&mut self, c: Criterion) -> &mut f64 {
        match c {
            Criterion::Bandwidth => &mut self.min_bandwidth,
            Criterion::NyquistRate => &mut self.min_nyquist,
            Criterion::Resolution => &mut self.min_enob,
            Criterion::Area => &mut self.max_area,
            Criterion::Energy => &mut self.max_energy_per_bit,
        }
    }

    pub fn goal(&self, c: Criterion) -> Goal {
        let t = self.threshold(c);
        if c.is_lower_bound() {
            Goal::AtLeast(t)
        } else {
            Goal::AtMost(t)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub low: f64,
    pub high: f64,
}

impl Range {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low <= high) {
            return Err(Error::domain("range", format!("{low} exceeds {high}")));
        }
        Ok(Range { low, high })
    }

    pub fn contains(&self, v: f64) -> bool {
        self.low <= v && v <= self.high
    }
}

/// System-level scenario of a wireless manycore. Only the transceiver rows
/// and throughput are checked; the others are carried for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub name: String,
    /// cm.
    pub transmission_range: Range,
    /// nodes/cm².
    pub node_density: Range,
    /// bits/s.
    pub network_throughput: Range,
    /// s.
    pub latency: Range,
    pub bit_error_rate: Range,
    /// J/bit.
    pub transceiver_energy: Range,
    /// mm².
    pub transceiver_area: Range,
}

impl ScenarioSpec {
    pub fn table1() -> Self {
        let r = |l, h| Range { low: l, high: h };
        ScenarioSpec {
            name: "table1-scenario".into(),
            transmission_range: r(0.1, 10.0),
            node_density: r(10.0, 1000.0),
            network_throughput: r(10e9, 100e9),
            latency: r(1e-9, 100e-9),
            bit_error_rate: r(1e-15, 1e-15),
            transceiver_energy: r(1e-12, 10e-12),
            transceiver_area: r(0.01, 1.0),
        }
    }

    pub fn rows(&self) -> [(&'static str, &'static str, Range); 7] {
        [
            ("transmission_range", "cm", self.transmission_range),
            ("node_density", "nodes/cm2", self.node_density),
            ("network_throughput", "b/s", self.network_throughput),
            ("latency", "s", self.latency),
            ("bit_error_rate", "", self.bit_error_rate),
            ("transceiver_energy", "J/bit", self.transceiver_energy),
            ("transceiver_area", "mm2", self.transceiver_area),
        ]
    }
}

/// A transceiver complies when it reaches the lowest scenario throughput and
/// stays under the energy and area ceilings.
#[derive(Debug, Clone, PartialEq)]
pub struct TransceiverVerdict {
    pub record_id: String,
    pub throughput: Outcome,
    pub energy: Outcome,
    pub area: Outcome,
}

impl TransceiverVerdict {
    pub fn overall(&self) -> bool {
        [self.throughput, self.energy, self.area]
            .iter()
            .all(|o| *o == Outcome::Pass)
    }
}

pub fn evaluate_transceiver(t: &TransceiverRecord, scenario: &ScenarioSpec) -> TransceiverVerdict {
    let o = |ok: bool| if ok { Outcome::Pass } else { Outcome::Fail };
    TransceiverVerdict {
        record_id: t.id.clone(),
        throughput: o(t.bitrate >= scenario.network_throughput.low),
        energy: o(t.power / t.bitrate <= scenario.transceiver_energy.high),
        area: o(t.area <= scenario.transceiver_area.high),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Preset {
    Converter(RequirementSpec),
    Scenario(ScenarioSpec),
}

pub const PRESET_NAMES: [&str; 3] = ["table2-adc", "table2-adc-1bit", "table1-scenario"];

pub fn preset(name: &str) -> Result<Preset> {
    match name {
        "table2-adc" => Ok(Preset::Converter(RequirementSpec::table2_adc())),
        "table2-adc-1bit" => Ok(Preset::Converter(RequirementSpec::table2_adc_1bit())),
        "table1-scenario" => Ok(Preset::Scenario(ScenarioSpec::table1())),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    Bandwidth,
    NyquistRate,
    Resolution,
    Area,
    Energy,
}

impl Criterion {
    pub const ALL: [Criterion; 5] = [
        Criterion::Bandwidth,
        Criterion::NyquistRate,
        Criterion::Resolution,
        Criterion::Area,
        Criterion::Energy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Bandwidth => "bandwidth",
            Criterion::NyquistRate => "nyquist",
            Criterion::Resolution => "resolution",
            Criterion::Area => "area",
            Criterion::Energy => "energy",
        }
    }

    pub fn metric(self) -> MetricKey {
        match self {
            Criterion::Bandwidth => MetricKey::Bandwidth,
            Criterion::NyquistRate => MetricKey::NyquistRate,
            Criterion::Resolution => MetricKey::Enob,
            Criterion::Area => MetricKey::Area,
            Criterion::Energy => MetricKey::SingleBitEnergy,
        }
    }

    /// True when larger measured values are better.
    pub fn is_lower_bound(self) -> bool {
        matches!(
            self,
            Criterion::Bandwidth | Criterion::NyquistRate | Criterion::Resolution
        )
    }

    fn measure(self, record: &SurveyRecord, m: &DerivedMetrics) -> Option<f64> {
        match self {
            Criterion::Bandwidth => Some(m.bandwidth),
            Criterion::NyquistRate => Some(m.nyquist_rate),
            Criterion::Resolution => m.enob,
            Criterion::Area => record.area,
            Criterion::Energy => Some(m.single_bit_energy),
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// The record lacks the field the criterion needs.
    Unknown,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionVerdict {
    pub criterion: Criterion,
    pub outcome: Outcome,
    pub measured: Option<f64>,
    /// Oriented so that values ≥ 1 pass: measured/threshold for lower
    /// bounds, threshold/measured for upper bounds.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordVerdict {
    pub record_id: String,
    pub criteria: Vec<CriterionVerdict>,
    pub overall: bool,
}

impl RecordVerdict {
    pub fn get(&self, c: Criterion) -> &CriterionVerdict {
        self.criteria
            .iter()
            .find(|v| v.criterion == c)
            .expect("every criterion is evaluated")
    }

    /// Criteria not known to pass.
    pub fn failures(&self) -> usize {
        self.criteria.iter().filter(|v| v.outcome != Outcome::Pass).count()
    }

    pub fn worst_margin(&self) -> Option<f64> {
        self.criteria.iter().filter_map(|v| v.margin).min_by(f64::total_cmp)
    }
}

fn margin(lower_bound: bool, measured: f64, threshold: f64) -> f64 {
    if lower_bound {
        if threshold == 0.0 {
            f64::INFINITY
        } else {
            measured / threshold
        }
    } else {
        threshold / measured
    }
}

/// Judges one record. Thresholds are inclusive.
pub fn evaluate_record(record: &SurveyRecord, metrics: &DerivedMetrics, spec: &RequirementSpec) -> RecordVerdict {
    let criteria: Vec<CriterionVerdict> = Criterion::ALL
        .iter()
        .map(|&c| {
            let t = spec.threshold(c);
            match c.measure(record, metrics) {
                None => CriterionVerdict {
                    criterion: c,
                    outcome: Outcome::Unknown,
                    measured: None,
                    margin: None,
                },
                Some(v) => {
                    let ok = if c.is_lower_bound() { v >= t } else { v <= t };
                    CriterionVerdict {
                        criterion: c,
                        outcome: if ok { Outcome::Pass } else { Outcome::Fail },
                        measured: Some(v),
                        margin: Some(margin(c.is_lower_bound(), v, t)),
                    }
                }
            }
        })
        .collect();
    let overall = criteria.iter().all(|v| v.outcome == Outcome::Pass);
    RecordVerdict {
        record_id: record.id.clone(),
        criteria,
        overall,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestDesign {
    pub record_id: String,
    pub measured: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionSummary {
    pub criterion: Criterion,
    pub threshold: f64,
    pub pass: usize,
    pub fail: usize,
    pub unknown: usize,
    /// Largest margin, ties to the smallest id.
    pub best: Option<BestDesign>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NearestMiss {
    pub record_id: String,
    pub failures: usize,
    pub worst_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub spec: RequirementSpec,
    pub osr: f64,
    pub verdicts: Vec<RecordVerdict>,
    pub summaries: Vec<CriterionSummary>,
    pub overall_pass: usize,
    /// Best non-passing record: fewest failures, then largest worst margin,
    /// then smallest id.
    pub nearest_miss: Option<NearestMiss>,
}

impl GapReport {
    pub fn summary(&self, c: Criterion) -> &CriterionSummary {
        self.summaries
            .iter()
            .find(|s| s.criterion == c)
            .expect("every criterion is summarised")
    }

    pub fn verdict(&self, id: &str) -> Option<&RecordVerdict> {
        self.verdicts.iter().find(|v| v.record_id == id)
    }

    /// Criteria no record passes.
    pub fn failing_criteria(&self) -> Vec<Criterion> {
        self.summaries
            .iter()
            .filter(|s| s.pass == 0)
            .map(|s| s.criterion)
            .collect()
    }
}

/// Evaluates every record at a common oversampling ratio.
pub fn gap_report(dataset: &Dataset, spec: &RequirementSpec, osr: f64) -> Result<GapReport> {
    spec.validate()?;
    if dataset.is_empty() {
        return Err(Error::EmptyInput("gap report needs at least one record".into()));
    }
    if osr > spec.max_osr {
        return Err(Error::domain(
            "osr",
            format!("{osr} exceeds the spec's max_osr {}", spec.max_osr),
        ));
    }
    let mut verdicts = Vec::with_capacity(dataset.len());
    for r in dataset.records() {
        let m = derive_all(r, osr)?;
        verdicts.push(evaluate_record(r, &m, spec));
    }

    let summaries = Criterion::ALL
        .iter()
        .map(|&c| {
            let mut s = CriterionSummary {
                criterion: c,
                threshold: spec.threshold(c),
                pass: 0,
                fail: 0,
                unknown: 0,
                best: None,
            };
            for v in &verdicts {
                let cv = v.get(c);
                match cv.outcome {
                    Outcome::Pass => s.pass += 1,
                    Outcome::Fail => s.fail += 1,
                    Outcome::Unknown => s.unknown += 1,
                }
                if let (Some(measured), Some(margin)) = (cv.measured, cv.margin) {
                    let better = match &s.best {
                        None => true,
                        Some(b) => margin > b.margin || (margin == b.margin && v.record_id < b.record_id),
                    };
                    if better {
                        s.best = Some(BestDesign {
                            record_id: v.record_id.clone(),
                            measured,
                            margin,
                        });
                    }
                }
            }
            s
        })
        .collect();

    let overall_pass = verdicts.iter().filter(|v| v.overall).count();
    let nearest_miss = verdicts
        .iter()
        .filter(|v| !v.overall)
        .min_by(|a, b| {
            a.failures()
                .cmp(&b.failures())
                .then_with(|| {
                    let wa = a.worst_margin().unwrap_or(f64::NEG_INFINITY);
                    let wb = b.worst_margin().unwrap_or(f64::NEG_INFINITY);
                    wb.total_cmp(&wa)
                })
                .then_with(|| a.record_id.cmp(&b.record_id))
        })
        .map(|v| NearestMiss {
            record_id: v.record_id.clone(),
            failures: v.failures(),
            worst_margin: v.worst_margin(),
        });

    Ok(GapReport {
        spec: spec.clone(),
        osr,
        verdicts,
        summaries,
        overall_pass,
        nearest_miss,
    })
}

/// A trend to project one criterion along, started from `anchor`
/// (year, value).
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionTrend {
    pub criterion: Criterion,
    pub fit: TrendFit,
    pub anchor: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriterionProjection {
    Year(f64),
    Unreachable,
    /// A failing criterion was given no trend.
    MissingTrend,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub projections: Vec<(Criterion, CriterionProjection)>,
    /// Latest projected year; `None` when any criterion is unreachable or
    /// lacks a trend.
    pub overall_year: Option<f64>,
}

/// Projects every failing criterion, and every criterion a trend is
/// supplied for, to the year its threshold is met.
pub fn feasibility_assessment(report: &GapReport, trends: &[CriterionTrend]) -> Result<Feasibility> {
    let mut criteria = report.failing_criteria();
    criteria.extend(trends.iter().map(|t| t.criterion));
    criteria.sort();
    criteria.dedup();

    let mut projections = Vec::with_capacity(criteria.len());
    for c in criteria {
        let p = match trends.iter().find(|t| t.criterion == c) {
            None => CriterionProjection::MissingTrend,
            Some(t) => {
                let goal = report.spec.goal(c);
                if goal.is_met_by(t.anchor.1) {
                    CriterionProjection::Year(t.anchor.0)
                } else {
                    match threshold_year(&t.fit, t.anchor, goal)? {
                        Projection::Year(y) => CriterionProjection::Year(y),
                        Projection::Unreachable => CriterionProjection::Unreachable,
                    }
                }
            }
        };
        projections.push((c, p));
    }
    let overall_year = projections.iter().try_fold(f64::NEG_INFINITY, |acc, (_, p)| match p {
        CriterionProjection::Year(y) => Some(acc.max(*y)),
        _ => None,
    });
    Ok(Feasibility {
        overall_year: overall_year.filter(|y| y.is_finite()),
        projections,
    })
}

/// Fits a yearly-best doubling trend for each criterion and anchors it at the
/// latest envelope point. Criteria with too little data are skipped.
pub fn fitted_trends(dataset: &Dataset, criteria: &[Criterion], osr: f64) -> Result<Vec<CriterionTrend>> {
    let mut out = Vec::new();
    for &c in criteria {
        let key = c.metric();
        let env = match yearly_envelope(dataset, key, key.preferred_direction(), &Predicate::default(), osr) {
            Ok(e) => e,
            Err(Error::EmptyInput(_)) => continue,
            Err(e) => return Err(e),
        };
        let fit = match fit_doubling(&env.as_xy()) {
            Ok(f) => f,
            Err(Error::InsufficientData { .. }) => continue,
            Err(e) => return Err(e),
        };
        let last = env.points.last().expect("fit needs points");
        out.push(CriterionTrend {
            criterion: c,
            fit,
            anchor: (f64::from(last.year), last.value),
        });
    }
    Ok(out)
}
