use std::fmt::Write as _;

use super::{format_full, format_sig, format_year};
use crate::budget::{BudgetCascade, DensityComparison};
use crate::dataset::Dataset;
use crate::error::Result;
use crate::frontier::{Frontier, Objective};
use crate::gap::{Criterion, CriterionProjection, Feasibility, GapReport, ScenarioSpec, TransceiverVerdict};
use crate::metrics::{derive_all, MetricKey};

/// Left-aligned columns separated by two spaces.
pub(crate) fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(header.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

fn csv_string(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

const METRIC_COLUMNS: [MetricKey; 8] = [
    MetricKey::Enob,
    MetricKey::Sndr,
    MetricKey::Bandwidth,
    MetricKey::NyquistRate,
    MetricKey::SingleBitEnergy,
    MetricKey::SamplingDensity,
    MetricKey::SchreierFom,
    MetricKey::SpeedResolution,
];

fn metric_rows(dataset: &Dataset, osr: f64, fmt: fn(f64) -> String) -> Result<Vec<Vec<String>>> {
    let mut rows = Vec::new();
    for r in dataset.records() {
        let m = derive_all(r, osr)?;
        let mut row = vec![r.id.clone(), r.year.to_string()];
        row.extend(
            METRIC_COLUMNS
                .iter()
                .map(|k| k.value(r, &m).map_or_else(String::new, fmt)),
        );
        let warnings: Vec<String> = m.warnings.iter().map(|w| format!("{w:?}")).collect();
        row.push(warnings.join(";"));
        rows.push(row);
    }
    Ok(rows)
}

fn metric_header() -> Vec<&'static str> {
    let mut h = vec!["id", "year"];
    h.extend(METRIC_COLUMNS.iter().map(|k| k.name()));
    h.push("warnings");
    h
}

/// Derived metrics of every record at full precision.
pub fn metrics_csv(dataset: &Dataset, osr: f64) -> Result<String> {
    Ok(csv_string(&metric_header(), &metric_rows(dataset, osr, format_full)?))
}

pub fn metrics_text(dataset: &Dataset, osr: f64) -> Result<String> {
    Ok(table(&metric_header(), &metric_rows(dataset, osr, format_sig)?))
}

pub fn budget_text(c: &BudgetCascade, density: Option<&DensityComparison>) -> String {
    let rows: Vec<Vec<String>> = [
        ("per core", c.per_core_area, c.per_core_power),
        ("network-on-chip", c.noc_area, c.noc_power),
        ("wireless link", c.wireless_area, c.wireless_power),
        ("data converters", c.converter_area_target, c.converter_power_target),
    ]
    .iter()
    .map(|(level, a, p)| vec![level.to_string(), format_sig(*a), format_sig(*p)])
    .collect();
    let mut out = table(&["level", "area_mm2", "power_w"], &rows);
    let _ = writeln!(
        out,
        "\nat {} b/s: wireless {} pJ/bit, converters {} pJ/bit",
        format_sig(c.target_datarate),
        format_sig(c.wireless_energy_per_bit * 1e12),
        format_sig(c.converter_energy_per_bit_target * 1e12)
    );
    if let Some(d) = density {
        let _ = writeln!(
            out,
            "densest converter {} at {} Hz/mm2; densest transceiver {} at {} b/s/mm2; ratio {}",
            d.converter_id,
            format_sig(d.converter_density),
            d.transceiver_id,
            format_sig(d.transceiver_density),
            format_sig(d.ratio)
        );
    }
    out
}

fn frontier_rows(
    dataset: &Dataset,
    objectives: &[Objective],
    frontier: &Frontier,
    osr: f64,
    fmt: fn(f64) -> String,
) -> Result<Vec<Vec<String>>> {
    let mut rows = Vec::new();
    for id in &frontier.members {
        let r = dataset.get(id).expect("frontier member in dataset");
        let m = derive_all(r, osr)?;
        let mut row = vec![r.id.clone(), r.year.to_string()];
        row.extend(
            objectives
                .iter()
                .map(|o| o.key.value(r, &m).map_or_else(String::new, fmt)),
        );
        rows.push(row);
    }
    Ok(rows)
}

fn objective_header(objectives: &[Objective]) -> Vec<String> {
    let mut h = vec!["id".to_string(), "year".to_string()];
    h.extend(objectives.iter().map(|o| format!("{}:{}", o.key.name(), o.direction)));
    h
}

pub fn frontier_csv(dataset: &Dataset, objectives: &[Objective], frontier: &Frontier, osr: f64) -> Result<String> {
    let h = objective_header(objectives);
    let h: Vec<&str> = h.iter().map(String::as_str).collect();
    Ok(csv_string(
        &h,
        &frontier_rows(dataset, objectives, frontier, osr, format_full)?,
    ))
}

pub fn frontier_text(dataset: &Dataset, objectives: &[Objective], frontier: &Frontier, osr: f64) -> Result<String> {
    let h = objective_header(objectives);
    let h: Vec<&str> = h.iter().map(String::as_str).collect();
    let mut out = table(&h, &frontier_rows(dataset, objectives, frontier, osr, format_sig)?);
    let _ = writeln!(
        out,
        "\n{} of {} records on the frontier; {} lack an objective",
        frontier.members.len(),
        dataset.len(),
        frontier.excluded.len()
    );
    Ok(out)
}

/// One row per record: outcome and margin for each criterion, then overall.
pub fn gap_csv(report: &GapReport) -> String {
    let mut header = vec!["id".to_string()];
    for c in Criterion::ALL {
        header.push(format!("{}_outcome", c.name()));
        header.push(format!("{}_margin", c.name()));
    }
    header.push("overall".into());
    let rows: Vec<Vec<String>> = report
        .verdicts
        .iter()
        .map(|v| {
            let mut row = vec![v.record_id.clone()];
            for cv in &v.criteria {
                row.push(cv.outcome.to_string());
                row.push(cv.margin.map_or_else(String::new, format_full));
            }
            row.push(if v.overall { "pass" } else { "fail" }.into());
            row
        })
        .collect();
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_string(&h, &rows)
}

pub fn gap_text(report: &GapReport, feasibility: Option<&Feasibility>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "spec {} at OSR {}: {} of {} records pass every criterion\n",
        report.spec.name,
        format_sig(report.osr),
        report.overall_pass,
        report.verdicts.len()
    );
    let rows: Vec<Vec<String>> = report
        .summaries
        .iter()
        .map(|s| {
            let (best, margin) = s.best.as_ref().map_or((String::new(), String::new()), |b| {
                (b.record_id.clone(), format_sig(b.margin))
            });
            vec![
                s.criterion.name().to_string(),
                format!(
                    "{} {}",
                    if s.criterion.is_lower_bound() { ">=" } else { "<=" },
                    format_sig(s.threshold)
                ),
                s.pass.to_string(),
                s.fail.to_string(),
                s.unknown.to_string(),
                best,
                margin,
            ]
        })
        .collect();
    out.push_str(&table(
        &["criterion", "threshold", "pass", "fail", "unknown", "best", "margin"],
        &rows,
    ));
    if let Some(n) = &report.nearest_miss {
        let _ = writeln!(
            out,
            "\nnearest miss: {} (failing {} of {} criteria, worst margin {})",
            n.record_id,
            n.failures,
            Criterion::ALL.len(),
            n.worst_margin.map_or_else(|| "n/a".into(), format_sig)
        );
    }
    if let Some(f) = feasibility {
        let _ = writeln!(out, "\nprojections:");
        for (c, p) in &f.projections {
            let text = match p {
                CriterionProjection::Year(y) => format_year(*y),
                CriterionProjection::Unreachable => "unreachable on current trend".into(),
                CriterionProjection::MissingTrend => "no trend available".into(),
            };
            let _ = writeln!(out, "  {}: {}", c.name(), text);
        }
        let _ = writeln!(
            out,
            "  overall: {}",
            f.overall_year.map_or_else(|| "not projected".into(), format_year)
        );
    }
    out
}

pub(crate) fn scenario_text(spec: &ScenarioSpec, verdicts: &[TransceiverVerdict]) -> String {
    let mut out = format!("scenario {}\n\n", spec.name);
    let rows: Vec<Vec<String>> = spec
        .rows()
        .iter()
        .map(|(name, unit, r)| {
            vec![
                name.to_string(),
                format_sig(r.low),
                format_sig(r.high),
                unit.to_string(),
            ]
        })
        .collect();
    out.push_str(&table(&["metric", "low", "high", "unit"], &rows));
    out.push('\n');
    let rows: Vec<Vec<String>> = verdicts
        .iter()
        .map(|v| {
            vec![
                v.record_id.clone(),
                v.throughput.to_string(),
                v.energy.to_string(),
                v.area.to_string(),
                if v.overall() { "pass" } else { "fail" }.to_string(),
            ]
        })
        .collect();
    out.push_str(&table(
        &["transceiver", "throughput", "energy", "area", "overall"],
        &rows,
    ));
    let passing = verdicts.iter().filter(|v| v.overall()).count();
    let _ = writeln!(out, "\n{passing} of {} transceivers comply", verdicts.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::budget::{cascade, AllocationPolicy, PlatformSpec};
    use crate::dataset::SurveyRecord;
    use crate::gap::{gap_report, RequirementSpec};

    #[test]
    fn table_alignment() {
        let t = table(&["a", "bbb"], &[vec!["xx".into(), "y".into()]]);
        assert_eq!(t, "a   bbb\nxx  y\n");
    }

    #[test]
    fn budget_numbers_at_display_precision() {
        let c = cascade(&PlatformSpec::reference_manycore(), &AllocationPolicy::default()).unwrap();
        let t = budget_text(&c, None);
        for s in ["4.500", "2.100", "1.500", "0.7000", "0.7500", "0.3500", "3.500 pJ/bit"] {
            assert!(t.contains(s), "{s} missing from\n{t}");
        }
    }

    #[test]
    fn gap_outputs() {
        let ds = Dataset::new(
            vec![SurveyRecord {
                enob: Some(4.0),
                area: Some(0.03),
                ..SurveyRecord::new("xu17", 2017, 0.023, 24e9)
            }],
            vec![],
        )
        .unwrap();
        let rep = gap_report(&ds, &RequirementSpec::table2_adc(), 1.0).unwrap();
        let t = gap_text(&rep, None);
        assert!(t.contains("0 of 1 records"));
        assert!(t.contains("0.5217"), "{t}");
        let csv = gap_csv(&rep);
        assert!(csv.starts_with("id,bandwidth_outcome,bandwidth_margin,"));
        assert!(csv.contains("xu17,pass,1.2e0,"));
        assert!(csv.trim_end().ends_with(",fail"));
    }
}
