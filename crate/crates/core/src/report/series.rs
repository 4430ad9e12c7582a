use std::fmt::Write as _;

use super::{format_full, PlotSpec, Scale};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::metrics::derive_all;

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub x: f64,
    pub y: f64,
    pub id: String,
    pub year: i32,
    pub label: String,
}

/// One row per plotted point, ordered by label, x, then id.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFile {
    pub header: Vec<String>,
    pub rows: Vec<SeriesRow>,
    /// `key: value` lines written as `#` comments above the header.
    pub provenance: Vec<(String, String)>,
}

impl SeriesFile {
    pub fn labels(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self.rows.iter().map(|r| r.label.as_str()).collect();
        v.dedup();
        v
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.provenance {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                format_full(r.x),
                format_full(r.y),
                r.id.clone(),
                r.year.to_string(),
                r.label.clone(),
            ])
            .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        out
    }
}

/// Extracts the (x, y) pairs a plot would show. Records lacking either
/// metric are left out.
pub fn emit_series(dataset: &Dataset, spec: &PlotSpec) -> Result<SeriesFile> {
    let mut rows = Vec::new();
    let mut offending = Vec::new();
    for r in dataset.records() {
        let m = derive_all(r, spec.osr)?;
        let (Some(x), Some(y)) = (spec.x_key.value(r, &m), spec.y_key.value(r, &m)) else {
            continue;
        };
        let bad_x = spec.x_scale == Scale::Log10 && x <= 0.0;
        let bad_y = spec.y_scale == Scale::Log10 && y <= 0.0;
        if bad_x || bad_y {
            offending.push(r.id.clone());
            continue;
        }
        rows.push(SeriesRow {
            x,
            y,
            id: r.id.clone(),
            year: r.year,
            label: spec.split.map_or_else(|| "all".to_string(), |s| s.label(r)),
        });
    }
    if !offending.is_empty() {
        offending.sort();
        return Err(Error::NonPositiveOnLogAxis(offending));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no record carries both {} and {}",
            spec.x_key, spec.y_key
        )));
    }
    rows.sort_by(|a, b| {
        a.label
            .cmp(&b.label)
            .then_with(|| a.x.total_cmp(&b.x))
            .then_with(|| a.id.cmp(&b.id))
    });
    let mut provenance = vec![
        ("plot".to_string(), spec.title.clone()),
        ("x".to_string(), format!("{} ({})", spec.x_key.name(), spec.x_scale)),
        ("y".to_string(), format!("{} ({})", spec.y_key.name(), spec.y_scale)),
        ("osr".to_string(), spec.osr.to_string()),
    ];
    if let Some(s) = spec.split {
        provenance.push(("split".to_string(), s.to_string()));
    }
    provenance.push((
        "dataset_sha256".to_string(),
        dataset.provenance().content_sha256.clone(),
    ));
    Ok(SeriesFile {
        header: ["x", "y", "id", "year", "series"].map(String::from).to_vec(),
        rows,
        provenance,
    })
}
