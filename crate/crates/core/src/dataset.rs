//! Survey datasets of published converter and transceiver designs.
//!
//! Records are held in canonical units (watts, hertz, mm², dB, nanometres)
//! and are never modified after parsing. Ingestion is row-tolerant: a row
//! that violates a numeric invariant is dropped with a fatal [`ParseIssue`],
//! while cosmetic problems (extra columns, unknown architecture labels) are
//! reported as warnings and the row is kept.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::SystemTime;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metrics;

/// Converter CSV columns, in canonical order.
pub const CONVERTER_COLUMNS: [&str; 11] = [
    "id",
    "year",
    "venue",
    "architecture",
    "tech_nm",
    "power_w",
    "fs_hz",
    "sndr_db",
    "enob",
    "area_mm2",
    "notes",
];

/// Transceiver CSV columns, in canonical order.
pub const TRANSCEIVER_COLUMNS: [&str; 5] = ["id", "year", "bitrate_bps", "power_w", "area_mm2"];

pub const MIN_YEAR: i32 = 1970;
pub const MAX_YEAR: i32 = 2100;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Architecture {
    Sar,
    Flash,
    Pipeline,
    TimeInterleaved,
    Folding,
    DeltaSigma,
    Other(String),
}

impl Architecture {
    /// Parses a label case-insensitively. Unrecognised labels are kept
    /// verbatim as [`Architecture::Other`].
    pub fn parse(label: &str) -> Self {
        match label.trim().to_ascii_lowercase().as_str() {
            "sar" => Architecture::Sar,
            "flash" => Architecture::Flash,
            "pipeline" | "pipe" => Architecture::Pipeline,
            "time-interleaved" | "ti" | "interleaved" => Architecture::TimeInterleaved,
            "folding" => Architecture::Folding,
            "delta-sigma" | "sigma-delta" | "dsm" => Architecture::DeltaSigma,
            _ => Architecture::Other(label.trim().to_string()),
        }
    }

    pub fn is_known(&self) -> bool {
        !matches!(self, Architecture::Other(s) if !s.eq_ignore_ascii_case("other"))
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Architecture::Sar => f.write_str("SAR"),
            Architecture::Flash => f.write_str("flash"),
            Architecture::Pipeline => f.write_str("pipeline"),
            Architecture::TimeInterleaved => f.write_str("time-interleaved"),
            Architecture::Folding => f.write_str("folding"),
            Architecture::DeltaSigma => f.write_str("delta-sigma"),
            Architecture::Other(s) => f.write_str(s),
        }
    }
}

/// One published converter design.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyRecord {
    pub id: String,
    pub year: i32,
    pub venue: Option<String>,
    pub architecture: Option<Architecture>,
    /// Feature size in nanometres.
    pub tech_node: Option<f64>,
    /// Watts.
    pub power: f64,
    /// Samples per second.
    pub sample_rate: f64,
    /// High-frequency (near-Nyquist) SNDR in dB.
    pub sndr: Option<f64>,
    pub enob: Option<f64>,
    /// mm².
    pub area: Option<f64>,
    pub notes: Option<String>,
}

impl SurveyRecord {
    /// Minimal record with only the required fields set.
    pub fn new(id: impl Into<String>, year: i32, power: f64, sample_rate: f64) -> Self {
        SurveyRecord {
            id: id.into(),
            year,
            venue: None,
            architecture: None,
            tech_node: None,
            power,
            sample_rate,
            sndr: None,
            enob: None,
            area: None,
            notes: None,
        }
    }

    pub fn is_resolution_complete(&self) -> bool {
        self.sndr.is_some() || self.enob.is_some()
    }

    /// ENOB as reported, or derived from SNDR when only SNDR is present.
    pub fn effective_enob(&self) -> Option<f64> {
        self.enob.or_else(|| self.sndr.map(metrics::enob_from_sndr))
    }

    /// SNDR as reported, or derived from ENOB when only ENOB is present.
    pub fn effective_sndr(&self) -> Option<f64> {
        self.sndr.or_else(|| self.enob.map(metrics::sndr_from_enob_unchecked))
    }

    /// Checks the record invariants, returning the offending column and a
    /// message on the first violation.
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.id.trim().is_empty() {
            return Err(("id", "id must not be empty".into()));
        }
        check_year(self.year)?;
        check_positive("power_w", "power", self.power)?;
        check_positive("fs_hz", "sample rate", self.sample_rate)?;
        if let Some(a) = self.area {
            check_positive("area_mm2", "area", a)?;
        }
        if let Some(t) = self.tech_node {
            check_positive("tech_nm", "technology node", t)?;
        }
        if let Some(s) = self.sndr {
            if !s.is_finite() {
                return Err(("sndr_db", "sndr must be finite".into()));
            }
        }
        if let Some(e) = self.enob {
            if !e.is_finite() || e < 0.0 {
                return Err(("enob", "enob must be finite and non-negative".into()));
            }
        }
        Ok(())
    }
}

/// One wireless transceiver design (antenna excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct TransceiverRecord {
    pub id: String,
    pub year: i32,
    /// Bits per second.
    pub bitrate: f64,
    /// Watts.
    pub power: f64,
    /// mm².
    pub area: f64,
}

impl TransceiverRecord {
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.id.trim().is_empty() {
            return Err(("id", "id must not be empty".into()));
        }
        check_year(self.year)?;
        check_positive("bitrate_bps", "bitrate", self.bitrate)?;
        check_positive("power_w", "power", self.power)?;
        check_positive("area_mm2", "area", self.area)?;
        Ok(())
    }

    /// Bitrate per unit area, (bits/s)/mm².
    pub fn bitrate_density(&self) -> f64 {
        self.bitrate / self.area
    }
}

fn check_year(year: i32) -> std::result::Result<(), (&'static str, String)> {
    if (MIN_YEAR..=MAX_YEAR).contains(&year) {
        Ok(())
    } else {
        Err(("year", format!("year must lie in {MIN_YEAR}..={MAX_YEAR}, got {year}")))
    }
}

fn check_positive(column: &'static str, name: &str, v: f64) -> std::result::Result<(), (&'static str, String)> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err((column, format!("{name} must be positive")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Fatal,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Fatal => "fatal",
        })
    }
}

/// A problem found while ingesting one row. Fatal issues mean the row was
/// excluded from the dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseIssue {
    /// Line number in the document; the header is line 1.
    pub row: u64,
    pub column: String,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for ParseIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {} [{}] {}: {}",
            self.row, self.column, self.severity, self.message
        )
    }
}

#[derive(Debug, Clone)]
pub struct Provenance {
    pub source: Option<String>,
    pub parsed_at: SystemTime,
    /// Hex SHA-256 of the ingested text(s).
    pub content_sha256: String,
}

impl Provenance {
    fn of_text(text: &str) -> Self {
        Provenance {
            source: None,
            parsed_at: SystemTime::now(),
            content_sha256: sha256_hex(text.as_bytes()),
        }
    }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// An immutable collection of converter and transceiver records.
#[derive(Debug, Clone)]
pub struct Dataset {
    records: Vec<SurveyRecord>,
    transceivers: Vec<TransceiverRecord>,
    provenance: Provenance,
}

impl Dataset {
    /// Builds a dataset from already-constructed records, enforcing record
    /// invariants and id uniqueness.
    pub fn new(records: Vec<SurveyRecord>, transceivers: Vec<TransceiverRecord>) -> Result<Self> {
        let mut seen = HashSet::new();
        for r in &records {
            r.validate()
                .map_err(|(_, msg)| Error::domain("record", format!("`{}`: {msg}", r.id)))?;
            if !seen.insert(r.id.as_str()) {
                return Err(Error::domain("record", format!("duplicate id `{}`", r.id)));
            }
        }
        let mut seen = HashSet::new();
        for t in &transceivers {
            t.validate()
                .map_err(|(_, msg)| Error::domain("transceiver", format!("`{}`: {msg}", t.id)))?;
            if !seen.insert(t.id.as_str()) {
                return Err(Error::domain("transceiver", format!("duplicate id `{}`", t.id)));
            }
        }
        let mut hasher = Sha256::new();
        hasher.update(to_converter_csv_rows(&records).as_bytes());
        hasher.update(to_transceiver_csv_rows(&transceivers).as_bytes());
        Ok(Dataset {
            records,
            transceivers,
            provenance: Provenance {
                source: None,
                parsed_at: SystemTime::now(),
                content_sha256: hex::encode(hasher.finalize()),
            },
        })
    }

    pub fn empty() -> Self {
        Dataset {
            records: Vec::new(),
            transceivers: Vec::new(),
            provenance: Provenance::of_text(""),
        }
    }

    pub fn records(&self) -> &[SurveyRecord] {
        &self.records
    }

    pub fn transceivers(&self) -> &[TransceiverRecord] {
        &self.transceivers
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&SurveyRecord> {
        self.records.iter().find(|r| r.id == id)
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.provenance.source = Some(source.into());
        self
    }

    /// Combines the converter records of `self` with the transceiver records
    /// of `other`.
    pub fn with_transceivers_of(mut self, other: &Dataset) -> Self {
        self.transceivers = other.transceivers.clone();
        let mut hasher = Sha256::new();
        hasher.update(self.provenance.content_sha256.as_bytes());
        hasher.update(other.provenance.content_sha256.as_bytes());
        self.provenance.content_sha256 = hex::encode(hasher.finalize());
        self
    }

    fn derived(&self, records: Vec<SurveyRecord>) -> Self {
        Dataset {
            records,
            transceivers: self.transceivers.clone(),
            provenance: self.provenance.clone(),
        }
    }
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

/// Maps schema columns to their position in the document header, reporting
/// extra columns as warnings.
fn map_header(rdr: &mut csv::Reader<&[u8]>, schema: &[&str], issues: &mut Vec<ParseIssue>) -> Result<Vec<usize>> {
    let header = rdr.headers().map_err(|e| Error::Unreadable(e.to_string()))?.clone();
    if header.is_empty() || header.iter().all(|h| h.is_empty()) {
        return Err(Error::MissingHeader);
    }
    let names: Vec<String> = header
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').to_ascii_lowercase())
        .collect();
    let mut positions = Vec::with_capacity(schema.len());
    for col in schema {
        let pos = names
            .iter()
            .position(|h| h == col)
            .ok_or_else(|| Error::MissingColumn((*col).to_string()))?;
        positions.push(pos);
    }
    for (i, name) in names.iter().enumerate() {
        if !positions.contains(&i) {
            issues.push(ParseIssue {
                row: 1,
                column: name.clone(),
                severity: Severity::Warning,
                message: "unknown column ignored".into(),
            });
        }
    }
    Ok(positions)
}

struct Row<'a> {
    record: &'a csv::StringRecord,
    positions: &'a [usize],
    schema: &'a [&'a str],
    line: u64,
}

type CellResult<T> = std::result::Result<T, ParseIssue>;

impl Row<'_> {
    fn cell(&self, col: usize) -> Option<&str> {
        self.record.get(self.positions[col]).filter(|s| !s.is_empty())
    }

    fn fatal(&self, col: usize, message: impl Into<String>) -> ParseIssue {
        ParseIssue {
            row: self.line,
            column: self.schema[col].to_string(),
            severity: Severity::Fatal,
            message: message.into(),
        }
    }

    fn required(&self, col: usize) -> CellResult<&str> {
        self.cell(col).ok_or_else(|| self.fatal(col, "missing required value"))
    }

    fn number(&self, col: usize, raw: &str) -> CellResult<f64> {
        let v = f64::from_str(raw).map_err(|_| self.fatal(col, format!("`{raw}` is not a number")))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.fatal(col, format!("`{raw}` is not finite")))
        }
    }

    fn required_number(&self, col: usize) -> CellResult<f64> {
        let raw = self.required(col)?;
        self.number(col, raw)
    }

    fn optional_number(&self, col: usize) -> CellResult<Option<f64>> {
        self.cell(col).map(|raw| self.number(col, raw)).transpose()
    }

    fn year(&self, col: usize) -> CellResult<i32> {
        let raw = self.required(col)?;
        i32::from_str(raw).map_err(|_| self.fatal(col, format!("`{raw}` is not an integer year")))
    }
}

fn column_index(schema: &[&str], name: &str) -> usize {
    schema.iter().position(|c| *c == name).expect("schema column")
}

/// Parses a converter survey CSV document.
///
/// Returns the dataset of well-formed rows plus every issue found. A missing
/// header, a header lacking a schema column, or malformed CSV framing is a
/// document-level error.
pub fn parse_converter_csv(text: &str) -> Result<(Dataset, Vec<ParseIssue>)> {
    let schema = &CONVERTER_COLUMNS;
    let mut issues = Vec::new();
    let mut rdr = reader(text);
    let positions = map_header(&mut rdr, schema, &mut issues)?;
    let mut records = Vec::new();
    let mut seen = HashSet::new();

    for result in rdr.records() {
        let sr = result.map_err(|e| Error::Unreadable(e.to_string()))?;
        let line = sr.position().map_or(0, |p| p.line());
        if sr.iter().all(|c| c.is_empty()) {
            continue;
        }
        let row = Row {
            record: &sr,
            positions: &positions,
            schema,
            line,
        };
        match converter_row(&row, &mut issues) {
            Ok(rec) => {
                if let Err((column, message)) = rec.validate() {
                    issues.push(ParseIssue {
                        row: line,
                        column: column.into(),
                        severity: Severity::Fatal,
                        message,
                    });
                } else if !seen.insert(rec.id.clone()) {
                    issues.push(row.fatal(0, format!("duplicate id `{}`", rec.id)));
                } else {
                    records.push(rec);
                }
            }
            Err(issue) => issues.push(issue),
        }
    }

    let ds = Dataset {
        records,
        transceivers: Vec::new(),
        provenance: Provenance::of_text(text),
    };
    Ok((ds, issues))
}

fn converter_row(row: &Row<'_>, issues: &mut Vec<ParseIssue>) -> CellResult<SurveyRecord> {
    let c = |name| column_index(&CONVERTER_COLUMNS, name);
    let architecture = row.cell(c("architecture")).map(Architecture::parse);
    if let Some(arch) = &architecture {
        if !arch.is_known() {
            issues.push(ParseIssue {
                row: row.line,
                column: "architecture".into(),
                severity: Severity::Warning,
                message: format!("unrecognised architecture `{arch}` kept as-is"),
            });
        }
    }
    Ok(SurveyRecord {
        id: row.required(c("id"))?.to_string(),
        year: row.year(c("year"))?,
        venue: row.cell(c("venue")).map(str::to_string),
        architecture,
        tech_node: row.optional_number(c("tech_nm"))?,
        power: row.required_number(c("power_w"))?,
        sample_rate: row.required_number(c("fs_hz"))?,
        sndr: row.optional_number(c("sndr_db"))?,
        enob: row.optional_number(c("enob"))?,
        area: row.optional_number(c("area_mm2"))?,
        notes: row.cell(c("notes")).map(str::to_string),
    })
}

/// Parses a transceiver survey CSV document; same contract as
/// [`parse_converter_csv`].
pub fn parse_transceiver_csv(text: &str) -> Result<(Dataset, Vec<ParseIssue>)> {
    let schema = &TRANSCEIVER_COLUMNS;
    let mut issues = Vec::new();
    let mut rdr = reader(text);
    let positions = map_header(&mut rdr, schema, &mut issues)?;
    let mut transceivers = Vec::new();
    let mut seen = HashSet::new();

    for result in rdr.records() {
        let sr = result.map_err(|e| Error::Unreadable(e.to_string()))?;
        let line = sr.position().map_or(0, |p| p.line());
        if sr.iter().all(|c| c.is_empty()) {
            continue;
        }
        let row = Row {
            record: &sr,
            positions: &positions,
            schema,
            line,
        };
        let parsed = (|| -> CellResult<TransceiverRecord> {
            Ok(TransceiverRecord {
                id: row.required(0)?.to_string(),
                year: row.year(1)?,
                bitrate: row.required_number(2)?,
                power: row.required_number(3)?,
                area: row.required_number(4)?,
            })
        })();
        match parsed {
            Ok(rec) => {
                if let Err((column, message)) = rec.validate() {
                    issues.push(ParseIssue {
                        row: line,
                        column: column.into(),
                        severity: Severity::Fatal,
                        message,
                    });
                } else if !seen.insert(rec.id.clone()) {
                    issues.push(row.fatal(0, format!("duplicate id `{}`", rec.id)));
                } else {
                    transceivers.push(rec);
                }
            }
            Err(issue) => issues.push(issue),
        }
    }

    let ds = Dataset {
        records: Vec::new(),
        transceivers,
        provenance: Provenance::of_text(text),
    };
    Ok((ds, issues))
}

fn opt_num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn to_converter_csv_rows(records: &[SurveyRecord]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CONVERTER_COLUMNS).expect("in-memory write");
    for r in records {
        w.write_record([
            r.id.clone(),
            r.year.to_string(),
            r.venue.clone().unwrap_or_default(),
            r.architecture.as_ref().map(|a| a.to_string()).unwrap_or_default(),
            opt_num(r.tech_node),
            format!("{:e}", r.power),
            format!("{:e}", r.sample_rate),
            opt_num(r.sndr),
            opt_num(r.enob),
            opt_num(r.area),
            r.notes.clone().unwrap_or_default(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

fn to_transceiver_csv_rows(records: &[TransceiverRecord]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(TRANSCEIVER_COLUMNS).expect("in-memory write");
    for t in records {
        w.write_record([
            t.id.clone(),
            t.year.to_string(),
            format!("{:e}", t.bitrate),
            format!("{:e}", t.power),
            t.area.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 output")
}

/// Serialises the converter records in the canonical schema. Numbers are
/// written in shortest round-trip form.
pub fn to_converter_csv(dataset: &Dataset) -> String {
    to_converter_csv_rows(&dataset.records)
}

pub fn to_transceiver_csv(dataset: &Dataset) -> String {
    to_transceiver_csv_rows(&dataset.transceivers)
}

/// Record fields a filter condition may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Year,
    TechNode,
    Power,
    SampleRate,
    Sndr,
    /// Reported ENOB, or ENOB derived from SNDR.
    Enob,
    Area,
    Architecture,
    Venue,
}

impl Field {
    pub fn from_name(name: &str) -> Result<Self> {
        Ok(match name.trim() {
            "year" => Field::Year,
            "tech_nm" | "tech_node" => Field::TechNode,
            "power_w" | "power" => Field::Power,
            "fs_hz" | "sample_rate" => Field::SampleRate,
            "sndr_db" | "sndr" => Field::Sndr,
            "enob" => Field::Enob,
            "area_mm2" | "area" => Field::Area,
            "architecture" => Field::Architecture,
            "venue" => Field::Venue,
            other => return Err(Error::UnknownField(other.to_string())),
        })
    }

    fn numeric(self, r: &SurveyRecord) -> Option<f64> {
        match self {
            Field::Year => Some(f64::from(r.year)),
            Field::TechNode => r.tech_node,
            Field::Power => Some(r.power),
            Field::SampleRate => Some(r.sample_rate),
            Field::Sndr => r.sndr,
            Field::Enob => r.effective_enob(),
            Field::Area => r.area,
            Field::Architecture | Field::Venue => None,
        }
    }

    fn text(self, r: &SurveyRecord) -> Option<String> {
        match self {
            Field::Architecture => r.architecture.as_ref().map(|a| a.to_string()),
            Field::Venue => r.venue.clone(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    fn holds<T: PartialOrd>(self, a: T, b: T) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Number(f64),
    Text(String),
}

/// A single `field op value` test. A record lacking the field never
/// satisfies the condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub field: Field,
    pub op: CmpOp,
    pub value: Operand,
}

impl Condition {
    pub fn new(field: &str, op: CmpOp, value: Operand) -> Result<Self> {
        Ok(Condition {
            field: Field::from_name(field)?,
            op,
            value,
        })
    }

    /// Parses `year>=2014`, `enob<=4`, `architecture==SAR` and the like.
    pub fn parse(s: &str) -> Result<Self> {
        const OPS: [(&str, CmpOp); 7] = [
            (">=", CmpOp::Ge),
            ("<=", CmpOp::Le),
            ("==", CmpOp::Eq),
            ("!=", CmpOp::Ne),
            (">", CmpOp::Gt),
            ("<", CmpOp::Lt),
            ("=", CmpOp::Eq),
        ];
        for (tok, op) in OPS {
            if let Some(i) = s.find(tok) {
                let field = Field::from_name(&s[..i])?;
                let raw = s[i + tok.len()..].trim();
                let value = match field {
                    Field::Architecture | Field::Venue => Operand::Text(raw.to_string()),
                    _ => Operand::Number(
                        f64::from_str(raw)
                            .map_err(|_| Error::domain("condition", format!("`{raw}` is not a number")))?,
                    ),
                };
                return Ok(Condition { field, op, value });
            }
        }
        Err(Error::domain("condition", format!("no comparison operator in `{s}`")))
    }

    pub fn matches(&self, r: &SurveyRecord) -> bool {
        match &self.value {
            Operand::Number(v) => self.field.numeric(r).is_some_and(|x| self.op.holds(x, *v)),
            Operand::Text(t) => self
                .field
                .text(r)
                .is_some_and(|x| self.op.holds(x.to_ascii_lowercase(), t.to_ascii_lowercase())),
        }
    }
}

/// Conjunction of conditions, optionally negated as a whole.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Predicate {
    pub conditions: Vec<Condition>,
    pub negated: bool,
}

impl Predicate {
    pub fn all(conditions: Vec<Condition>) -> Self {
        Predicate {
            conditions,
            negated: false,
        }
    }

    /// Parses a comma-separated list of conditions.
    pub fn parse(s: &str) -> Result<Self> {
        let conditions = s
            .split(',')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(Condition::parse)
            .collect::<Result<Vec<_>>>()?;
        Ok(Predicate::all(conditions))
    }

    pub fn negate(&self) -> Self {
        Predicate {
            conditions: self.conditions.clone(),
            negated: !self.negated,
        }
    }

    pub fn matches(&self, r: &SurveyRecord) -> bool {
        self.conditions.iter().all(|c| c.matches(r)) != self.negated
    }
}

/// Returns the records satisfying `predicate`. Transceiver records are
/// carried over unchanged.
pub fn filter_records(dataset: &Dataset, predicate: &Predicate) -> Dataset {
    dataset.derived(
        dataset
            .records
            .iter()
            .filter(|r| predicate.matches(r))
            .cloned()
            .collect(),
    )
}
