use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use super::text::{scenario_text, table};
use super::{
    budget_text, default_scale, emit_scatter_svg, emit_series, format_full, format_sig, format_year, frontier_csv,
    frontier_text, gap_csv, gap_text, metrics_csv, metrics_text, Geometry, Overlay, PlotSpec, Scale, Split,
};
use crate::budget::{cascade, density_comparison};
use crate::config::{parse_config, Config};
use crate::dataset::{
    filter_records, parse_converter_csv, parse_transceiver_csv, to_converter_csv, to_transceiver_csv, Dataset,
    Predicate, Severity,
};
use crate::error::Error;
use crate::frontier::{pareto_frontier, Objective};
use crate::gap::{
    evaluate_transceiver, feasibility_assessment, fitted_trends, gap_report, preset, Preset, RequirementSpec,
};
use crate::metrics::{Direction, MetricKey};
use crate::trends::{
    fit_on_subset, reference_trend, threshold_year, Axis, Fit, Goal, Projection, ReferenceLaw, Selector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Svg,
    Text,
}

/// Data-converter survey analytics.
#[derive(Debug, Parser)]
#[command(name = "convgap", version, about)]
struct Cli {
    /// Converter survey CSV.
    #[arg(long, global = true, value_name = "CSV")]
    data: Option<PathBuf>,
    /// Transceiver survey CSV.
    #[arg(long, global = true, value_name = "CSV")]
    transceivers: Option<PathBuf>,
    /// Flat key = value configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory for output files. Without it the result goes to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Stdout format; defaults to text (svg for plot).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Oversampling ratio applied to every record.
    #[arg(long, global = true, default_value_t = 1.0)]
    osr: f64,
    /// Record filter such as `year>=2010,architecture=SAR`.
    #[arg(long, global = true, value_name = "PREDICATE")]
    filter: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate survey files and write them back in canonical form.
    Ingest,
    /// Derived figures of merit for every record.
    Metrics,
    /// Area, power and energy budget of the wireless link.
    Budget {
        /// Overrides policy.target_datarate_bps.
        #[arg(long, value_name = "BPS")]
        datarate: Option<f64>,
    },
    /// Pareto-optimal records.
    Frontier {
        /// Comma-separated `metric:max|min` list.
        #[arg(long, value_delimiter = ',', default_value = "bandwidth_hz:max,ebit_j:min")]
        objectives: Vec<String>,
    },
    /// Doubling-time or power-law fit, with an optional projection.
    Trend {
        #[arg(long, default_value = "fs_2enob")]
        metric: String,
        /// year or tech
        #[arg(long, default_value = "year")]
        axis: String,
        /// all, frontier or yearly_best
        #[arg(long, default_value = "yearly_best")]
        selector: String,
        /// Value to project the trend to (SI units).
        #[arg(long)]
        threshold: Option<f64>,
        /// Named published tendency to report alongside the fit.
        #[arg(long)]
        reference: Option<String>,
    },
    /// Judge records against a requirement spec.
    Gap {
        /// table2-adc, table2-adc-1bit or table1-scenario. Defaults to the
        /// config file's spec.
        #[arg(long)]
        spec: Option<String>,
    },
    /// Series CSV and SVG scatter plot.
    Plot {
        /// Metric on the horizontal axis.
        #[arg(long)]
        x: String,
        /// Metric on the vertical axis.
        #[arg(long)]
        y: String,
        /// linear or log; defaults by metric.
        #[arg(long)]
        x_scale: Option<String>,
        /// linear or log; defaults by metric.
        #[arg(long)]
        y_scale: Option<String>,
        /// enob:<bits> or arch
        #[arg(long)]
        split: Option<String>,
        /// Aperture-jitter limits to draw, in picoseconds.
        #[arg(long, value_delimiter = ',', value_name = "PS")]
        jitter_ps: Vec<f64>,
        /// Requirement preset to box, or `config`.
        #[arg(long)]
        requirement: Option<String>,
        /// Published tendency drawn through the latest best point.
        #[arg(long)]
        reference: Option<String>,
        /// Draw a fitted trend over points chosen by this selector.
        #[arg(long)]
        fit: Option<String>,
        #[arg(long)]
        title: Option<String>,
        /// Canvas width in pixels.
        #[arg(long, default_value_t = 720.0)]
        width: f64,
        /// Canvas height in pixels.
        #[arg(long, default_value_t = 520.0)]
        height: f64,
        /// Base name of the output files.
        #[arg(long, default_value = "plot")]
        name: String,
    },
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.into())
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runs one command. Returns 0 on success, 1 on a usage error and 2 on a
/// data error.
pub fn run_cli<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{shown}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{shown}");
                    1
                }
            };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(code) => code,
        Err(CliError::Usage(m)) => {
            let _ = writeln!(stderr, "error: {m}\n\nFor more information, try '--help'.");
            1
        }
        Err(CliError::Data(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Data(Error::Io(format!("{}: {e}", path.display()))))
}

struct Loaded {
    dataset: Dataset,
    fatal: usize,
}

fn report_issues(stderr: &mut dyn Write, path: &Path, issues: &[crate::dataset::ParseIssue]) -> usize {
    for i in issues {
        let _ = writeln!(stderr, "{}: {i}", path.display());
    }
    issues.iter().filter(|i| i.severity == Severity::Fatal).count()
}

fn load(cli: &Cli, stderr: &mut dyn Write) -> CliResult<Loaded> {
    let path = cli
        .data
        .as_ref()
        .ok_or_else(|| usage("--data is required for this command"))?;
    let (mut ds, issues) = parse_converter_csv(&read(path)?)?;
    let mut fatal = report_issues(stderr, path, &issues);
    ds = ds.with_source(path.display().to_string());
    if let Some(tp) = &cli.transceivers {
        let (tds, issues) = parse_transceiver_csv(&read(tp)?)?;
        fatal += report_issues(stderr, tp, &issues);
        ds = ds.with_transceivers_of(&tds);
    }
    if let Some(f) = &cli.filter {
        let p = Predicate::parse(f).map_err(usage)?;
        ds = filter_records(&ds, &p);
    }
    Ok(Loaded { dataset: ds, fatal })
}

fn load_config(cli: &Cli) -> CliResult<Config> {
    match &cli.config {
        Some(p) => Ok(parse_config(&read(p)?)?),
        None => Ok(Config::default()),
    }
}

/// Writes files under `--out`, or the chosen stdout rendering.
struct Sink<'a> {
    out: Option<&'a Path>,
    stdout: &'a mut dyn Write,
}

impl Sink<'_> {
    fn file(&mut self, name: &str, contents: &str) -> CliResult<()> {
        if let Some(dir) = self.out {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            fs::write(&path, contents)?;
            writeln!(self.stdout, "wrote {}", path.display())?;
        }
        Ok(())
    }

    fn show(&mut self, text: &str) -> CliResult<()> {
        self.stdout.write_all(text.as_bytes())?;
        Ok(())
    }
}

fn format_of(cli: &Cli, default: Format, allowed: &[Format]) -> CliResult<Format> {
    let f = cli.format.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(usage(
            format!("--format {f:?} is not available for this command").to_lowercase(),
        ))
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<i32> {
    if !(cli.osr >= 1.0 && cli.osr.is_finite()) {
        return Err(usage("--osr must be a finite number of at least 1"));
    }
    let mut sink = Sink {
        out: cli.out.as_deref(),
        stdout,
    };
    let to_files = cli.out.is_some();
    match &cli.command {
        Command::Ingest => {
            let fmt = format_of(cli, Format::Text, &[Format::Text, Format::Csv])?;
            let l = load(cli, stderr)?;
            let ds = &l.dataset;
            if to_files {
                sink.file("converters.csv", &to_converter_csv(ds))?;
                if !ds.transceivers().is_empty() {
                    sink.file("transceivers.csv", &to_transceiver_csv(ds))?;
                }
            } else if fmt == Format::Csv {
                sink.show(&to_converter_csv(ds))?;
            }
            if to_files || fmt == Format::Text {
                sink.show(&format!(
                    "{} converter records, {} transceiver records, {} rows rejected\nsha256 {}\n",
                    ds.len(),
                    ds.transceivers().len(),
                    l.fatal,
                    ds.provenance().content_sha256
                ))?;
            }
            Ok(if l.fatal > 0 { 2 } else { 0 })
        }
        Command::Metrics => {
            let fmt = format_of(cli, Format::Text, &[Format::Text, Format::Csv])?;
            let ds = load(cli, stderr)?.dataset;
            if to_files {
                sink.file("metrics.csv", &metrics_csv(&ds, cli.osr)?)?;
            } else if fmt == Format::Csv {
                sink.show(&metrics_csv(&ds, cli.osr)?)?;
            } else {
                sink.show(&metrics_text(&ds, cli.osr)?)?;
            }
            Ok(0)
        }
        Command::Budget { datarate } => {
            format_of(cli, Format::Text, &[Format::Text])?;
            let mut cfg = load_config(cli)?;
            if let Some(r) = datarate {
                cfg.policy.target_datarate = *r;
            }
            let c = cascade(&cfg.platform, &cfg.policy)?;
            let density = if cli.data.is_some() && cli.transceivers.is_some() {
                let ds = load(cli, stderr)?.dataset;
                Some(density_comparison(&ds, &ds)?)
            } else {
                None
            };
            let text = budget_text(&c, density.as_ref());
            sink.file("budget.txt", &text)?;
            sink.show(&text)?;
            Ok(0)
        }
        Command::Frontier { objectives } => {
            let fmt = format_of(cli, Format::Text, &[Format::Text, Format::Csv])?;
            let objs: Vec<Objective> = objectives
                .iter()
                .map(|o| Objective::parse(o))
                .collect::<Result<_, _>>()
                .map_err(usage)?;
            let ds = load(cli, stderr)?.dataset;
            let f = pareto_frontier(&ds, &objs, cli.osr)?;
            if to_files {
                sink.file("frontier.csv", &frontier_csv(&ds, &objs, &f, cli.osr)?)?;
            } else if fmt == Format::Csv {
                sink.show(&frontier_csv(&ds, &objs, &f, cli.osr)?)?;
            } else {
                sink.show(&frontier_text(&ds, &objs, &f, cli.osr)?)?;
            }
            Ok(0)
        }
        Command::Trend {
            metric,
            axis,
            selector,
            threshold,
            reference,
        } => {
            let fmt = format_of(cli, Format::Text, &[Format::Text, Format::Csv])?;
            let key: MetricKey = metric.parse().map_err(usage)?;
            let axis: Axis = axis.parse().map_err(usage)?;
            let selector: Selector = selector.parse().map_err(usage)?;
            let reference = reference.as_deref().map(reference_trend).transpose().map_err(usage)?;
            if threshold.is_some() && axis != Axis::Year {
                return Err(usage("--threshold needs --axis year"));
            }
            let ds = load(cli, stderr)?.dataset;
            let sub = fit_on_subset(&ds, key, axis, selector, cli.osr)?;
            let mut lines = vec![
                ("metric", key.name().to_string()),
                (
                    "axis",
                    match axis {
                        Axis::Year => "year",
                        Axis::TechNode => "tech",
                    }
                    .to_string(),
                ),
                ("selector", selector.to_string()),
                ("points", sub.points.len().to_string()),
            ];
            match &sub.fit {
                Fit::Doubling(f) => {
                    match (f.doubling_time(), f.halving_time()) {
                        (Some(t), _) => lines.push(("doubling_time_years", format_sig(t))),
                        (_, Some(t)) => lines.push(("halving_time_years", format_sig(t))),
                        _ => lines.push(("trend", "flat".into())),
                    }
                    lines.push(("r_squared", format_sig(f.r_squared)));
                    if let Some(t) = threshold {
                        let pts: Vec<(f64, f64)> = sub.points.iter().map(|p| (p.0, p.1)).collect();
                        let anchor = latest_best(&pts, key.preferred_direction());
                        let goal = Goal::for_direction(key.preferred_direction(), *t);
                        lines.push(("anchor_year", format_year(anchor.0)));
                        lines.push(("anchor_value", format_sig(anchor.1)));
                        lines.push(("threshold", format_sig(*t)));
                        lines.push((
                            "projected_year",
                            match threshold_year(f, anchor, goal)? {
                                Projection::Year(y) => format_year(y),
                                Projection::Unreachable => "unreachable".into(),
                            },
                        ));
                    }
                }
                Fit::PowerLaw(p) => {
                    lines.push(("exponent", format_sig(p.exponent)));
                    lines.push(("r_squared", format_sig(p.r_squared)));
                }
            }
            if let Some(r) = reference {
                let v = match r.law {
                    ReferenceLaw::Period(t) => format!("period {} years", format_sig(t)),
                    ReferenceLaw::Exponent(k) => format!("exponent {}", format_sig(k)),
                };
                lines.push(("reference", format!("{} ({v})", r.name)));
            }
            let text: String = lines.iter().map(|(k, v)| format!("{k}: {v}\n")).collect();
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(Vec::new());
            w.write_record(["x", "y", "id"]).expect("in-memory write");
            for (x, y, id) in &sub.points {
                w.write_record([format_full(*x), format_full(*y), id.clone()])
                    .expect("in-memory write");
            }
            let points_csv = String::from_utf8(w.into_inner().expect("flush")).expect("utf-8");
            if to_files {
                sink.file("trend.txt", &text)?;
                sink.file("trend_points.csv", &points_csv)?;
                sink.show(&text)?;
            } else if fmt == Format::Csv {
                sink.show(&points_csv)?;
            } else {
                sink.show(&text)?;
            }
            Ok(0)
        }
        Command::Gap { spec } => {
            format_of(cli, Format::Text, &[Format::Text, Format::Csv])?;
            let fmt = cli.format.unwrap_or(Format::Text);
            let chosen = match spec {
                Some(name) => preset(name).map_err(usage)?,
                None => match load_config(cli)?.spec {
                    Some(s) => Preset::Converter(s),
                    None => return Err(usage("give --spec or a config file with spec.* keys")),
                },
            };
            let ds = load(cli, stderr)?.dataset;
            match chosen {
                Preset::Scenario(sc) => {
                    if ds.transceivers().is_empty() {
                        return Err(usage("the scenario spec checks transceivers; give --transceivers"));
                    }
                    let verdicts: Vec<_> = ds.transceivers().iter().map(|t| evaluate_transceiver(t, &sc)).collect();
                    let text = scenario_text(&sc, &verdicts);
                    sink.file("scenario_report.txt", &text)?;
                    sink.show(&text)?;
                }
                Preset::Converter(rs) => {
                    let rep = gap_report(&ds, &rs, cli.osr)?;
                    let trends = fitted_trends(&ds, &rep.failing_criteria(), cli.osr)?;
                    let feas = feasibility_assessment(&rep, &trends)?;
                    let text = gap_text(&rep, Some(&feas));
                    if to_files {
                        sink.file("gap_report.txt", &text)?;
                        sink.file("gap_verdicts.csv", &gap_csv(&rep))?;
                        sink.show(&text)?;
                    } else if fmt == Format::Csv {
                        sink.show(&gap_csv(&rep))?;
                    } else {
                        sink.show(&text)?;
                    }
                }
            }
            Ok(0)
        }
        Command::Plot {
            x,
            y,
            x_scale,
            y_scale,
            split,
            jitter_ps,
            requirement,
            reference,
            fit,
            title,
            width,
            height,
            name,
        } => {
            let fmt = format_of(cli, Format::Svg, &[Format::Svg, Format::Csv])?;
            let x_key: MetricKey = x.parse().map_err(usage)?;
            let y_key: MetricKey = y.parse().map_err(usage)?;
            let parse_scale = |s: &Option<String>, k| -> CliResult<Scale> {
                s.as_deref().map_or(Ok(default_scale(k)), |s| s.parse().map_err(usage))
            };
            let mut spec = PlotSpec {
                x_scale: parse_scale(x_scale, x_key)?,
                y_scale: parse_scale(y_scale, y_key)?,
                split: split.as_deref().map(str::parse::<Split>).transpose().map_err(usage)?,
                osr: cli.osr,
                ..PlotSpec::new(x_key, y_key)
            };
            if let Some(t) = title {
                spec.title = t.clone();
            }
            if name.is_empty() || name.contains(['/', '\\']) {
                return Err(usage("--name must be a plain file stem"));
            }
            for ps in jitter_ps {
                if !(*ps > 0.0) {
                    return Err(usage("--jitter-ps values must be positive"));
                }
                spec.overlays.push(Overlay::JitterBound(ps * 1e-12));
            }
            if let Some(r) = requirement {
                let rs: RequirementSpec = if r == "config" {
                    load_config(cli)?
                        .spec
                        .ok_or_else(|| usage("config file has no spec.* keys"))?
                } else {
                    match preset(r).map_err(usage)? {
                        Preset::Converter(s) => s,
                        Preset::Scenario(_) => return Err(usage(format!("`{r}` has no converter thresholds"))),
                    }
                };
                spec.overlays.push(Overlay::RequirementBox(rs));
            }
            let ref_trend = reference.as_deref().map(reference_trend).transpose().map_err(usage)?;
            let selector: Option<Selector> = fit.as_deref().map(str::parse).transpose().map_err(usage)?;
            let fit_axis = match x_key {
                MetricKey::Year => Some(Axis::Year),
                MetricKey::TechNode => Some(Axis::TechNode),
                _ => None,
            };
            if selector.is_some() && fit_axis.is_none() {
                return Err(usage("--fit needs x = year or tech_nm"));
            }

            let ds = load(cli, stderr)?.dataset;
            let series = emit_series(&ds, &spec)?;
            if let (Some(sel), Some(axis)) = (selector, fit_axis) {
                let sub = fit_on_subset(&ds, y_key, axis, sel, cli.osr)?;
                spec.overlays.push(match sub.fit {
                    Fit::Doubling(f) => Overlay::FittedTrend(f),
                    Fit::PowerLaw(p) => Overlay::FittedPowerLaw(p),
                });
            }
            if let Some(trend) = ref_trend {
                let pts: Vec<(f64, f64)> = series.rows.iter().map(|r| (r.x, r.y)).collect();
                spec.overlays.push(Overlay::ReferenceTrend {
                    trend,
                    anchor: latest_best(&pts, y_key.preferred_direction()),
                });
            }
            let geometry = Geometry {
                width: *width,
                height: *height,
                ..Geometry::default()
            };
            let svg = emit_scatter_svg(&series, &spec, &geometry)?;
            let csv = series.to_csv();
            if to_files {
                sink.file(&format!("{name}.csv"), &csv)?;
                sink.file(&format!("{name}.svg"), &svg)?;
                let labels = series.labels();
                let rows: Vec<Vec<String>> = labels
                    .iter()
                    .map(|l| {
                        vec![
                            l.to_string(),
                            series.rows.iter().filter(|r| r.label == *l).count().to_string(),
                        ]
                    })
                    .collect();
                sink.show(&table(&["series", "points"], &rows))?;
            } else if fmt == Format::Csv {
                sink.show(&csv)?;
            } else {
                sink.show(&svg)?;
            }
            Ok(0)
        }
    }
}

/// The point with the largest x, preferring the best y among ties.
fn latest_best(points: &[(f64, f64)], direction: Direction) -> (f64, f64) {
    let mut best = points[0];
    for &p in &points[1..] {
        if p.0 > best.0 || (p.0 == best.0 && direction.better(p.1, best.1)) {
            best = p;
        }
    }
    best
}
