use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use convgap::dataset::parse_converter_csv;
use convgap::metrics::MetricKey;
use convgap::report::format_sig;
use convgap::trends::{fit_on_subset, threshold_year, Axis, Fit, Goal, Projection, Selector};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convgap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
}

#[test]
fn gap_happy_path_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = data("adc_sample.csv");
    let o = run(&[
        "gap",
        "--data",
        d.to_str().unwrap(),
        "--spec",
        "table2-adc",
        "--osr",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = std::fs::read_to_string(dir.path().join("gap_report.txt")).unwrap();
    assert!(report.contains("0 of 45 records pass every criterion"));
    let verdicts = std::fs::read_to_string(dir.path().join("gap_verdicts.csv")).unwrap();
    assert_eq!(verdicts.lines().count(), 46);
    let xu = verdicts.lines().find(|l| l.starts_with("xu17,")).unwrap();
    assert!(xu.starts_with("xu17,pass,1.2e0,pass,1.2e0,pass,1e0,pass,"), "{xu}");
    assert!(xu.ends_with(",fail"));
}

#[test]
fn trend_prints_fit_and_projection_matching_library() {
    let d = data("adc_sample.csv");
    let o = run(&[
        "trend",
        "--data",
        d.to_str().unwrap(),
        "--metric",
        "ebit",
        "--selector",
        "yearly_best",
        "--threshold",
        "1e-13",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);

    let ds = parse_converter_csv(&std::fs::read_to_string(&d).unwrap()).unwrap().0;
    let sub = fit_on_subset(&ds, MetricKey::SingleBitEnergy, Axis::Year, Selector::YearlyBest, 1.0).unwrap();
    let Fit::Doubling(fit) = &sub.fit else { panic!() };
    let last = sub.points.last().unwrap();
    let Projection::Year(y) = threshold_year(fit, (last.0, last.1), Goal::AtMost(1e-13)).unwrap() else {
        panic!()
    };
    assert_eq!(
        field(&text, "halving_time_years"),
        format_sig(fit.halving_time().unwrap())
    );
    assert_eq!(field(&text, "r_squared"), format_sig(fit.r_squared));
    assert_eq!(field(&text, "projected_year"), format!("{y:.1}"));
    assert_eq!(field(&text, "points"), sub.points.len().to_string());
}

#[test]
fn growing_metric_projects_forward() {
    let d = data("adc_sample.csv");
    let o = run(&[
        "trend",
        "--data",
        d.to_str().unwrap(),
        "--metric",
        "fs_2enob",
        "--threshold",
        "1e30",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let y: f64 = field(&stdout(&o), "projected_year").parse().unwrap();
    assert!(y > 2018.0);
}

#[test]
fn usage_errors_exit_one() {
    let o = run(&["gap", "--spec", "table2-adc"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--data"));

    let o = run(&["explode"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).to_lowercase().contains("usage"));

    let d = data("adc_sample.csv");
    let d = d.to_str().unwrap();
    for args in [
        vec!["metrics", "--data", d, "--no-such-flag"],
        vec!["trend", "--data", d, "--metric", "colour"],
        vec!["gap", "--data", d, "--spec", "table9"],
        vec!["frontier", "--data", d, "--objectives", "ebit:sideways"],
        vec!["plot", "--data", d, "--x", "year", "--y", "ebit", "--split", "bogus"],
        vec!["metrics", "--data", d, "--filter", "colour=red"],
        vec!["metrics", "--data", d, "--format", "svg"],
        vec!["metrics", "--data", d, "--osr", "0.5"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "id,year\nx,2010\n").unwrap();
    let o = run(&["metrics", "--data", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing required column"));

    let o = run(&["metrics", "--data", dir.path().join("absent.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let d = data("adc_sample.csv");
    let o = run(&[
        "gap",
        "--data",
        d.to_str().unwrap(),
        "--spec",
        "table2-adc",
        "--osr",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(2), "max_osr is 4");
}

#[test]
fn ingest_reports_rejected_rows() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("s.csv");
    std::fs::write(
        &src,
        "id,year,venue,architecture,tech_nm,power_w,fs_hz,sndr_db,enob,area_mm2,notes\n\
         a,2010,ISSCC,SAR,65,0.01,1e9,,6,0.1,\n\
         b,2011,ISSCC,SAR,65,-1,1e9,,6,0.1,\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "ingest",
        "--data",
        src.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"));
    assert!(stdout(&o).contains("1 rows rejected"));
    let canon = std::fs::read_to_string(out.join("converters.csv")).unwrap();
    assert_eq!(canon.lines().count(), 2);

    // the canonical form re-ingests cleanly and unchanged
    let again = dir.path().join("again");
    let o = run(&[
        "ingest",
        "--data",
        out.join("converters.csv").to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(again.join("converters.csv")).unwrap(), canon);
}

#[test]
fn config_drives_budget_and_gap() {
    let conf = data("wnoc.conf");
    let o = run(&["budget", "--config", conf.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("3.500 pJ/bit"));

    let d = data("adc_sample.csv");
    let o = run(&["gap", "--data", d.to_str().unwrap(), "--config", conf.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("spec table2-adc"));

    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("c.conf");
    std::fs::write(&c, "platform.cores = 12\n").unwrap();
    assert_eq!(run(&["budget", "--config", c.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn scenario_checks_transceivers() {
    let d = data("adc_sample.csv");
    let t = data("transceiver_sample.csv");
    let o = run(&[
        "gap",
        "--data",
        d.to_str().unwrap(),
        "--transceivers",
        t.to_str().unwrap(),
        "--spec",
        "table1-scenario",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("transceivers comply"));
    let o = run(&["gap", "--data", d.to_str().unwrap(), "--spec", "table1-scenario"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn plot_svg_is_well_formed() {
    let d = data("adc_sample.csv");
    let o = run(&[
        "plot",
        "--data",
        d.to_str().unwrap(),
        "--x",
        "bandwidth_hz",
        "--y",
        "enob",
        "--jitter-ps",
        "0.1,1",
        "--requirement",
        "table2-adc",
        "--title",
        "aperture <plot> & jitter",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = stdout(&o);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert!(doc.root_element().attribute("viewBox").is_some());
    assert_eq!(
        doc.descendants()
            .filter(|n| n.attribute("class") == Some("jitter"))
            .count(),
        2
    );
    assert!(doc.descendants().any(|n| n.attribute("class") == Some("requirement")));
    // records without a resolution figure are not plotted
    let circles = doc.descendants().filter(|n| n.has_tag_name("circle")).count();
    assert_eq!(circles, 42);
}

#[test]
fn plot_csv_carries_provenance() {
    let d = data("adc_sample.csv");
    let o = run(&[
        "plot",
        "--data",
        d.to_str().unwrap(),
        "--x",
        "tech_nm",
        "--y",
        "ebit_j",
        "--format",
        "csv",
        "--split",
        "arch",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("# dataset_sha256: ")));
    assert!(text.lines().any(|l| l == "x,y,id,year,series"));
}

#[test]
fn frontier_and_metrics_outputs() {
    let d = data("adc_sample.csv");
    let o = run(&["frontier", "--data", d.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("id,year,bandwidth_hz:max,ebit_j:min\n"));
    assert!(text.contains("\nxu17,") && text.contains("\nkull_2014,"));

    let o = run(&[
        "metrics",
        "--data",
        d.to_str().unwrap(),
        "--filter",
        "year>=2017",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(1).unwrap().parse::<i32>().unwrap() >= 2017));
}
