//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use convgap::budget::{cascade, density_comparison, AllocationPolicy, PlatformSpec};
use convgap::dataset::{parse_converter_csv, parse_transceiver_csv, Dataset, SurveyRecord};
use convgap::frontier::pareto_indices;
use convgap::gap::{gap_report, Criterion, Outcome, RequirementSpec};
use convgap::metrics::{
    derive_all, enob_from_sndr, jitter_enob_limit, jitter_snr_limit, min_single_bit_energy, sndr_from_enob, Direction,
    DEFAULT_TEMPERATURE,
};
use convgap::trends::{fit_doubling, fit_power_law, threshold_year, Goal, Projection, TrendFit};

type Check = Result<String, String>;
type CheckFn = fn() -> Check;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn sample() -> Dataset {
    let conv = parse_converter_csv(&std::fs::read_to_string(data("adc_sample.csv")).unwrap())
        .unwrap()
        .0;
    let trx = parse_transceiver_csv(&std::fs::read_to_string(data("transceiver_sample.csv")).unwrap())
        .unwrap()
        .0;
    conv.with_transceivers_of(&trx)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn metrics_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let p = 10f64.powf(rng.gen_range(-5.0..0.5));
        let fs = 10f64.powf(rng.gen_range(4.0..11.0));
        let osr = if rng.gen_bool(0.5) {
            1.0
        } else {
            rng.gen_range(1.0..256.0)
        };
        let area = 10f64.powf(rng.gen_range(-3.0..1.0));
        let enob = rng.gen_range(1.0..20.0);
        let r = SurveyRecord {
            enob: Some(enob),
            area: Some(area),
            ..SurveyRecord::new(format!("r{i}"), 2010, p, fs)
        };
        let m = derive_all(&r, osr).map_err(|e| e.to_string())?;
        // direct evaluation
        let bw = fs / (2.0 * osr);
        let sndr = 6.02 * enob + 1.76;
        let pairs = [
            (m.bandwidth, bw),
            (m.single_bit_energy, p / bw),
            (m.sampling_density.unwrap(), (fs / osr) / area),
            (m.sndr.unwrap(), sndr),
            (m.schreier_fom.unwrap(), sndr + 10.0 * (fs / (2.0 * p)).log10()),
            (enob_from_sndr(sndr), enob),
            (sndr_from_enob(enob).unwrap(), sndr),
        ];
        for (got, want) in pairs {
            worst = worst.max(rel(got, want));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if worst < 1e-9 && elapsed < 1.0 {
        Ok(format!("max rel err {worst:.2e}, {elapsed:.3} s"))
    } else {
        Err(format!("max rel err {worst:.2e}, {elapsed:.3} s"))
    }
}

fn budget_exact() -> Check {
    let c = cascade(&PlatformSpec::reference_manycore(), &AllocationPolicy::default()).map_err(|e| e.to_string())?;
    let slow = cascade(
        &PlatformSpec::reference_manycore(),
        &AllocationPolicy {
            target_datarate: 10e9,
            ..AllocationPolicy::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let got = [
        c.per_core_area,
        c.per_core_power,
        c.noc_area,
        c.noc_power,
        c.wireless_area,
        c.wireless_power,
        c.wireless_energy_per_bit,
        slow.wireless_energy_per_bit,
    ];
    let want = [4.5, 2.1, 1.5, 0.7, 0.75, 0.35, 3.5e-12, 35e-12];
    if got == want {
        Ok(format!("{got:?}"))
    } else {
        Err(format!("got {got:?}, want {want:?}"))
    }
}

fn fundamental_limit() -> Check {
    let e = min_single_bit_energy(sndr_from_enob(4.0).unwrap(), DEFAULT_TEMPERATURE).map_err(|e| e.to_string())?;
    let ratio = 1e-13 / e;
    let msg = format!("E_bit,min {e:.4e} J/bit, ratio to 0.1 pJ/bit {ratio:.1}");
    if rel(e, 2.54e-17) < 0.005 && (1e3..=1e4).contains(&ratio) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn brute_force(points: &[Vec<f64>], dirs: &[Direction]) -> Vec<usize> {
    let dominates = |a: &[f64], b: &[f64]| {
        let mut strict = false;
        for ((x, y), d) in a.iter().zip(b).zip(dirs) {
            let (x, y) = match d {
                Direction::Maximize => (*x, *y),
                Direction::Minimize => (-*x, -*y),
            };
            if x < y {
                return false;
            }
            if x > y {
                strict = true;
            }
        }
        strict
    };
    (0..points.len())
        .filter(|&i| !(0..points.len()).any(|j| j != i && dominates(&points[j], &points[i])))
        .collect()
}

fn pareto_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let start = Instant::now();
    for inst in 0..100 {
        let n = rng.gen_range(1..=500);
        let d = rng.gen_range(2..=4);
        let coarse = inst % 3 == 0;
        let dirs: Vec<Direction> = (0..d)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    Direction::Maximize
                } else {
                    Direction::Minimize
                }
            })
            .collect();
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        if coarse {
                            f64::from(rng.gen_range(0..6))
                        } else {
                            rng.gen_range(-1e3..1e3)
                        }
                    })
                    .collect()
            })
            .collect();
        let mut got = pareto_indices(&points, &dirs);
        got.sort_unstable();
        let want = brute_force(&points, &dirs);
        if got != want {
            return Err(format!("instance {inst} (n={n}, d={d}) differs"));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed < 5.0 {
        Ok(format!("100 instances equal, {elapsed:.2} s"))
    } else {
        Err(format!("too slow: {elapsed:.2} s"))
    }
}

fn trend_recovery() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_exact = 0.0f64;
    let mut worst_r2 = 0.0f64;
    let mut worst_noisy = 0.0f64;
    for &t in &[1.5, 1.8, 2.0, 4.0, 7.5, -1.8, -3.0] {
        let clean: Vec<(f64, f64)> = (0..20)
            .map(|i| {
                let y = 1990.0 + f64::from(i);
                (y, 5e9 * (f64::from(i) / t).exp2())
            })
            .collect();
        let f = fit_doubling(&clean).map_err(|e| e.to_string())?;
        worst_exact = worst_exact.max(rel(f.period(), t));
        worst_r2 = worst_r2.max((1.0 - f.r_squared).abs());
        let noisy: Vec<(f64, f64)> = clean
            .iter()
            .map(|&(y, v)| (y, v * (1.0 + rng.gen_range(-0.05..0.05))))
            .collect();
        worst_noisy = worst_noisy.max(rel(fit_doubling(&noisy).map_err(|e| e.to_string())?.period(), t));
    }
    let pl: Vec<(f64, f64)> = [16.0f64, 28.0, 40.0, 65.0]
        .iter()
        .map(|&l| (l, 2.0 * l.powf(1.7)))
        .collect();
    let k = fit_power_law(&pl).map_err(|e| e.to_string())?.exponent;
    let msg = format!(
        "noiseless {worst_exact:.1e} (1-r² {worst_r2:.1e}), 5% noise {:.2}%, exponent {k}",
        worst_noisy * 100.0
    );
    if worst_exact < 1e-6 && worst_r2 < 1e-12 && worst_noisy < 0.10 && rel(k, 1.7) < 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn feasibility() -> Check {
    let fit = TrendFit::from_period(-1.8, 2018, 1.92e-12).map_err(|e| e.to_string())?;
    match threshold_year(&fit, (2018.0, 1.92e-12), Goal::AtMost(1e-13)).map_err(|e| e.to_string())? {
        Projection::Year(y) if (y - 2025.7).abs() <= 0.1 && (2023.0..=2028.0).contains(&y) => {
            Ok(format!("threshold year {y:.3}"))
        }
        other => Err(format!("{other:?}")),
    }
}

fn gap_on_sample() -> Check {
    let rep = gap_report(&sample(), &RequirementSpec::table2_adc(), 1.0).map_err(|e| e.to_string())?;
    let xu = rep.verdict("xu17").ok_or("xu17 missing")?;
    let energy = xu.get(Criterion::Energy);
    let shortfall = 1.0 / energy.margin.ok_or("no energy margin")?;
    let ok = rep.overall_pass == 0
        && xu.get(Criterion::Area).outcome == Outcome::Pass
        && xu.get(Criterion::Bandwidth).outcome == Outcome::Pass
        && energy.outcome == Outcome::Fail
        && rel(shortfall, 1.92) <= 0.01;
    let msg = format!(
        "{} overall passes; xu17 area {}, bandwidth {}, energy {} short by {shortfall:.4}x",
        rep.overall_pass,
        xu.get(Criterion::Area).outcome,
        xu.get(Criterion::Bandwidth).outcome,
        energy.outcome
    );
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn jitter_bound() -> Check {
    let snr = jitter_snr_limit(10e9, 0.1e-12).map_err(|e| e.to_string())?;
    let enob = jitter_enob_limit(10e9, 0.1e-12).map_err(|e| e.to_string())?;
    let fs: Vec<f64> = (0..10).map(|i| 1e8 * 2f64.powi(i)).collect();
    let sigmas: Vec<f64> = (0..10).map(|i| 1e-14 * 2f64.powi(i)).collect();
    let mut grid = vec![vec![0.0; 10]; 10];
    for (i, f) in fs.iter().enumerate() {
        for (j, s) in sigmas.iter().enumerate() {
            grid[i][j] = jitter_snr_limit(*f, *s).map_err(|e| e.to_string())?;
        }
    }
    let monotone = (0..10).all(|i| (1..10).all(|j| grid[i][j] < grid[i][j - 1]))
        && (0..10).all(|j| (1..10).all(|i| grid[i][j] < grid[i - 1][j]));
    let msg = format!("SNR {snr:.4} dB, ENOB {enob:.4}, grid monotone {monotone}");
    if (snr - 44.04).abs() <= 0.01 && (enob - 7.02).abs() <= 0.01 && monotone {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn density_ratio() -> Check {
    let ds = sample();
    let d = density_comparison(&ds, &ds).map_err(|e| e.to_string())?;
    let msg = format!(
        "{} at {:.3e} vs {} at {:.3e}: ratio {:.3}",
        d.converter_id, d.converter_density, d.transceiver_id, d.transceiver_density, d.ratio
    );
    if (3.0..=30.0).contains(&d.ratio) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn hash_dir(dir: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let bytes = std::fs::read(&p).unwrap();
        out.insert(
            p.file_name().unwrap().to_string_lossy().into_owned(),
            hex::encode(Sha256::digest(bytes)),
        );
    }
    out
}

fn determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_convgap");
    let conv = data("adc_sample.csv");
    let trx = data("transceiver_sample.csv");
    let runs: [&[&str]; 4] = [
        &[
            "plot",
            "--x",
            "bandwidth_hz",
            "--y",
            "ebit_j",
            "--split",
            "enob:4",
            "--requirement",
            "table2-adc",
            "--name",
            "energy",
        ],
        &[
            "plot",
            "--x",
            "year",
            "--y",
            "fs_2enob",
            "--fit",
            "yearly_best",
            "--reference",
            "speed-resolution-4yr",
            "--name",
            "speed",
        ],
        &["gap", "--spec", "table2-adc"],
        &["metrics"],
    ];
    let mut digests = Vec::new();
    for _ in 0..2 {
        let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
        for args in runs {
            let status = Command::new(bin)
                .args(args)
                .arg("--data")
                .arg(&conv)
                .arg("--transceivers")
                .arg(&trx)
                .arg("--out")
                .arg(tmp.path())
                .output()
                .map_err(|e| e.to_string())?;
            if !status.status.success() {
                return Err(format!("{args:?} failed: {}", String::from_utf8_lossy(&status.stderr)));
            }
        }
        digests.push(hash_dir(tmp.path()));
    }
    let n = digests[0].len();
    let has_svg = digests[0].keys().any(|k| k.ends_with(".svg"));
    let has_csv = digests[0].keys().any(|k| k.ends_with(".csv"));
    if digests[0] == digests[1] && has_svg && has_csv {
        Ok(format!("{n} artifacts byte-identical across runs"))
    } else {
        Err(format!("digests differ or artifacts missing: {digests:?}"))
    }
}

fn main() {
    let criteria: [(&str, CheckFn); 10] = [
        ("metrics match direct-evaluation oracle", metrics_oracle),
        ("budget cascade exact", budget_exact),
        ("fundamental energy limit", fundamental_limit),
        ("Pareto frontier equals brute force", pareto_equivalence),
        ("trend-fit recovery", trend_recovery),
        ("feasibility projection", feasibility),
        ("gap report on sample", gap_on_sample),
        ("jitter bound", jitter_bound),
        ("density comparison", density_ratio),
        ("CLI determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
