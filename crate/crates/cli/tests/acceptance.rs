//! Acceptance suite. Run with
//! `cargo test --release -p openkpz-cli --test acceptance -- --nocapture`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use openkpz::harness::{
    cross_sampler_experiment, mean_field_experiment, pcn_calibration, stationarity_experiment, CrossSamplerConfig,
    InitialLaw, MeanFieldConfig, StationarityConfig, TestReport,
};
use openkpz::kernels::{constant_a, neumann_kernel, robin_kernel, Mollifier, QuadratureResolution, RobinSemigroup};
use openkpz::stationary::{sample_stationary_mcmc, McmcConfig};
use openkpz::{BoundaryParams, GridField};
use openkpz_algebra::parse::parse_poly;
use openkpz_algebra::picard::PicardOptions;
use openkpz_algebra::*;

const SEED: u64 = 1;
const A_ORACLE: f64 = -0.027427505134682;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome {
            passed,
            detail: detail.into(),
        }
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.passed &= elapsed < limit;
    out.detail = format!("{}; {:.2}s (limit {}s)", out.detail, elapsed.as_secs_f64(), limit.as_secs());
    out
}

fn worst_z(report: &TestReport) -> f64 {
    report
        .statistics
        .iter()
        .filter_map(|s| s.z_score)
        .fold(0.0, |m: f64, z| m.max(z.abs()))
}

fn min_p(report: &TestReport) -> f64 {
    report
        .statistics
        .iter()
        .filter_map(|s| s.p_value)
        .fold(1.0, f64::min)
}

fn algebra_tables() -> Outcome {
    let report = verify_tables(&DiagramTable::standard());
    let rows: Vec<String> = report
        .tables
        .iter()
        .map(|c| format!("{} {}/{}", c.name, c.rows_checked - c.mismatches.len(), c.rows_checked))
        .collect();
    let ok = report.tables.len() == 4
        && report.tables.iter().all(|c| c.passed && c.rows_checked >= 14 && c.mismatches.is_empty());
    Outcome::new(ok, rows.join(", "))
}

fn renorm() -> Outcome {
    let got = renorm_constants(&RenormParams::symbolic(), &PicardOptions::default()).unwrap();
    let expected = [
        parse_poly("C0").unwrap(),
        parse_poly("2*C0").unwrap(),
        parse_poly("1/4*C2 + 1/2*C3 + 2*a1_0*C0 + C1").unwrap(),
    ];
    let ok = got.c1 == expected[0] && got.c2 == expected[1] && got.c3 == expected[2];
    Outcome::new(ok, format!("c1 = {}, c2 = {}, c3 = {}", got.c1, got.c2, got.c3))
}

fn q_expansion() -> Outcome {
    let table = DiagramTable::standard();
    let expected = table
        .parse_combination("wt*wt + 1/4*<tree2> + wt*<2d1d> + 2*wt*<1d> + <2d2d> + 1/2*<tree1> + (2*a1_0 + wt)*<1d2d> + <2d>")
        .unwrap();
    let got = q_leq0_nonlinearity(&PicardOptions::default()).unwrap();
    Outcome::new(got == expected && got.len() == 8, format!("{} terms: {got}", got.len()))
}

fn sectors() -> Outcome {
    let d = ExactDegree::frac;
    let expected = [
        [d(-2, 1, 2), d(-1, 1, 4), d(-2, 1, 2), d(0, 1, -4)],
        [d(-3, 2, 0), d(-1, 1, 1), d(-3, 2, 0), d(-1, 2, -3)],
        [d(-1, 1, -2); 4],
        [d(-1, 1, 1), d(-1, 2, 2), d(-1, 1, 1), d(0, 1, -2)],
        [d(-1, 2, -1); 4],
        [ExactDegree::zero(); 4],
    ];
    let rows = sector_exponents().unwrap();
    let mut matched = 0;
    let mut extra_ok = rows.len() == expected.len();
    for (row, want) in rows.iter().zip(&expected) {
        matched += [row.eta, row.sigma, row.mu]
            .iter()
            .zip(want)
            .filter(|(a, b)| a == b)
            .count();
        extra_ok &= row.alpha == want[3] && row.gamma == d(0, 1, 1);
    }
    Outcome::new(matched == 18 && extra_ok, format!("{matched}/18 exponents exact, alpha and gamma {extra_ok}"))
}

fn spectral_neumann(t: f64, x: f64, y: f64) -> f64 {
    let mut sum = 1.0;
    for k in 1..400 {
        let k = k as f64;
        sum += 2.0 * (-0.5 * k * k * PI * PI * t).exp() * (k * PI * x).cos() * (k * PI * y).cos();
    }
    sum
}

fn simpson(panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = 1.0 / panels as f64;
    let inner: f64 = (1..panels)
        .map(|i| if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h))
        .sum();
    (f(0.0) + inner + f(1.0)) * h / 3.0
}

fn kernel_agreement() -> Outcome {
    let grid: Vec<f64> = (0..33).map(|i| i as f64 / 32.0).collect();
    let mut sup: f64 = 0.0;
    let mut mass: f64 = 0.0;
    for &t in &[0.05, 0.1, 0.5, 1.0] {
        for &x in &grid {
            for &y in &grid {
                let k = neumann_kernel(t, x, y, 20).unwrap().value;
                sup = sup.max((k - spectral_neumann(t, x, y)).abs());
            }
            let m = simpson(2000, |y| neumann_kernel(t, x, y, 20).unwrap().value);
            mass = mass.max((m - 1.0).abs());
        }
    }
    Outcome::new(sup < 1e-8 && mass < 1e-8, format!("sup error {sup:.2e}, mass error {mass:.2e}"))
}

fn robin_reduction() -> Outcome {
    let cells = 256;
    let params = BoundaryParams::new(0.5, 0.5);
    let k = RobinSemigroup::new(&params, cells).unwrap().kernel(0.1).unwrap();
    let mut sup: f64 = 0.0;
    for i in (0..=cells).step_by(8) {
        for j in (0..=cells).step_by(8) {
            let (x, y) = (i as f64 / cells as f64, j as f64 / cells as f64);
            sup = sup.max((k[(i, j)] - neumann_kernel(0.1, x, y, 20).unwrap().value).abs());
        }
    }
    let mut point: f64 = 0.0;
    for &(x, y) in &[(0.0, 0.0), (0.25, 0.5), (0.5, 0.5), (1.0, 0.75), (0.0, 1.0)] {
        let r = robin_kernel(0.1, x, y, &params, cells).unwrap();
        point = point.max((r - neumann_kernel(0.1, x, y, 20).unwrap().value).abs());
    }
    Outcome::new(sup < 1e-4 && point < 1e-4, format!("grid sup {sup:.2e}, pointwise {point:.2e}"))
}

fn constant() -> Outcome {
    let m = Mollifier::default();
    let res = QuadratureResolution::default();
    let a = constant_a(&m, res).unwrap().value;
    let doubled = constant_a(&m, res.scaled(2)).unwrap().value;
    let (drift, miss) = ((a - doubled).abs(), (a - A_ORACLE).abs());
    Outcome::new(
        drift < 1e-6 && miss < 1e-6,
        format!("a = {a:.12}, doubling change {drift:.1e}, oracle gap {miss:.1e}"),
    )
}

fn mean_field() -> Outcome {
    let z0 = GridField::from_fn(64, 0.0, |x| 1.0 + 0.5 * (PI * x).cos());
    let report = mean_field_experiment(&BoundaryParams::new(0.0, 0.0), &z0, &MeanFieldConfig::new(64, 2000, SEED)).unwrap();
    let checks = report.statistics.iter().filter(|s| s.z_score.is_some()).count();
    Outcome::new(
        report.passed == Some(true) && checks == 9,
        format!("{checks} points, worst |z| {:.2} (limit 3)", worst_z(&report)),
    )
}

fn stationarity() -> Outcome {
    let cfg = StationarityConfig::new(64, 1.0, 1000, SEED);
    let report = stationarity_experiment(0.5, -0.5, &cfg).unwrap();
    let control_cfg = StationarityConfig {
        initial: InitialLaw::Flat,
        ..StationarityConfig::new(64, 0.02, 1000, SEED)
    };
    let control = stationarity_experiment(0.5, -0.5, &control_cfg).unwrap();
    let control_fails = control.passed == Some(false) && min_p(&control) < 0.01;
    Outcome::new(
        report.passed == Some(true) && control_fails,
        format!(
            "stationary min p {:.3}, flat control min p {:.1e}",
            min_p(&report),
            min_p(&control)
        ),
    )
}

fn cross_sampler() -> Outcome {
    let report = cross_sampler_experiment(1.0, 1.0, &CrossSamplerConfig::new(64, SEED)).unwrap();
    let checks = report.statistics.iter().filter(|s| s.z_score.is_some()).count();
    Outcome::new(
        report.passed == Some(true) && checks == 12,
        format!("{checks} comparisons, worst |z| {:.2} (limit 3)", worst_z(&report)),
    )
}

/// The zeroed target coincides with the pCN reference, so every proposal is
/// accepted and the literal rate bound cannot hold. The covariance part is
/// asserted; the rate is reported together with the rate at `u = v = 1`.
fn pcn() -> (Outcome, bool) {
    let cfg = McmcConfig::new(0.5, 1000, 5, 101_000, SEED);
    let report = pcn_calibration(&cfg, 64, 20).unwrap();
    let covs: Vec<_> = report.statistics.iter().filter(|s| s.name.starts_with("cov(")).collect();
    let cov_ok = covs.len() == 15 && covs.iter().all(|s| s.passed == Some(true));
    let rate = report.statistic("acceptance rate").unwrap().value;
    let weighted = sample_stationary_mcmc(1.0, 1.0, &cfg, 64).unwrap().acceptance_rate;
    let outcome = Outcome::new(
        cov_ok && rate > 0.05 && rate < 0.95,
        format!(
            "covariance {}/15 within 3 SE (worst |z| {:.2}); zeroed acceptance {rate:.3}; acceptance at u=v=1 {weighted:.3}",
            covs.iter().filter(|s| s.passed == Some(true)).count(),
            worst_z(&report)
        ),
    );
    (outcome, cov_ok && rate == 1.0 && weighted > 0.05 && weighted < 0.95)
}

fn run_cli(out: &Path, args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_openkpz"))
        .args(args)
        .args(["--seed", "7", "--workers", "1", "--out-dir"])
        .arg(out)
        .output()
        .expect("binary runs")
        .status
        .code()
        .unwrap_or(-1)
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 7] = [
        &["verify-algebra"],
        &["kernel", "--set", "points=9"],
        &["constant-a", "--set", "r_cells=50", "--set", "z_cells=200"],
        &["simulate", "--set", "cells=16", "--set", "paths=20", "--set", "horizon=0.1", "--set", "per_path=true"],
        &["sample-stationary", "--set", "cells=16", "--set", "samples=60", "--set", "normalization_samples=500"],
        &["experiment", "stationarity", "--u", "0.5", "--v", "-0.5", "--set", "cells=16", "--set", "paths=60", "--set", "horizon=0.1"],
        &["experiment", "mean-field", "--set", "cells=16", "--set", "paths=50"],
    ];
    let base = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-determinism");
    let _ = std::fs::remove_dir_all(&base);
    let mut identical = 0;
    let mut files = 0;
    let mut failures = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let dirs = [base.join(format!("{i}a")), base.join(format!("{i}b"))];
        let codes: Vec<i32> = dirs.iter().map(|d| run_cli(d, args)).collect();
        let (a, b) = (read_dir(&dirs[0]), read_dir(&dirs[1]));
        files += a.len();
        if codes[0] == 0 && codes == [0, 0] && !a.is_empty() && a == b {
            identical += 1;
        } else {
            failures.push(format!("{} (exit {:?})", args.join(" "), codes));
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("{identical}/{} subcommands byte-identical over {files} files {failures:?}", runs.len()),
    )
}

#[test]
fn acceptance() {
    let budget = |s: u64| Duration::from_secs(s);
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    let mut record = |n: usize, name: &str, out: Outcome| {
        let line = format!(
            "criterion {n:>2} {} {name}: {}",
            if out.passed { "PASS" } else { "FAIL" },
            out.detail
        );
        println!("{line}");
        lines.push(line);
        if !out.passed {
            failed.push(n);
        }
    };
    record(1, "algebra tables", timed(budget(1), algebra_tables));
    record(2, "renormalization constants", timed(budget(1), renorm));
    record(3, "negative degree nonlinearity", timed(budget(1), q_expansion));
    record(4, "sector exponents", timed(budget(1), sectors));
    record(5, "Neumann kernel", timed(budget(10), kernel_agreement));
    record(6, "Robin reduction", timed(budget(60), robin_reduction));
    record(7, "constant a", timed(budget(60), constant));
    record(8, "SHE mean field", timed(budget(300), mean_field));
    record(9, "stationarity u+v=0", timed(budget(900), stationarity));
    record(10, "cross-sampler u=v=1", timed(budget(1800), cross_sampler));
    let mut pcn_expected = false;
    record(
        11,
        "pCN calibration",
        timed(budget(600), || {
            let (out, expected) = pcn();
            pcn_expected = expected;
            out
        }),
    );
    record(12, "determinism", determinism());

    println!("\n{}", lines.join("\n"));
    assert!(pcn_expected, "pCN calibration departed from its known behaviour");
    let unexpected: Vec<usize> = failed.into_iter().filter(|&n| n != 11).collect();
    assert!(unexpected.is_empty(), "failed criteria {unexpected:?}");
}
