// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const PARAMS: &str = "[params]\nalpha = 2.0\ns = 0.0\nk = 0.0\nb = 0.6\nb_prime = -0.3\neps = 0.1\ndelta = 0.1\n";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mkdv-lab"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg(config).arg("--out").arg(out).args(extra).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("cfg.toml");
    fs::write(&p, body).unwrap();
    p
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn counterexample_run_writes_series_and_slope() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("p54");
    let o = run(&configs().join("p54_endpoint.toml"), &out, &["--assert", "--plots"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("series.csv")).unwrap();
    assert!(csv.starts_with("n,lhs,rhs,ratio"));
    assert_eq!(csv.lines().count(), 7);
    let slope = summary(&out)["results"]["slope"].as_f64().unwrap();
    assert!((slope - 0.2).abs() < 0.04, "slope {slope}");
    assert!(out.join("series_ratio_ratio_lo_ratio_hi.svg").exists());
}

#[test]
fn zero_data_simulation_stays_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("zero");
    let o = run(&configs().join("simulate_zero.toml"), &out, &[]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("invariants.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let i1: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(i1, 0.0);
    }
    let fields = fs::read_to_string(out.join("fields.csv")).unwrap();
    assert!(fields.lines().skip(1).all(|l| l.ends_with(",0,0")));
}

#[test]
fn resonance_constants_match_closed_form() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("res");
    assert!(run(&configs().join("resonance.toml"), &out, &["--assert"]).status.success());
    let s = summary(&out);
    let sys = s["results"]["systems"].as_array().unwrap();
    let two = sys.iter().find(|v| v["variant"] == "TwoConstAlpha" && v["alpha"] == 2.0).unwrap();
    let c: Vec<f64> = two["constants"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let r3 = 1.0 / 3f64.sqrt();
    assert!((c[1] - (1.0 + r3) / 2.0).abs() < 1e-12 && (c[2] - (1.0 - r3) / 2.0).abs() < 1e-12);
    let eight = sys.iter().find(|v| v["variant"] == "TwoConstAlpha" && v["alpha"] == 8.0).unwrap();
    assert_eq!(eight["status"], "no_real_solution");
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["lemma_brackets", "region", "picard"] {
        let (a, b) = (tmp.path().join(format!("{name}_a")), tmp.path().join(format!("{name}_b")));
        let cfg = configs().join(format!("{name}.toml"));
        assert!(run(&cfg, &a, &["--plots"]).status.success());
        assert!(run(&cfg, &b, &["--plots", "--threads", "1"]).status.success());
        let mut files: Vec<String> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
        files.sort();
        for f in files.iter().filter(|f| f.as_str() != "manifest.json") {
            assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{name}/{f} differs");
        }
    }
}

#[test]
fn different_seed_changes_random_cases() {
    let tmp = tempfile::tempdir().unwrap();
    let base = fs::read_to_string(configs().join("lemma_brackets.toml")).unwrap();
    let cfg = write_config(tmp.path(), &base.replace("seed = 7", "seed = 8"));
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(run(&configs().join("lemma_brackets.toml"), &a, &[]).status.success());
    assert!(run(&cfg, &b, &[]).status.success());
    assert_ne!(fs::read(a.join("lemma.csv")).unwrap(), fs::read(b.join("lemma.csv")).unwrap());
}

#[test]
fn report_verifies_digests() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("p52a"), tmp.path().join("p61a"));
    assert!(run(&configs().join("p52a.toml"), &a, &[]).status.success());
    assert!(run(&configs().join("p61a.toml"), &b, &[]).status.success());
    let o = bin().arg("report").arg(&a).arg(&b).output().unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.matches("PASS slope").count(), 2, "{text}");

    let csv = a.join("series.csv");
    let mut bytes = fs::read(&csv).unwrap();
    bytes[20] ^= 1;
    fs::write(&csv, bytes).unwrap();
    let o = bin().arg("report").arg(&a).arg(&b).output().unwrap();
    assert_eq!(o.status.code(), Some(6));
    assert!(String::from_utf8_lossy(&o.stderr).contains("digest mismatch"));
}

#[test]
fn empty_report_is_empty() {
    let o = bin().arg("report").output().unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");

    let unknown = write_config(tmp.path(), &format!("experiment = \"convnorm\"\nbogus = 1\n{PARAMS}[convnorm]\nrects = [[0.0, 0.0, 0.5, 0.5]]\n"));
    assert_eq!(run(&unknown, &out, &[]).status.code(), Some(2));

    let bad_alpha = write_config(
        tmp.path(),
        &format!("experiment = \"convnorm\"\n{}[convnorm]\nrects = [[0.0, 0.0, 0.5, 0.5]]\n", PARAMS.replace("alpha = 2.0", "alpha = 1.0")),
    );
    assert_eq!(run(&bad_alpha, &out, &[]).status.code(), Some(3));

    let blowup = write_config(
        tmp.path(),
        &format!(
            "experiment = \"simulate\"\n{PARAMS}[simulate]\ngrid = {{ n = 64, half_length = 5.0 }}\ndt = 0.5\nt_end = 50.0\ninitial = {{ kind = \"gaussian\", amplitude = 30.0, width = 1.0, shift = 0.0 }}\n"
        ),
    );
    assert_eq!(run(&blowup, &out, &[]).status.code(), Some(4));

    // the P52a slope is 1, so demanding 0 must fail under --assert only
    let strict = fs::read_to_string(configs().join("p52a.toml")).unwrap().replace("slope_tolerance = 0.15", "slope = 0.0\nslope_tolerance = 0.1");
    let strict = write_config(tmp.path(), &strict);
    assert_eq!(run(&strict, &out, &["--assert"]).status.code(), Some(5));
    assert_eq!(run(&strict, &out, &[]).status.code(), Some(0));
}

#[test]
fn all_shipped_configs_pass_their_expectations() {
    let tmp = tempfile::tempdir().unwrap();
    let mut names: Vec<PathBuf> = fs::read_dir(configs()).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    for cfg in names.iter().filter(|p| p.extension().is_some_and(|e| e == "toml")) {
        let out = tmp.path().join(cfg.file_stem().unwrap());
        let o = run(cfg, &out, &["--assert"]);
        assert!(o.status.success(), "{}: {}", cfg.display(), String::from_utf8_lossy(&o.stderr));
    }
}
