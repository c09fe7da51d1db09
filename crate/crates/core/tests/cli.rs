use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gabor-cube"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_on(args: &[&str], name: &str) -> Output {
    bin().args(args).arg(fixture(name)).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn expectations(name: &str) -> Value {
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap();
    doc["expect"].clone()
}

const ALL: [&str; 12] = [
    "bad-rows",
    "lattice-z2",
    "lattice-z4",
    "mixed-strips",
    "offset-columns",
    "offset-rows",
    "pseudo-standard",
    "secant-lattice",
    "standard-1d",
    "standard-2d",
    "strips-horizontal",
    "strips-vertical",
];

#[test]
fn onb_verdicts_match_fixture_expectations() {
    for name in ALL {
        let expect = expectations(name);
        let Some(onb) = expect["onb"].as_bool() else { continue };
        let out = run_on(&["check", "onb", "--freq-radius", "16"], name);
        assert_eq!(out.status.code(), Some(if onb { 0 } else { 1 }), "{name}");
        let v = json(&out);
        assert_eq!(v["verdict"], onb, "{name}");
        if let Some(ortho) = expect["ortho"].as_bool() {
            assert_eq!(v["ortho"], ortho, "{name}");
        }
        if let Some(tiling) = expect["tiling"].as_bool() {
            assert_eq!(v["tiling"]["verdict"] == "packing_and_tiling", tiling, "{name}");
        }
    }
}

#[test]
fn onb_parseval_ratios_are_near_one_for_bases() {
    let v = json(&run_on(&["check", "onb", "--freq-radius", "32"], "standard-1d"));
    for r in v["parseval_ratios"].as_array().unwrap() {
        let ratio = r["ratio"].as_f64().unwrap();
        assert!(ratio <= 1.0 + 1e-9 && ratio > 0.98, "{r}");
    }
}

#[test]
fn secant_lattice_first_witness() {
    let out = run_on(&["check", "ortho", "--window", "secant"], "secant-lattice");
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let expect = expectations("secant-lattice");
    let diff = &v["violations"][0]["difference"];
    assert_eq!(vec![diff["t"][0].clone(), diff["lambda"][0].clone()], expect["witness"].as_array().unwrap().clone());
}

#[test]
fn tiling_csv_dump() {
    let out = run_on(&["--format", "csv", "check", "tiling", "--resolution", "0.5"], "lattice-z2");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,count"));
    // radius-3 box at spacing 1/2
    assert_eq!(lines.clone().count(), 144);
    assert!(lines.all(|l| l.ends_with(",1")));
}

#[test]
fn onb_csv_shells_increase_to_the_norm() {
    let out = run_on(&["--format", "csv", "check", "onb", "--freq-radius", "8"], "lattice-z2");
    let text = String::from_utf8(out.stdout).unwrap();
    let values: Vec<f64> = text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 9);
    assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-15));
    assert!((values[8] - 0.5).abs() < 0.02);
}

#[test]
fn classify_labels() {
    for name in ["lattice-z2", "offset-columns", "standard-1d"] {
        let out = run_on(&["classify"], name);
        assert_eq!(out.status.code(), Some(0), "{name}");
        assert_eq!(json(&out)["result"], "standard", "{name}");
    }
    let out = run_on(&["classify"], "bad-rows");
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["result"], "failure");
    assert_eq!(v["witness"], expectations("bad-rows")["witness"]);

    let v = json(&run_on(&["classify"], "standard-2d"));
    assert!(v["labels"].as_array().unwrap().contains(&Value::from("standard")));
    for name in ["strips-horizontal", "strips-vertical"] {
        let v = json(&run_on(&["classify"], name));
        assert_eq!(v["overlap_strips"], expectations(name)["overlap_strips"], "{name}");
        assert_eq!(v["axis"], name.trim_start_matches("strips-"), "{name}");
    }
    let v = json(&run_on(&["classify"], "mixed-strips"));
    assert_eq!(v["tiling_strips"], expectations("mixed-strips")["tiling_strips"]);
}

#[test]
fn classify_non_orthogonal_input_is_a_precondition_failure() {
    let out = run_on(&["classify"], "offset-rows");
    // rows form: reported as a failure with a witness, not as an error
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"], "failure");
}

#[test]
fn pseudo_structure() {
    let out = run_on(&["classify", "--pseudo", "1"], "pseudo-standard");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["holds"], true);
    let out = run_on(&["classify", "--pseudo", "1"], "mixed-strips");
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["holds"], false);
}

#[test]
fn construct_is_idempotent_and_classification_round_trips() {
    for name in ["standard-1d", "standard-2d", "strips-horizontal", "strips-vertical", "mixed-strips"] {
        let once = run_on(&["construct"], name);
        assert_eq!(once.status.code(), Some(0), "{name}");
        let once = String::from_utf8(once.stdout).unwrap();
        let twice = run(&["construct", &once]);
        assert_eq!(String::from_utf8(twice.stdout).unwrap(), once, "{name}");

        let classified = String::from_utf8(run(&["classify", &once]).stdout).unwrap();
        let rebuilt = String::from_utf8(run(&["construct", &classified]).stdout).unwrap();
        let again = String::from_utf8(run(&["classify", &rebuilt]).stdout).unwrap();
        let (a, b): (Value, Value) =
            (serde_json::from_str(&classified).unwrap(), serde_json::from_str(&again).unwrap());
        assert_eq!(a, b, "{name}");
        assert_eq!(a["set"], serde_json::from_str::<Value>(&rebuilt).unwrap(), "{name}");
    }
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let a = bin().args(["sweep", "--family", "horizontal", "--count", "3", "--seed", "11"]).output().unwrap();
    let b = bin()
        .env("GABOR_CUBE_THREADS", "1")
        .args(["sweep", "--family", "horizontal", "--count", "3", "--seed", "11"])
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run_on(&["check", "onb", "--freq-radius", "8"], "strips-vertical");
    let d = bin()
        .env("GABOR_CUBE_THREADS", "2")
        .args(["check", "onb", "--freq-radius", "8"])
        .arg(fixture("strips-vertical"))
        .output()
        .unwrap();
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn density_within_bound() {
    let out = run_on(&["density", "--half-width", "4,8"], "strips-horizontal");
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["densities"].as_array().unwrap().len(), 2);
    assert!(v["densities"].as_array().unwrap().iter().all(|r| r["within_bound"] == true));
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["check", "ortho", "{\"kind\": \"lattice\", \"dim\": 2,"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["error"].as_str().unwrap().contains("line 1"));
    let out = run(&["eval-stft", "--window", "secant", "--t", "1,2", "--nu", "0,0"]);
    assert_eq!(out.status.code(), Some(2));
    let out =
        run(&["check", "tiling", r#"{"kind": "cube_tiling_2d", "axis": "rows", "offsets": {"table": {"[1]": 1.5}}}"#]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["error"].as_str().unwrap().contains("outside [0, 1)"));
    let out = run(&["check", "ortho", "/nonexistent/set.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_stft_zero() {
    let out = run(&["eval-stft", "--t", "0.5", "--nu", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["in_zero_set"], true);
}
