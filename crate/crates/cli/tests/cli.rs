use std::process::{Command, Output};

use serde_json::Value;
use tunnelsplit::render::canonical_json;

const QUARTIC: &str = "(q^2-1)^2";

fn tunnelsplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tunnelsplit"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

fn field(doc: &Value, path: &[&str]) -> f64 {
    path.iter().fold(doc, |v, k| &v[*k]).as_f64().unwrap()
}

#[test]
fn analyze_quartic_json() {
    let out = tunnelsplit(&[
        "analyze",
        "--potential",
        QUARTIC,
        "--hbar",
        "0.2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json_of(&out);
    assert!((field(&doc, &["semiclassical", "epsilon"]) / 64.0 - 1.0).abs() < 1e-6);
    // default action includes the linear term, a factor sqrt(e) above the bare-log value
    let delta = field(&doc, &["semiclassical", "delta_e"]);
    assert!(
        (delta / (2.342e-4 * std::f64::consts::E.sqrt()) - 1.0).abs() < 1e-3,
        "{delta}"
    );
    for key in [
        "q_match",
        "t1_leading",
        "t1_exact_harmonic",
        "defect",
        "period_eq7",
    ] {
        assert!(doc["time_budget"][key].is_f64(), "{key}");
    }
    for key in ["norm_sq", "k_integral", "delta_e_herring"] {
        assert!(doc["wkb_tail"][key].is_f64(), "{key}");
    }
    for key in [
        "s0",
        "epsilon",
        "e_ground_ref",
        "s_action",
        "period",
        "delta_e",
        "e_minus",
        "e_plus",
        "flip_rate",
    ] {
        assert!(doc["semiclassical"][key].is_f64(), "{key}");
    }
}

#[test]
fn analyze_bare_log_action() {
    let out = tunnelsplit(&[
        "analyze",
        "--potential",
        QUARTIC,
        "--hbar",
        "0.2",
        "--format",
        "json",
        "--action-form",
        "bare-log",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let delta = field(&json_of(&out), &["semiclassical", "delta_e"]);
    assert!((delta / 2.342e-4 - 1.0).abs() < 1e-3, "{delta}");
}

#[test]
fn json_round_trips_byte_identically() {
    for args in [
        &["analyze", "--potential", QUARTIC, "--format", "json"][..],
        &["verify", "--potential", QUARTIC, "--format", "json"][..],
        &[
            "sweep",
            "--potential",
            QUARTIC,
            "--sweep-values",
            "0.3,-1",
            "--format",
            "json",
        ][..],
    ] {
        let text = stdout(&tunnelsplit(args));
        let reparsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(canonical_json(&reparsed), text, "{args:?}");
    }
}

#[test]
fn floats_are_printed_in_exponent_form() {
    let text = stdout(&tunnelsplit(&[
        "analyze",
        "--potential",
        QUARTIC,
        "--format",
        "json",
    ]));
    let line = text.lines().find(|l| l.contains("\"epsilon\"")).unwrap();
    assert_eq!(line.trim(), "\"epsilon\": 6.400000000000e+01,");
}

#[test]
fn analyze_is_deterministic_in_every_format() {
    for format in ["json", "table"] {
        let a = tunnelsplit(&["analyze", "--potential", QUARTIC, "--format", format]);
        let b = tunnelsplit(&["analyze", "--potential", QUARTIC, "--format", format]);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn input_errors_exit_2() {
    let cases: [(&[&str], &str); 6] = [
        (&["analyze", "--potential", "q^3"], "AsymmetricPotential"),
        (
            &["analyze", "--potential", QUARTIC, "--hbar", "10"],
            "BarrierTooLow",
        ),
        (&["analyze", "--potential", "q^^2"], "SyntaxError"),
        (
            &["analyze", "--potential", QUARTIC, "--mass", "0"],
            "mass>0 required",
        ),
        (
            &["verify", "--potential", QUARTIC, "--box-half-width", "0.5"],
            "BoxTooSmall",
        ),
        (&["sweep", "--potential", QUARTIC], "sweep_values"),
    ];
    for (args, needle) in cases {
        let out = tunnelsplit(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(stderr(&out).contains(needle), "{args:?}: {}", stderr(&out));
    }
    let out = tunnelsplit(&["verify", "--potential", QUARTIC, "--grid-points", "8"]);
    assert_eq!(out.status.code(), Some(2));
    let out = tunnelsplit(&["sweep", "--potential", QUARTIC, "--sweep-values", ""]);
    assert_eq!(out.status.code(), Some(2));
    let out = tunnelsplit(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_quartic_passes() {
    let out = tunnelsplit(&[
        "verify",
        "--potential",
        QUARTIC,
        "--hbar",
        "0.2",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let doc = json_of(&out);
    assert_eq!(doc["all_pass"], Value::Bool(true));
    let ratio = field(&doc, &["comparison", "ratio_semi_exact"]);
    assert!((0.75..=1.25).contains(&ratio));
    assert!((field(&doc, &["oracle", "epsilon_fit"]) / 64.0 - 1.0).abs() < 0.01);
    assert!(field(&doc, &["oracle", "e1"]) > field(&doc, &["oracle", "e0"]));
    assert_eq!(
        doc["oracle"]["s_exact_samples"].as_array().unwrap().len(),
        3
    );
    assert!(doc["tolerances"]["splitting_ratio"].is_array());
}

#[test]
fn verify_failure_exits_3() {
    // the bare-log action undershoots the exact splitting and its residual/E does not vanish
    let out = tunnelsplit(&[
        "verify",
        "--potential",
        QUARTIC,
        "--hbar",
        "0.2",
        "--format",
        "json",
        "--action-form",
        "bare-log",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let doc = json_of(&out);
    assert_eq!(doc["all_pass"], Value::Bool(false));
    let failed: Vec<&str> = doc["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == Value::Bool(false))
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(
        failed.contains(&"ratio_semi_exact") && failed.contains(&"action_residual"),
        "{failed:?}"
    );
}

#[test]
fn sweep_csv_columns_and_row_errors() {
    let out = tunnelsplit(&[
        "sweep",
        "--potential",
        QUARTIC,
        "--sweep-values",
        "0.4,0.3,-1,0.2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "param",
            "omega",
            "P",
            "S0",
            "epsilon",
            "S",
            "delta_e_semi",
            "delta_e_herring",
            "delta_e_exact",
            "ratio_semi_exact",
            "flip_rate",
            "error"
        ]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(&rows[2][11], "hbar>0 required");
    assert_eq!(&rows[2][0], "-1.000000000000e+00");
    assert!(rows[2].iter().skip(1).take(10).all(str::is_empty));
    let ratios: Vec<f64> = [0, 1, 3]
        .iter()
        .map(|&i| rows[i][9].parse().unwrap())
        .collect();
    assert!(
        ratios
            .windows(2)
            .all(|w| (w[1] - 1.0).abs() < (w[0] - 1.0).abs()),
        "{ratios:?}"
    );
}

#[test]
fn sweep_scale_rescales_the_potential() {
    let out = tunnelsplit(&[
        "sweep",
        "--potential",
        QUARTIC,
        "--sweep-param",
        "scale",
        "--sweep-values",
        "1,4,0",
        "--hbar",
        "0.1",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = json_of(&out);
    let rows = doc["rows"].as_array().unwrap();
    let s0 = |i: usize| rows[i]["S0"].as_f64().unwrap();
    let eps = |i: usize| rows[i]["epsilon"].as_f64().unwrap();
    assert!((s0(1) / s0(0) - 2.0).abs() < 1e-10);
    assert!((eps(1) / eps(0) - 4.0).abs() < 1e-9);
    assert!(rows[2]["error"]
        .as_str()
        .unwrap()
        .contains("scale>0 required"));
    assert!(rows[2]["S0"].is_null());
}

#[test]
fn sweep_preserves_input_order() {
    let values = "0.35,0.2,0.4,0.25,0.3";
    let out = tunnelsplit(&[
        "sweep",
        "--potential",
        QUARTIC,
        "--sweep-values",
        values,
        "--format",
        "json",
    ]);
    let doc = json_of(&out);
    let params: Vec<f64> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["param"].as_f64().unwrap())
        .collect();
    assert_eq!(params, vec![0.35, 0.2, 0.4, 0.25, 0.3]);
}
