use std::process::{Command, Output};

use serde_json::Value;

fn spinlift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinlift"))
        .args(args)
        .env_remove("SPINLIFT_MAX_N")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn g2_has_one_parallel_spinor() {
    let out = spinlift(&["check", "--group", "g2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], "spinlift/1");
    assert_eq!(v["command"], "check");
    let r = &v["report"];
    assert_eq!(r["n"], 7);
    assert_eq!(r["dim_sigma"], 8);
    assert_eq!(r["admits_parallel_spinor"], true);
    assert_eq!(r["lifts"][0]["fixed_space"]["N"], 1);
}

#[test]
fn su6_with_involution_has_no_valid_lift() {
    let out = spinlift(&["check", "--group", "suxz2", "--m", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["report"];
    assert_eq!(r["admits_parallel_spinor"], false);
    assert_eq!(r["structure_count"], 0);
    let lifts = r["lifts"].as_array().unwrap();
    assert_eq!(lifts.len(), 2);
    assert!(lifts
        .iter()
        .all(|l| l["valid"] == false && l["fixed_space"].is_null()));
}

#[test]
fn su4_with_involution_reports_two_structures() {
    let out = spinlift(&["check", "--group", "suxz2", "--m", "4", "--emit-basis"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["report"];
    assert_eq!(r["structure_count"], 2);
    for lift in r["lifts"].as_array().unwrap() {
        assert_eq!(lift["fixed_space"]["N"], 1);
        assert_eq!(lift["fixed_space"]["basis"].as_array().unwrap().len(), 1);
    }
}

#[test]
fn even_d_is_invalid_input() {
    let out = spinlift(&["check", "--group", "spxzd", "--m", "2", "--d", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd"));
}

#[test]
fn unknown_group_and_missing_parameter_are_invalid_input() {
    assert_eq!(spinlift(&["check", "--group", "e8"]).status.code(), Some(2));
    assert_eq!(spinlift(&["check", "--group", "su"]).status.code(), Some(2));
    assert_eq!(
        spinlift(&["check", "--group", "su", "--m", "11"]).status.code(),
        Some(2)
    );
}

#[test]
fn infinite_gamma_is_reported_unsupported() {
    let out = spinlift(&[
        "check",
        "--group",
        "spgamma",
        "--m",
        "2",
        "--gamma-type",
        "infinite",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported"));
}

#[test]
fn table_json_sizes() {
    for (max_n, rows) in [(4, 2), (8, 9), (16, 17)] {
        let n = max_n.to_string();
        let out = spinlift(&["table", "--max-n", &n, "--format", "json"]);
        assert_eq!(out.status.code(), Some(0), "max_n {max_n}");
        let v = json(&out);
        assert_eq!(v["command"], "table");
        assert_eq!(v["all_matched"], true);
        let r = v["rows"].as_array().unwrap();
        assert_eq!(r.len(), rows, "max_n {max_n}");
        assert!(r.iter().all(|row| row["matched"] == true));
    }
}

#[test]
fn table_text_lists_every_row() {
    let out = spinlift(&["table", "--max-n", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for label in ["SU_4⋊Z_2", "Sp_2×Z_3", "Spin_7", "G_2"] {
        assert!(text.contains(label), "{label} missing from\n{text}");
    }
}

#[test]
fn output_is_deterministic() {
    let a = spinlift(&["table", "--max-n", "8", "--format", "json"]);
    let b = spinlift(&["table", "--max-n", "8", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let a = spinlift(&["check", "--group", "sp", "--m", "2", "--emit-basis"]);
    let b = spinlift(&["check", "--group", "sp", "--m", "2", "--emit-basis"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn dimension_cap_comes_from_the_environment() {
    let run = |cap: &str, args: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_spinlift"))
            .args(args)
            .env("SPINLIFT_MAX_N", cap)
            .output()
            .unwrap()
    };
    assert_eq!(run("8", &["table", "--max-n", "16"]).status.code(), Some(2));
    assert_eq!(run("8", &["table"]).status.code(), Some(0));
    assert_eq!(run("25", &["table"]).status.code(), Some(2));
    assert_eq!(run("many", &["table"]).status.code(), Some(2));
    assert_eq!(spinlift(&["table", "--max-n", "20"]).status.code(), Some(2));

    let out = run("20", &["table", "--max-n", "20", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    let row = rows
        .iter()
        .find(|r| r["group"] == "Sp_5×Z_3")
        .expect("row present at n = 20");
    assert_eq!(row["n_per_lift"], serde_json::json!([2]));
}

#[test]
fn invalid_tolerances_are_rejected() {
    assert_eq!(spinlift(&["table", "--tol-rank", "0"]).status.code(), Some(2));
    assert_eq!(
        spinlift(&["table", "--tol-residual", "-1"]).status.code(),
        Some(2)
    );
}

#[test]
fn selftest_passes_at_small_dimension() {
    let out = spinlift(&["selftest", "--max-n", "6", "--format", "json"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let v = json(&out);
    assert_eq!(v["command"], "selftest");
}
