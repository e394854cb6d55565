use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use objectivity_core::SpacetimePoint;
use objectivity_verify::checks::{Expectation, Status};
use objectivity_verify::{prepare, reevaluate, run_prepared, scenario, ConfigError, RunOptions};

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_objectivity")).args(args).output().unwrap()
}

fn write_scenario(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("scenario.toml");
    fs::write(&path, body).unwrap();
    path
}

const MINIMAL: &str = r#"
name = "minimal"
seed = 9

[motion]
kind = "rotation"
axis = [0.0, 0.0, 1.0]
omega = 1.0

[sampling]
count = 8

[fields.director]
kind = "constant"
value = [1.0, 0.0, 0.0]

[fields.still]
kind = "constant"
value = [0.0, 0.0, 0.0]

[[checks]]
id = "material"
type = "rate_objectivity"
rate = "material"
field = "director"
velocity = "still"

[[checks]]
id = "naive"
type = "rate_objectivity"
rate = "naive"
field = "director"
velocity = "still"
expect = "violated"
"#;

#[test]
fn bundled_scenarios_have_expected_exit_codes() {
    for (file, code) in [
        ("rotating_frame.toml", 0),
        ("accelerating_frame.toml", 0),
        ("composite_frame.toml", 0),
        ("inertial_frame.toml", 0),
        ("naive_objective_claim.toml", 1),
        ("broken_unknown_field.toml", 2),
    ] {
        let out = cli(&["verify", bundled(file).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(code), "{file}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn unknown_field_is_named_on_stderr() {
    let out = cli(&["verify", bundled("broken_unknown_field.toml").to_str().unwrap()]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("`stress`"), "{stderr}");
    assert!(out.stdout.is_empty());
}

#[test]
fn missing_file_and_bad_usage_exit_2() {
    assert_eq!(cli(&["verify", "/nonexistent/scenario.toml"]).status.code(), Some(2));
    assert_eq!(cli(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cli(&[]).status.code(), Some(2));
    let path = bundled("rotating_frame.toml");
    assert_eq!(cli(&["verify", path.to_str().unwrap(), "--tolerance-scale", "0"]).status.code(), Some(2));
}

#[test]
fn list_subcommands_print_registries() {
    let motions = String::from_utf8(cli(&["list-motions"]).stdout).unwrap();
    for kind in ["identity", "uniform_translation", "uniform_acceleration", "rotation", "composite"] {
        assert!(motions.contains(kind), "{motions}");
    }
    let fields = String::from_utf8(cli(&["list-fields"]).stdout).unwrap();
    for kind in ["co_rotating", "time_modulated", "scalar_wave", "scalar_coordinate"] {
        assert!(fields.contains(kind), "{fields}");
    }
    let checks = String::from_utf8(cli(&["list-checks"]).stdout).unwrap();
    for kind in ["christoffel_oracle", "rate_objectivity", "flow_identity", "jaumann_mean"] {
        assert!(checks.contains(kind), "{checks}");
    }
}

#[test]
fn report_and_csv_follow_the_documented_layout() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), MINIMAL);
    let report = dir.path().join("nested/report.json");
    let csv = dir.path().join("rows.csv");
    let out =
        cli(&["verify", path.to_str().unwrap(), "--report", report.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["scenario"], "minimal");
    assert_eq!(json["seed"], 9);
    assert_eq!(json["sample_count"], 8);
    assert_eq!(json["passed"], true);
    assert_eq!(json["motion"]["kind"], "rotation");
    let naive = &json["checks"][1];
    assert_eq!(naive["id"], "naive");
    assert_eq!(naive["type"], "rate_objectivity");
    assert_eq!(naive["expect"], "violated");
    assert_eq!(naive["status"], "pass");
    assert!(naive["max_abs_err"].as_f64().unwrap() >= 0.1);
    assert_eq!(naive["worst_point"].as_array().unwrap().len(), 4);

    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("check_id,t,x1,x2,x3,component,lhs,rhs,abs_err"));
    // 2 checks x 8 samples x 4 components
    assert_eq!(lines.count(), 64);
}

#[test]
fn output_paths_in_the_scenario_resolve_against_its_directory() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!("{MINIMAL}\n[output]\nreport = \"out/r.json\"\ncsv = \"out/r.csv\"\n");
    let path = write_scenario(dir.path(), &body);
    let out = cli(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("out/r.json").is_file());
    assert!(dir.path().join("out/r.csv").is_file());
}

#[test]
fn seed_override_changes_samples_and_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), MINIMAL);
    let a = prepare(&path, &RunOptions::default()).unwrap();
    let b = prepare(&path, &RunOptions { seed: Some(10), ..RunOptions::default() }).unwrap();
    assert_eq!(a.seed, 9);
    assert_eq!(b.seed, 10);
    assert_ne!(a.samples, b.samples);
    assert_eq!(run_prepared(&b).report.seed, 10);
}

#[test]
fn tolerance_scale_applies_to_tolerances_but_not_defect_floors() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), MINIMAL);
    let p = prepare(&path, &RunOptions { tolerance_scale: 1e3, ..RunOptions::default() }).unwrap();
    assert_eq!(p.checks[0].threshold, 1e-3);
    assert_eq!(p.checks[1].expect, Expectation::Violated);
    assert_eq!(p.checks[1].threshold, 0.1);
}

#[test]
fn worst_point_reproduces_max_abs_err() {
    let p = prepare(&bundled("composite_frame.toml"), &RunOptions::default()).unwrap();
    let outcome = run_prepared(&p);
    for (check, result) in p.checks.iter().zip(&outcome.report.checks) {
        let again = reevaluate(check, &p.motion, SpacetimePoint::from_array(result.worst_point)).unwrap();
        assert_eq!(again, result.max_abs_err, "{}", result.id);
    }
}

#[test]
fn csv_rows_follow_scenario_order() {
    let p = prepare(&bundled("rotating_frame.toml"), &RunOptions::default()).unwrap();
    let outcome = run_prepared(&p);
    let ids: Vec<&str> = p.checks.iter().map(|c| c.id.as_str()).collect();
    let mut seen: Vec<&str> = outcome.rows.iter().map(|r| r.check_id.as_str()).collect();
    seen.dedup();
    assert_eq!(seen, ids);
}

fn config_error(body: &str) -> ConfigError {
    let s = scenario::parse(body);
    match s {
        Err(e) => e,
        Ok(s) => s.prepare(&RunOptions::default(), Path::new(".")).unwrap_err(),
    }
}

#[test]
fn invalid_scenarios_are_rejected() {
    let cases = [
        (MINIMAL.replace("count = 8", "count = 0"), "sampling"),
        (MINIMAL.replace("axis = [0.0, 0.0, 1.0]", "axis = [0.0, 0.0, 2.0]"), "unit"),
        (MINIMAL.replace("id = \"naive\"", "id = \"material\""), "duplicate"),
        (MINIMAL.replace("rate = \"naive\"", "rate = \"naive\"\ntolerance = -1.0"), "positive"),
        (format!("{MINIMAL}\n[tolerances]\nbogus = 1e-3\n"), "bogus"),
        (MINIMAL.replace("seed = 9", "seed = 9\nextra = 1"), "extra"),
        (MINIMAL.replace("rate = \"naive\"", "rate = \"jaumann\"\nembedding = \"four_velocity\""), "spacelike"),
    ];
    for (body, needle) in cases {
        let msg = config_error(&body).to_string();
        assert!(msg.contains(needle), "expected `{needle}` in `{msg}`");
    }
}

#[test]
fn scalar_field_cannot_serve_as_velocity() {
    let body = MINIMAL.replace(
        "[fields.still]\nkind = \"constant\"\nvalue = [0.0, 0.0, 0.0]",
        "[fields.still]\nkind = \"scalar_time\"",
    );
    assert!(matches!(config_error(&body), ConfigError::FieldRole { .. }));
}

#[test]
fn linear_reference_needs_an_affine_field() {
    let body = format!("{MINIMAL}\n[fields.wave]\nkind = \"sinusoidal\"\namplitude = 1.0\nwavenumber = 1.0\nfrequency = 1.0\n\n[[checks]]\nid = \"lin\"\ntype = \"flow_linear_reference\"\nvelocity = \"wave\"\n");
    assert!(matches!(config_error(&body), ConfigError::FieldRole { .. }));
}

#[test]
fn failing_check_reports_its_worst_point() {
    let p = prepare(&bundled("naive_objective_claim.toml"), &RunOptions::default()).unwrap();
    let r = &run_prepared(&p).report.checks[0];
    assert_eq!(r.status, Status::Fail);
    assert!(r.max_abs_err > 0.5);
    assert!(p.samples.contains(&SpacetimePoint::from_array(r.worst_point)));
}
