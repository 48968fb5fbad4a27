//! End-to-end tests of the `dualgame` binary: exit codes, output formats,
//! golden-data stability, seeded reproducibility, and the self-test hooks.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dualgame_core::duality::theorem1_bound;
use dualgame_core::game::GameConfig;
use dualgame_core::serial::{parse_region_csv, parse_symmetric_csv, GameConfigRecord};

/// Runs the binary with a scrubbed environment so an ambient seed variable
/// cannot perturb the expected outputs.
fn run_with_env(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dualgame"));
    cmd.args(args).env_remove("DUALITY_SEED");
    for (key, value) in envs {
        cmd.env(key, value);
    }
    cmd.output().expect("binary should spawn")
}

fn dualgame(args: &[&str]) -> Output {
    run_with_env(args, &[])
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be UTF-8")
}

/// Extracts the value of a `key = value` line from a flat record.
fn field(text: &str, key: &str) -> String {
    let prefix = format!("{key} = ");
    text.lines()
        .find_map(|line| line.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("missing field {key} in output:\n{text}"))
        .to_string()
}

fn field_f64(text: &str, key: &str) -> f64 {
    field(text, key).parse().expect("numeric field")
}

fn golden_path(n: usize) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/golden")
        .join(format!("region_n{n}.csv"))
}

#[test]
fn region_export_matches_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    for n in [2usize, 9] {
        let out_path = dir.path().join(format!("region_n{n}.csv"));
        let out = dualgame(&[
            "region",
            "--n",
            &n.to_string(),
            "--grid",
            "256",
            "--samples",
            "64",
            "--seed",
            "2026",
            "--out",
            out_path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
        let written = std::fs::read_to_string(&out_path).unwrap();
        let golden = std::fs::read_to_string(golden_path(n)).unwrap();
        assert!(written == golden, "region export drifted from golden for n={n}");
    }
}

#[test]
fn region_boundary_approaches_the_diagonal_for_many_arms() {
    // As the number of arms grows the elliptical arc collapses onto the
    // triangle hypotenuse x + y = 1; at a million arms every boundary row
    // sits within 2e-3 of that line (the hypotenuse rows exactly on it).
    let out = dualgame(&["region", "--n", "1000000", "--grid", "64", "--samples", "0"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let rows = parse_region_csv(&stdout(&out)).expect("well-formed region CSV");
    assert!(!rows.is_empty());
    let mut worst = 0.0f64;
    for row in &rows {
        assert_eq!(row.n, 1_000_000);
        let distance = (row.x + row.y - 1.0).abs() / std::f64::consts::SQRT_2;
        worst = worst.max(distance);
    }
    assert!(worst <= 2e-3, "boundary strays {worst:.3e} from the diagonal");
}

#[test]
fn bound_check_reports_clean_sweeps() {
    let out = dualgame(&["bound-check", "--n", "3", "--count", "200", "--seed", "9"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(field(&text, "configs"), "200");
    assert!(field_f64(&text, "max_lemma_lhs") <= 1e-8);
    assert!(field_f64(&text, "max_region_excess") <= 1e-8);
}

#[test]
fn corrupted_bound_check_exits_three_with_offender() {
    let out = dualgame(&[
        "bound-check",
        "--n",
        "2",
        "--count",
        "50",
        "--seed",
        "9",
        "--corrupt-lhs",
    ]);
    assert_eq!(code(&out), 3, "corruption hook must trip the violation exit");
    let err = stderr(&out);
    assert!(err.contains("bound violated"), "stderr: {err}");
    // The offending configuration is dumped as a replayable record.
    assert!(err.contains("schema = 1"), "stderr: {err}");
    assert!(err.contains("rho_re"), "stderr: {err}");
}

#[test]
fn game_closed_form_value_appears_in_the_report() {
    let out = dualgame(&["game", "--n", "2", "--trials", "2000", "--seed", "5"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let analytic = field_f64(&text, "analytic_pwin");
    let ceiling = theorem1_bound(2).unwrap();
    assert!(
        (analytic - ceiling).abs() <= 1e-6,
        "analytic win probability {analytic} vs ceiling {ceiling}"
    );
    assert_eq!(field(&text, "trials"), "2000");

    // A single round is still a valid (if noisy) game.
    let tiny = dualgame(&["game", "--n", "3", "--trials", "1", "--seed", "1"]);
    assert_eq!(code(&tiny), 0, "stderr: {}", stderr(&tiny));
}

#[test]
fn cheating_player_wins_every_round() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("cheat.txt");
    let out = dualgame(&[
        "game",
        "--n",
        "4",
        "--cheat",
        "--trials",
        "500",
        "--seed",
        "2",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(field(&text, "empirical_pwin"), "1.0000000000000000e0");
    assert_eq!(field(&text, "analytic_pwin"), "1.0000000000000000e0");
    let wins: u64 = field(&text, "wins_ways").parse::<u64>().unwrap()
        + field(&text, "wins_phases").parse::<u64>().unwrap();
    assert_eq!(wins, 500);
}

#[test]
fn seed_environment_variable_matches_the_flag() {
    let via_env = run_with_env(
        &["game", "--n", "2", "--trials", "400"],
        &[("DUALITY_SEED", "123")],
    );
    let via_flag = dualgame(&["game", "--n", "2", "--trials", "400", "--seed", "123"]);
    assert_eq!(code(&via_env), 0);
    assert_eq!(code(&via_flag), 0);
    let env_text = stdout(&via_env);
    assert_eq!(field(&env_text, "seed"), "123");
    assert_eq!(env_text, stdout(&via_flag), "env seed and flag seed must agree");
}

#[test]
fn config_file_round_trip_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("game.toml");
    let cfg = GameConfig::theorem1(3, 1_000, 11).unwrap();
    std::fs::write(&path, GameConfigRecord::from_config(&cfg).to_toml().unwrap()).unwrap();

    let first = dualgame(&["game", "--config", path.to_str().unwrap()]);
    let second = dualgame(&["game", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&first), 0, "stderr: {}", stderr(&first));
    let text = stdout(&first);
    assert_eq!(text, stdout(&second), "same config must replay identically");
    assert_eq!(field(&text, "n"), "3");
    assert_eq!(field(&text, "trials"), "1000");
    assert_eq!(field(&text, "seed"), "11");

    // Command-line overrides win over the file.
    let overridden = dualgame(&[
        "game",
        "--config",
        path.to_str().unwrap(),
        "--trials",
        "50",
        "--seed",
        "9",
    ]);
    assert_eq!(code(&overridden), 0, "stderr: {}", stderr(&overridden));
    let text = stdout(&overridden);
    assert_eq!(field(&text, "trials"), "50");
    assert_eq!(field(&text, "seed"), "9");
}

/// A small hand-written configuration: a mixed two-arm state with real
/// overlap 1/2 and trivial reference phases.
const HAND_CONFIG: &str = "schema = 1\n\
    n = 2\n\
    trials = 100\n\
    seed = 1\n\
    coin_bias = 0.5\n\
    rho_re = [0.5, 0.25, 0.25, 0.5]\n\
    rho_im = [0.0, 0.0, 0.0, 0.0]\n\
    s_re = [1.0, 0.5, 0.5, 1.0]\n\
    s_im = [0.0, 0.0, 0.0, 0.0]\n\
    phases = [0.0, 0.0, 0.0, 0.0]\n";

#[test]
fn malformed_configs_exit_two_with_diagnostics() {
    let dir = tempfile::tempdir().unwrap();

    let good = dir.path().join("good.toml");
    std::fs::write(&good, HAND_CONFIG).unwrap();
    let out = dualgame(&["game", "--config", good.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let nan = dir.path().join("nan.toml");
    std::fs::write(&nan, HAND_CONFIG.replace("[0.5, 0.25", "[0.5, nan")).unwrap();
    let out = dualgame(&["game", "--config", nan.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "non-finite entries must be rejected");
    let err = stderr(&out);
    assert!(err.contains("error:"), "stderr: {err}");
    assert!(err.contains("non-finite"), "stderr: {err}");

    let future = dir.path().join("future.toml");
    std::fs::write(&future, HAND_CONFIG.replace("schema = 1", "schema = 2")).unwrap();
    let out = dualgame(&["game", "--config", future.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "unknown schema versions must be rejected");

    let missing = dir.path().join("absent.toml");
    let out = dualgame(&["game", "--config", missing.to_str().unwrap()]);
    assert_eq!(code(&out), 2, "missing file must be an input error");
}

#[test]
fn invalid_invocations_exit_two() {
    // Neither a config file nor an arm count.
    let out = dualgame(&["game", "--trials", "10"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("error:"));

    // Zero trials.
    let out = dualgame(&["game", "--n", "2", "--trials", "0"]);
    assert_eq!(code(&out), 2);

    // A single arm is not an interferometer.
    let out = dualgame(&["region", "--n", "1", "--samples", "0"]);
    assert_eq!(code(&out), 2);

    // Degenerate boundary resolution.
    let out = dualgame(&["region", "--n", "2", "--grid", "1", "--samples", "0"]);
    assert_eq!(code(&out), 2);

    // Empty soundness sweep.
    let out = dualgame(&["bound-check", "--n", "2", "--count", "0"]);
    assert_eq!(code(&out), 2);

    // Unknown verification suite.
    let out = dualgame(&["verify", "--only", "astrology"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn verify_runs_a_single_suite() {
    let out = dualgame(&["verify", "--only", "numerics", "--seed", "3"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "numerics suite has four checks:\n{text}");
    for line in &lines {
        assert!(line.starts_with("PASS [numerics]"), "unexpected line: {line}");
    }
    assert!(stderr(&out).contains("all 4 checks passed"));
}

#[test]
fn verify_validates_a_config_file_first() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(&good, HAND_CONFIG).unwrap();
    let out = dualgame(&[
        "verify",
        "--only",
        "numerics",
        "--seed",
        "3",
        "--config",
        good.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("configuration file valid: n = 2"));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, HAND_CONFIG.replace("[0.5, 0.25", "[0.5, nan")).unwrap();
    let out = dualgame(&[
        "verify",
        "--only",
        "numerics",
        "--config",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "invalid config must fail before the suites");
}

#[test]
fn symmetric_sweep_parses_and_hits_the_ceiling() {
    let out = dualgame(&["symmetric", "--n", "3", "--grid", "9"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let rows = parse_symmetric_csv(&stdout(&out)).expect("well-formed sweep CSV");
    // Nine grid points plus the inserted optimal-overlap row.
    assert_eq!(rows.len(), 10);
    for row in &rows {
        assert!(row.lemma1_lhs.abs() <= 1e-8);
        assert!((row.x - row.s).abs() <= 1e-12);
    }
    let err = stderr(&out);
    assert!(err.contains("optimal overlap"), "stderr: {err}");
}

#[test]
fn json_outputs_are_valid_json() {
    let out = dualgame(&[
        "game", "--n", "2", "--trials", "100", "--seed", "4", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("game JSON");
    assert!(value["analytic_pwin"].is_f64());
    assert_eq!(value["trials"], 100);

    let out = dualgame(&["verify", "--only", "numerics", "--seed", "3", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("verify JSON");
    let checks = value.as_array().expect("array of checks");
    assert_eq!(checks.len(), 4);
    assert!(checks.iter().all(|c| c["pass"] == true));

    let out = dualgame(&[
        "symmetric", "--n", "2", "--grid", "5", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("sweep JSON");
    assert!(value.as_array().expect("array of rows").len() >= 5);

    let out = dualgame(&[
        "region", "--n", "2", "--grid", "8", "--samples", "2", "--seed", "1", "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("region JSON");
    assert!(!value.as_array().expect("array of rows").is_empty());
}
