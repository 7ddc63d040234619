use std::path::Path;
use std::process::{Command, Output};

use noisy_grover_cli::output::{parse_csv, CSV_HEADER};
use noisy_grover_cli::{run, Exit, OUT_DIR_ENV};

const CHI_1: &str = "6.083668013960418";

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noisy-grover"))
        .args(args)
        .env_remove(OUT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn in_process(args: &[&str]) -> (Exit, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let exit = run(
        std::iter::once("noisy-grover").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (exit, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes_follow_the_contract() {
    assert_eq!(bin(&["kraus", "--chi", "1"]).status.code(), Some(0));
    assert_eq!(bin(&["kraus", "--chi", "-1"]).status.code(), Some(1));
    assert_eq!(bin(&["chi-star", "--n-max", "0"]).status.code(), Some(1));
    assert_eq!(bin(&["chi-star", "--n-max", "3"]).status.code(), Some(0));
    assert_eq!(
        bin(&["chi-star", "--n-max", "1", "--perturb", "0.1"]).status.code(),
        Some(2)
    );
    assert_eq!(bin(&["search", "--n", "1"]).status.code(), Some(1));
    assert_eq!(bin(&["search", "--n", "4", "--w", "4"]).status.code(), Some(1));
    assert_eq!(bin(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    assert_eq!(bin(&["--version"]).status.code(), Some(0));
}

#[test]
fn kraus_reports_the_zero_noise_gap_and_vanishing_r1_at_magic_strength() {
    let (exit, out, _) = in_process(&["kraus", "--chi", "0"]);
    assert_eq!(exit, Exit::Success);
    assert!(
        out.contains("Choi distance closed form vs Hamiltonian = 2.000000e0"),
        "{out}"
    );

    let (exit, out, _) = in_process(&["kraus", "--chi", CHI_1]);
    assert_eq!(exit, Exit::Success);
    let r1 = out.lines().find(|l| l.starts_with("|R1|")).unwrap();
    let value: f64 = r1.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(value < 1e-14, "{r1}");
}

#[test]
fn chi_star_table_matches_closed_form() {
    let (exit, out, _) = in_process(&["chi-star", "--n-max", "2"]);
    assert_eq!(exit, Exit::Success);
    let rows: Vec<Vec<f64>> = out
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1], 6.083668013960418);
    assert_eq!(rows[1][1], 12.467809323099123);
    assert!(rows.iter().all(|r| r[2] <= 1e-10));

    let (exit, out, _) = in_process(&["chi-star", "--n-max", "1", "--perturb", "0.1"]);
    assert_eq!(exit, Exit::Violation);
    let psi: f64 = out.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!(psi > 1e-3);
}

#[test]
fn noiseless_four_item_search_succeeds_in_one_step() {
    let out = bin(&["search", "--chi", "0", "--n", "4", "--m", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = parse_csv(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 2);
    assert!((rows[1].p_success - 1.0).abs() <= 1e-10);
    assert_eq!(rows[0].p_success, 0.25);
}

#[test]
fn magic_strength_search_peaks_above_threshold() {
    let (exit, out, _) = in_process(&["search", "--chi", CHI_1, "--n", "64", "--m", "32"]);
    assert_eq!(exit, Exit::Success);
    let rows = parse_csv(&out).unwrap();
    let best = rows.iter().map(|r| r.p_success).fold(0.0, f64::max);
    assert!(best >= 0.95, "{best}");
}

#[test]
fn bloch_norm_column_contracts_geometrically() {
    let (exit, out, _) = in_process(&["search", "--chi", "1", "--n", "16", "--m", "40"]);
    assert_eq!(exit, Exit::Success);
    let rows = parse_csv(&out).unwrap();
    let norms: Vec<f64> = rows.iter().map(|r| r.bloch_norm).collect();
    let resolvable: Vec<f64> = norms.iter().copied().take_while(|&b| b > 1e-6).collect();
    assert!(resolvable.len() > 5);
    for w in resolvable.windows(2) {
        assert!(w[1] < w[0]);
    }
    let ratios: Vec<f64> = resolvable.windows(2).map(|w| w[1] / w[0]).collect();
    for r in &ratios {
        assert!((r - ratios[0]).abs() <= 1e-8, "{ratios:?}");
    }
}

#[test]
fn json_mirrors_csv_rows_and_carries_discrepancies() {
    let (_, csv, _) = in_process(&["search", "--chi", "2", "--n", "8", "--m", "6"]);
    let (exit, json, _) = in_process(&["search", "--chi", "2", "--n", "8", "--m", "6", "--format", "json"]);
    assert_eq!(exit, Exit::Success);
    let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
    let rows = parse_csv(&csv).unwrap();
    let json_rows = doc["rows"].as_array().unwrap();
    assert_eq!(json_rows.len(), rows.len());
    for (j, r) in json_rows.iter().zip(&rows) {
        assert_eq!(j["p_success"].as_f64().unwrap(), r.p_success);
        assert_eq!(j["m"].as_u64().unwrap() as usize, r.m);
    }
    let kinds: Vec<&str> = doc["discrepancies"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["kind"].as_str().unwrap())
        .collect();
    assert!(kinds.contains(&"prop3_normalization"));
}

#[test]
fn sweep_emits_one_block_per_cell_in_chi_major_order() {
    let args = ["sweep", "--chi", &format!("0,1,{CHI_1}"), "--n", "4,16", "--m", "8"];
    let first = bin(&args);
    assert_eq!(first.status.code(), Some(0));
    let text = stdout(&first);
    assert_eq!(text.lines().filter(|l| *l == CSV_HEADER).count(), 6);

    let order: Vec<(f64, usize)> = text
        .split(CSV_HEADER)
        .filter(|b| !b.trim().is_empty())
        .map(|block| {
            let rows = parse_csv(&format!("{CSV_HEADER}{block}")).unwrap();
            (rows[0].chi, rows[0].n)
        })
        .collect();
    let chi1: f64 = CHI_1.parse().unwrap();
    assert_eq!(
        order,
        vec![(0.0, 4), (0.0, 16), (1.0, 4), (1.0, 16), (chi1, 4), (chi1, 16)]
    );

    let second = bin(&args);
    assert_eq!(first.stdout, second.stdout, "sweep output must be byte-identical");
}

#[test]
fn sweep_range_and_per_cell_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cells");
    let (exit, stdout, _) = in_process(&[
        "sweep",
        "--chi-range",
        "0:1:0.5",
        "--n",
        "4",
        "--m",
        "3",
        "--per-cell",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(exit, Exit::Success);
    assert!(stdout.is_empty());
    let mut names: Vec<String> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["chi0.5_n4.csv", "chi0_n4.csv", "chi1_n4.csv"]);
    let rows = parse_csv(&std::fs::read_to_string(out.join("chi1_n4.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
}

#[test]
fn sweep_usage_errors() {
    assert_eq!(bin(&["sweep", "--chi", "", "--n", "4"]).status.code(), Some(1));
    assert_eq!(bin(&["sweep", "--chi", "1", "--n", ""]).status.code(), Some(1));
    assert_eq!(
        bin(&["sweep", "--chi", "1", "--chi-range", "0:1:1", "--n", "4"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(bin(&["sweep", "--chi", "1,-2", "--n", "4"]).status.code(), Some(1));
    assert_eq!(
        bin(&["sweep", "--chi", "1", "--n", "4", "--per-cell"]).status.code(),
        Some(1)
    );
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.csv");
    let out = bin(&["search", "--n", "4", "--m", "1", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!Path::new(&target).exists());
}

#[test]
fn output_directory_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_noisy-grover"))
        .args(["search", "--chi", "0.5", "--n", "4", "--m", "2"])
        .env(OUT_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let file = dir.path().join("search_chi0.5_n4.csv");
    assert_eq!(parse_csv(&std::fs::read_to_string(file).unwrap()).unwrap().len(), 3);
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# small run\nchi = 1.5\nn = 8\nm-max = 3\nformat = csv\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let (exit, out, _) = in_process(&["search", "--config", cfg]);
    assert_eq!(exit, Exit::Success);
    let rows = parse_csv(&out).unwrap();
    assert_eq!((rows.len(), rows[0].n, rows[0].chi), (4, 8, 1.5));

    let (_, out, _) = in_process(&["search", "--config", cfg, "--n", "4"]);
    assert_eq!(parse_csv(&out).unwrap()[0].n, 4);

    let (exit, _, _) = in_process(&["search", "--config", "/nonexistent/run.conf"]);
    assert_eq!(exit, Exit::UsageOrIo);
}

#[test]
fn flipped_branch_keeps_the_damping_rate() {
    let (_, plain, _) = in_process(&["search", "--chi", "5", "--n", "8", "--m", "5"]);
    let (exit, flipped, _) = in_process(&["search", "--chi", "5", "--n", "8", "--m", "5", "--flip-psi"]);
    assert_eq!(exit, Exit::Success);
    let (a, b) = (parse_csv(&plain).unwrap(), parse_csv(&flipped).unwrap());
    // the Bloch norm decays by |cos 2 psi| on either branch
    for (x, y) in a.iter().zip(&b) {
        assert!((x.bloch_norm - y.bloch_norm).abs() < 1e-10);
        assert!((x.entropy_nats - y.entropy_nats).abs() < 1e-10);
    }
}

#[test]
fn verify_is_seeded_and_reports_discrepancies() {
    let a = bin(&["verify", "--seed", "42", "--random-chi", "100"]);
    let b = bin(&["verify", "--seed", "42", "--random-chi", "100"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["passed"], true);
    assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    let prop1 = doc["discrepancies"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|d| d["kind"] == "prop1_choi_gap")
        .count();
    assert!(prop1 >= 1);
    assert!(doc["discrepancies"]
        .as_array()
        .unwrap()
        .iter()
        .all(|d| d["magnitude"].as_f64().unwrap() >= 0.0));

    assert_eq!(bin(&["verify", "--strict-paper"]).status.code(), Some(2));
}

#[test]
fn verify_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.json");
    let (exit, out, err) = in_process(&["verify", "--out", path.to_str().unwrap()]);
    assert_eq!(exit, Exit::Success);
    assert!(out.is_empty());
    assert_eq!(err.lines().filter(|l| l.starts_with("PASS ")).count(), 6);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(doc["seed"], 42);
}
