//! End-to-end tests of the `ioncool` binary: exit codes, file output,
//! determinism and the validation-suite report.

use std::path::Path;
use std::process::{Command, Output};

fn ioncool(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ioncool"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SPECTRUM_CONF: &str = "ion = ca\nomega_w_mhz = 1\nomega_st_mhz = 100\n\
    delta_st_mhz = -100\nscan = delta_w\nscan_min = -55\nscan_max = 15\n\
    scan_points = 201\n";

#[test]
fn spectrum_writes_deterministic_csv_with_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(dir.path(), "run.conf", SPECTRUM_CONF);

    let out = ioncool(
        &["spectrum", "--config", &conf, "--out", "a.csv"],
        dir.path(),
    );
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();

    // metadata header embeds the resolved parameters
    assert!(a.contains("# atom = Ca+"));
    assert!(a.contains("# omega_st_mhz = 100"));
    assert!(a.contains("# beta_eg = 1"));
    assert!(a.lines().any(|l| l == "delta_w_mhz,pop_g,pop_m,pop_e"));
    assert_eq!(a.lines().filter(|l| !l.starts_with('#')).count(), 202); // header + 201 rows

    // populations sum to one on every row
    for line in a.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[1] + v[2] + v[3] - 1.0).abs() < 1e-8);
    }

    // identical config, identical bytes
    let out2 = ioncool(
        &["spectrum", "--config", &conf, "--out", "b.csv"],
        dir.path(),
    );
    assert!(out2.status.success());
    let b = std::fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn spectrum_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(
        dir.path(),
        "run.conf",
        &format!("{SPECTRUM_CONF}format = json\nscan_points = 11\n")
            .replace("scan_points = 201\n", ""),
    );
    let out = ioncool(&["spectrum", "--config", &conf], dir.path());
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["meta"]["atom"], "Ca+");
    assert_eq!(v["data"]["pop_e"].as_array().unwrap().len(), 11);
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // empty scan range
    let conf = write_config(
        dir.path(),
        "bad.conf",
        &SPECTRUM_CONF.replace("scan_max = 15", "scan_max = -55"),
    );
    let out = ioncool(&["spectrum", "--config", &conf], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // unknown key
    let conf = write_config(
        dir.path(),
        "bad2.conf",
        &format!("{SPECTRUM_CONF}nope = 1\n"),
    );
    let out = ioncool(&["spectrum", "--config", &conf], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));

    // missing config file
    let out = ioncool(&["spectrum", "--config", "does-not-exist.conf"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn degenerate_solve_exits_3_and_names_the_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(
        dir.path(),
        "deg.conf",
        "ion = ca\nomega_w_mhz = 0\nomega_st_mhz = 0\ndelta_st_mhz = -100\n\
         scan = delta_w\nscan_min = -10\nscan_max = 10\nscan_points = 3\n",
    );
    let out = ioncool(&["spectrum", "--config", &conf], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("degenerate"), "stderr: {err}");
    assert!(err.contains("delta_w"), "stderr: {err}");
}

#[test]
fn linewidth_single_point_and_overestimate() {
    let dir = tempfile::tempdir().unwrap();
    // one-point grid is valid
    let conf = write_config(
        dir.path(),
        "lw.conf",
        "ion = ca\nomega_w_mhz = 0.1\nomega_st_mhz = 20\ndelta_st_mhz = -200\n\
         scan = ratio\nscan_min = 0.2\nscan_max = 0.4\nscan_points = 1\n",
    );
    let out = ioncool(&["linewidth", "--config", &conf], dir.path());
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let row = text.lines().last().unwrap();
    let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
    // numeric and formula widths agree within 5% at low saturation
    assert!((v[1] - v[2]).abs() / v[1] < 0.05, "row: {row}");

    // strong weak-drive + ratio >= 1: the formula overestimates
    let conf = write_config(
        dir.path(),
        "lw2.conf",
        "ion = ca\nomega_w_mhz = 5\nomega_st_mhz = 20\ndelta_st_mhz = -200\n\
         scan = ratio\nscan_min = 2\nscan_max = 4\nscan_points = 1\n",
    );
    let out = ioncool(&["linewidth", "--config", &conf], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let v: Vec<f64> = text
        .lines()
        .last()
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!(
        v[2] > v[1],
        "formula {} should exceed numeric {}",
        v[2],
        v[1]
    );
}

#[test]
fn cooling_temperature_curve_reaches_microkelvin() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(
        dir.path(),
        "cool.conf",
        "ion = ca\ncurve = temperature\nomega_w_mhz = 0.1\nomega_st_mhz = opt\n\
         delta_st_mhz = -200\nscan = ratio\nscan_min = 0.05\nscan_max = 1\n\
         scan_points = 7\nscan_spacing = log\n",
    );
    let out = ioncool(&["cooling", "--config", &conf], dir.path());
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let first_row: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!(
        first_row[1] < 100e-6,
        "T = {} K at smallest ratio",
        first_row[1]
    );
}

#[test]
fn capture_curve_is_odd_and_starts_at_zero() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write_config(
        dir.path(),
        "cap.conf",
        "ion = ca\ncurve = capture\nomega_w_mhz = 0.1\nomega_st_mhz = opt\n\
         delta_w_mhz = cooling\ndelta_st_mhz = -200\nscan = vrms\nscan_min = 0\n\
         scan_max = 0.1\nscan_points = 5\n",
    );
    let out = ioncool(&["cooling", "--config", &conf], dir.path());
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let first_row: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .nth(1)
        .unwrap()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(first_row[0], 0.0);
    assert_eq!(first_row[1], 0.0);
}

#[test]
fn optimum_reports_both_routes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ioncool(
        &["optimum", "--omega-w-mhz", "0.1", "--delta-st-mhz", "-200"],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let closed = v["closed_form_omega_st_mhz"].as_f64().unwrap();
    let numeric = v["numeric_optimum_omega_st_mhz"].as_f64().unwrap();
    assert!((closed - 33.64).abs() < 0.05, "closed form {closed}");
    assert!((numeric - 33.90).abs() < 0.05, "numeric {numeric}");
    assert!(v["closed_form"]["ratio_sq"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_json_reports_all_criteria_and_exit_code_matches() {
    let dir = tempfile::tempdir().unwrap();
    let out = ioncool(&["verify", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 9);
    let all_ok = arr.iter().all(|c| c["passed"].as_bool().unwrap());
    let expect = if all_ok { 0 } else { 4 };
    assert_eq!(out.status.code(), Some(expect));
    // the geometry criterion is always green
    let geom = arr.iter().find(|c| c["id"] == 8).unwrap();
    assert!(geom["passed"].as_bool().unwrap());
}

#[test]
fn verify_detects_injected_formula_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = ioncool(&["verify", "--json", "--inject-formula-error"], dir.path());
    assert_eq!(out.status.code(), Some(4));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let c1 = v.as_array().unwrap().iter().find(|c| c["id"] == 1).unwrap();
    assert!(!c1["passed"].as_bool().unwrap());
}

#[test]
fn shipped_figure_configs_parse_and_run() {
    // Smoke-run every shipped config with a coarse grid override; each must
    // produce a valid file.
    let dir = tempfile::tempdir().unwrap();
    let repo = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../figures");
    for (cmd, file) in [
        ("spectrum", "fig2_spectrum_vs_delta_w.conf"),
        ("spectrum", "fig3_spectrum_vs_delta_st.conf"),
        ("linewidth", "fig4_linewidth_vs_ratio.conf"),
        ("cooling", "fig5_damping_vs_detuning.conf"),
        ("cooling", "fig6_temperature_vs_ratio.conf"),
        ("cooling", "fig7_capture_force.conf"),
    ] {
        let conf = repo.join(file);
        let out = ioncool(
            &[
                cmd,
                "--config",
                conf.to_str().unwrap(),
                "--set",
                "scan_points=5",
                "--out",
                "out.csv",
            ],
            dir.path(),
        );
        assert!(
            out.status.success(),
            "{file}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
        assert!(
            text.lines().filter(|l| !l.starts_with('#')).count() >= 2,
            "{file}"
        );
    }
}
