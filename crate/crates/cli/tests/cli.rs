use std::path::Path;
use std::process::{Command, Output};

fn cones(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cones"))
        .args(args)
        .env("CONES_OUT", out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_writes_trace_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = cones(
        dir.path(),
        &["run", "--policy", "greedy", "--family", "directional", "--param", "D=10", "--T", "5"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("greedy_directional_5.csv")).unwrap();
    assert_eq!(text.lines().count(), 6);
    let summary = stdout(&o);
    let regret: f64 = summary
        .split_whitespace()
        .find_map(|w| w.strip_prefix("regret_final="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(regret <= 0.0);
}

#[test]
fn json_format() {
    let dir = tempfile::tempdir().unwrap();
    let o = cones(
        dir.path(),
        &["run", "--policy", "frugal", "--family", "sc_lb", "--T", "4", "--format", "json"],
    );
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("frugal_sc_lb_4.json")).unwrap();
    assert!(text.contains("\"regret_cum\""));
}

#[test]
fn unknown_family_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = cones(dir.path(), &["run", "--policy", "greedy", "--family", "spiral", "--T", "5"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    for fam in ["sc_lb", "convex_lb", "directional", "frozen", "sharp_adv", "sc_adv", "random_1d"] {
        assert!(err.contains(fam), "{err}");
    }
}

#[test]
fn unknown_param_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = cones(
        dir.path(),
        &["run", "--policy", "greedy", "--family", "sc_lb", "--param", "radius=2", "--T", "5"],
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cones(dir.path(), &["reproduce", "fig9"]).status.code(), Some(2));
    assert_eq!(cones(dir.path(), &["run", "--policy", "greedy"]).status.code(), Some(2));
    assert_eq!(cones(dir.path(), &["verify", "plots"]).status.code(), Some(2));
}

#[test]
fn sweep_single_horizon_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--policy", "frugal", "--family", "frozen"];
    let s = cones(dir.path(), &[&["sweep"], &args[..], &["--T-list", "20"]].concat());
    let r = cones(dir.path(), &[&["run"], &args[..], &["--T", "20"]].concat());
    assert!(s.status.success() && r.status.success());
    let pick = |text: &str, key: &str| -> String {
        text.split_whitespace()
            .find_map(|w| w.strip_prefix(key).map(str::to_string))
            .unwrap()
    };
    let (s, r) = (stdout(&s), stdout(&r));
    assert_eq!(pick(&s, "regret_final="), pick(&r, "regret_final="));
    assert_eq!(pick(&s, "move_final="), pick(&r, "move_final="));
    let sweep = std::fs::read_to_string(dir.path().join("frugal_frozen_sweep.csv")).unwrap();
    assert!(sweep.starts_with("T,regret_final,move_final,jumps,runtime_ms\n"));
}

#[test]
fn sweep_reports_slope() {
    let dir = tempfile::tempdir().unwrap();
    let o = cones(
        dir.path(),
        &["sweep", "--policy", "greedy", "--family", "sc_lb", "--T-list", "16,32,64,128"],
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("loglog slope of move_final: 0."));
}

#[test]
fn reproduce_fig3_and_fig5() {
    let dir = tempfile::tempdir().unwrap();
    let o = cones(dir.path(), &["reproduce", "fig3"]);
    assert!(o.status.success());
    for f in ["instance.json", "geometry.csv", "greedy.csv", "frugal.csv", "lsp.csv"] {
        assert!(dir.path().join(format!("fig3_sc_lb_7_{f}")).exists(), "{f}");
    }
    let o = cones(dir.path(), &["reproduce", "fig5"]);
    assert!(o.status.success());
    let frugal = std::fs::read_to_string(dir.path().join("fig5_frozen_200_frugal.csv")).unwrap();
    assert_eq!(frugal.lines().count(), 201);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["run", "--policy", "ab", "--family", "random_1d", "--seed", "7", "--T", "30"];
    assert!(cones(a.path(), &args).status.success());
    assert!(cones(b.path(), &args).status.success());
    let name = "ab_random_1d_30.csv";
    assert_eq!(
        std::fs::read(a.path().join(name)).unwrap(),
        std::fs::read(b.path().join(name)).unwrap()
    );
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let o = cones(dir.path(), &["verify", "oracle"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("PASS oracle::dp_matches_enumeration"));
    let o = cones(dir.path(), &["verify", "algorithms", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL algorithms::frugal_regret_nonpositive"));
}

#[test]
fn cones_out_overrides_flag() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let flag = flag_dir.path().to_str().unwrap();
    let o = cones(
        env_dir.path(),
        &["run", "--policy", "greedy", "--family", "sc_lb", "--T", "3", "--out-dir", flag],
    );
    assert!(o.status.success());
    assert!(env_dir.path().join("greedy_sc_lb_3.csv").exists());
    assert!(!flag_dir.path().join("greedy_sc_lb_3.csv").exists());
}
