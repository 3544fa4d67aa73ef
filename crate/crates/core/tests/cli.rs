use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sos_auction::fixtures::worked_instance;
use sos_auction::valuation::{AuctionInstance, SignalSpace, Valuation};

const BIN: &str = env!("CARGO_BIN_EXE_sos-auction");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_instance(dir: &Path, name: &str, inst: &AuctionInstance) -> String {
    let path = dir.join(name);
    fs::write(&path, inst.to_json().unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}

/// Two agents whose first valuation has complementary signals.
fn supermodular() -> AuctionInstance {
    let space = SignalSpace::uniform(2, 2).unwrap();
    let v1 = Valuation::table(vec![0.0, 0.0, 1.0, 3.0]);
    let v2 = Valuation::table(vec![0.0, 1.0, 0.0, 1.0]);
    AuctionInstance::new(space, vec![v1, v2]).unwrap()
}

#[test]
fn verify_passes_on_worked_instance() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_instance(dir.path(), "worked.json", &worked_instance());
    let out = run(&["verify", &file, "--all"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    for name in ["monotone", "sos", "value-deviation", "amortized-monotonicity", "sampling-lower-bound"] {
        assert!(text.contains(&format!("PASS {name}")), "{text}");
    }
}

#[test]
fn supermodular_table_fails_sos() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_instance(dir.path(), "bad.json", &supermodular());
    let out = run(&["verify", &file, "--sos"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("FAIL sos"));
}

#[test]
fn malformed_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{\"space\": [2, 2], \"valuations\": ").unwrap();
    let out = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());
    assert_eq!(code(&run(&["verify", "/nonexistent/instance.json"])), 2);
}

#[test]
fn unknown_flags_are_usage_errors() {
    assert_eq!(code(&run(&["run", "--bogus"])), 2);
    assert_eq!(code(&run(&["run", "--generator", "no-such-family"])), 2);
    assert_eq!(code(&run(&["run", "--generator", "all", "--p", "1.5", "--mechanism", "sampling"])), 2);
}

#[test]
fn run_campaign_passes() {
    let out = run(&["run", "--generator", "all", "--count", "4", "--seed", "3", "--agents", "2..3"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).lines().last().unwrap().starts_with("PASS mixture"));
}

#[test]
fn run_in_monte_carlo_mode_skips_ic() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_instance(dir.path(), "worked.json", &worked_instance());
    let out = run(&["run", "--instance", &file, "--mechanism", "sampling", "--mode", "monte-carlo", "--samples", "20000"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("SKIP ic-ir"), "{}", stdout(&out));
}

#[test]
fn run_outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |sub: &str| {
        vec![
            "run".to_string(),
            "--generator".into(),
            "random-table".into(),
            "--count".into(),
            "2".into(),
            "--seed".into(),
            "11".into(),
            "--out-dir".into(),
            dir.path().join(sub).to_string_lossy().into_owned(),
        ]
    };
    for sub in ["a", "b"] {
        let a = args(sub);
        let out = run(&a.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(code(&out), 0);
    }
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().any(|n| n == "summary.json"));
    for name in names {
        assert_eq!(
            fs::read(dir.path().join("a").join(&name)).unwrap(),
            fs::read(dir.path().join("b").join(&name)).unwrap(),
            "{name:?}"
        );
    }
    let csv = fs::read_dir(dir.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.extension().is_some_and(|e| e == "csv"))
        .unwrap();
    assert!(fs::read_to_string(csv).unwrap().starts_with("profile,v1,v2,welfare,ratio,bound,slack\n"));
}

#[test]
fn reduce_writes_a_strong_sos_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_instance(dir.path(), "worked.json", &worked_instance());
    let out_dir = dir.path().join("lift");
    let out = run(&["reduce", &file, "--epsilon", "2", "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let reduced = out_dir.join("reduced.json");
    let check = run(&["verify", reduced.to_str().unwrap(), "--strong-sos", "--sos"]);
    assert_eq!(code(&check), 0, "{}", stdout(&check));
    assert!(stdout(&check).contains("PASS strong-sos"));
}

#[test]
fn reduction_blowup_exits_with_cap_code() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_instance(dir.path(), "worked.json", &worked_instance());
    let out = run(&["reduce", &file, "--epsilon", "0.001"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn enumeration_cap_from_environment() {
    let out = Command::new(BIN)
        .args(["run", "--generator", "additive-concave", "--count", "1", "--agents", "3", "--signals", "4"])
        .env("SOS_MAX_PROFILES", "10")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
}

#[test]
fn sweep_reports_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_instance(dir.path(), "worked.json", &worked_instance());
    let csv = dir.path().join("sweep.csv");
    let out = run(&["sweep", "--instance", &file, "--grid", "0.3,0.54,0.7", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("best grid p 0.54"));
    assert_eq!(fs::read_to_string(csv).unwrap().lines().count(), 4);
}

#[test]
fn generate_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gen.json");
    let out = run(&["generate", "--family", "budget-capped", "--agents", "3", "--signals", "3", "--seed", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let inst = AuctionInstance::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(inst.agents(), 3);
    assert_eq!(code(&run(&["verify", path.to_str().unwrap(), "--sos", "--monotone"])), 0);
}

#[test]
fn documented_run_examples() {
    let out = run(&["run", "--mechanism", "mixture", "--params", "optimal", "--generator", "additive-concave", "--count", "50", "--seed", "1"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let last = stdout(&out).lines().last().unwrap().to_string();
    let ratio: f64 = last.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(ratio >= 0.30162, "{last}");

    let out = run(&["run", "--mechanism", "sampling", "--p", "0.5", "--generator", "all", "--count", "8", "--seed", "2"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let last = stdout(&out).lines().last().unwrap().to_string();
    let ratio: f64 = last.rsplit(' ').next().unwrap().parse().unwrap();
    assert!(ratio >= 0.25, "{last}");
}
