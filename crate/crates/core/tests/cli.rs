use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_green-router"))
}

#[test]
fn usage_errors_exit_nonzero_with_a_message() {
    let out = bin().args(["solve", "--mode", "fast", "x"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("fast"));
    let out = bin().arg("frobnicate").output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn missing_instance_is_an_error() {
    let out = bin().args(["solve", "/nonexistent/instance.txt"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn quick_oracle_passes() {
    let out = bin().args(["oracle", "--quick"]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 4);
}

#[test]
fn christofides_solve_reports_a_gap() {
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/data/christofides/vrpnc1.txt");
    let out = bin().args(["solve", file, "--problem", "fcvrp", "--runs", "2", "--routes"]).output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    let best = text.lines().find(|l| l.starts_with("best ")).unwrap();
    assert!(best.contains("gap=") && best.ends_with('%'), "{best}");
    assert_eq!(text.lines().filter(|l| l.starts_with("route ")).count(), 5);
}
