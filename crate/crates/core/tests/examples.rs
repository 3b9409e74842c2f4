use std::path::PathBuf;
use std::process::Command;

fn example(name: &str) -> PathBuf {
    // target/<profile>/deps/<this test> -> target/<profile>/examples/<name>
    let exe = std::env::current_exe().unwrap();
    let dir = exe.parent().unwrap().parent().unwrap().join("examples");
    dir.join(format!("{name}{}", std::env::consts::EXE_SUFFIX))
}

fn run(name: &str) -> String {
    let path = example(name);
    assert!(path.exists(), "{} not built; run through `cargo test`", path.display());
    let out = Command::new(&path).output().unwrap();
    assert!(
        out.status.success(),
        "{name} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn ingest_panel() {
    assert!(!run("ingest_panel").is_empty());
}

#[test]
fn simulate_curves() {
    assert!(!run("simulate_curves").is_empty());
}

#[test]
fn fpca_decomposition() {
    assert!(run("fpca_decomposition").contains("K ="));
}

#[test]
fn damped_trend() {
    assert!(!run("damped_trend").is_empty());
}

#[test]
fn forecasters() {
    assert!(!run("forecasters").is_empty());
}

#[test]
fn loss_functions() {
    assert!(!run("loss_functions").is_empty());
}

#[test]
fn model_confidence_set() {
    assert!(!run("model_confidence_set").is_empty());
}

#[test]
fn expanding_backtest() {
    assert!(!run("expanding_backtest").is_empty());
}

#[test]
fn insample_eval() {
    assert!(run("insample_eval").contains("Overall"));
}
