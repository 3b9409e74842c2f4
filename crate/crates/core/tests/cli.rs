use std::path::Path;
use std::process::{Command, Output};

fn curvecast(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvecast"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn ok(out: Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn simulate_then_every_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(curvecast(&["simulate", "--days", "120", "--seed", "5", "--out", "data"], d));
    assert!(d.join("data/futures.csv").exists() && d.join("data/factors.csv").exists());

    std::fs::write(
        d.join("run.cfg"),
        "futures = data/futures.csv\nfactors = data/factors.csv\noos-len = 500\nbootstrap-reps = 100\nout = from_file\n",
    )
    .unwrap();

    ok(curvecast(&["ingest", "--config", "run.cfg", "--out", "stats"], d));
    assert!(d.join("stats/futures_stats.csv").exists());

    // flags override the file: oos-len 500 would not fit 120 days
    let table = ok(curvecast(
        &["backtest", "--config", "run.cfg", "--oos-len", "20", "--models", "FTS,RW", "--out", "bt"],
        d,
    ));
    assert!(table.starts_with("tenor,"));
    assert!(!d.join("from_file").exists());
    let manifest = std::fs::read_to_string(d.join("bt/manifest.txt")).unwrap();
    assert!(manifest.contains("oos-len = 20"));

    let mcs = ok(curvecast(
        &["mcs", "--losses", "bt/loss_matrix.csv", "--statistic", "max", "--alpha", "0.1", "--block-len", "2", "--out", "m"],
        d,
    ));
    assert!(mcs.contains("max alpha=0.1"));

    ok(curvecast(&["insample", "--config", "run.cfg", "--oos-len", "0", "--out", "ins"], d));
    ok(curvecast(&["decompose", "--config", "run.cfg", "--p1", "0.95", "--out", "dec"], d));
    assert!(std::fs::read_dir(d.join("dec")).unwrap().count() > 0);
}

#[test]
fn bad_input_fails_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let out = curvecast(&["backtest", "--futures", "missing.csv"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));

    let out = curvecast(&["backtest", "--statistic", "median"], dir.path());
    assert!(!out.status.success());
}
