use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mau(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mau")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// mau-mini cut down to a day and a half.
fn short_mini(dir: &Path) -> String {
    let mini = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/mau-mini.conf");
    let path = dir.join("short.conf");
    fs::write(&path, format!("include = {mini}\nname = short\nsim.duration = 36h\nsim.warm_up = 12h\n")).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn validate_presets() {
    let o = mau(&["validate", "mau-default"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("150 nodes in 17 groups, 280 cells"), "{}", stdout(&o));
    assert!(!stderr(&o).contains("warning"));

    let o = mau(&["validate", "mau-mini"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning: node total 30"), "{}", stderr(&o));
}

#[test]
fn validate_reports_bad_keys_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    fs::write(&path, "# typo below\nlink.rnage = 100\n").unwrap();
    let o = mau(&["validate", path.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("bad.conf:2: unknown key `link.rnage`"), "{}", stderr(&o));

    let o = mau(&["validate", "no-such-preset"]);
    assert!(!o.status.success());
}

#[test]
fn printed_scenario_reloads_to_the_same_hash() {
    let dir = tempfile::tempdir().unwrap();
    let o = mau(&["validate", "mau-mini", "--print"]);
    let path = dir.path().join("resolved.conf");
    fs::write(&path, stdout(&o)).unwrap();
    let a = stdout(&mau(&["validate", "mau-mini"]));
    let b = stdout(&mau(&["validate", path.to_str().unwrap()]));
    assert_eq!(a.rsplit(' ').next(), b.rsplit(' ').next());
}

#[test]
fn run_writes_identical_outputs_regardless_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let conf = short_mini(dir.path());
    let outs = [dir.path().join("a"), dir.path().join("b")];
    for (out, jobs) in outs.iter().zip(["1", "3"]) {
        let o = mau(&[
            "run", &conf, "--ttls", "1h,6h", "--seeds", "1,2", "--jobs", jobs, "--audit", "-q", "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stderr(&o).contains("audit: 0 violations"), "{}", stderr(&o));
    }
    let report = fs::read_to_string(outs[0].join("report.csv")).unwrap();
    let rows: Vec<&str> = report.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 17);
    assert!(rows[0].starts_with("protocol,ttl_s,seed,"), "{}", rows[0]);
    assert!(rows[1].starts_with("epidemic,3600,1,"), "{}", rows[1]);
    assert!(rows[16].starts_with("bubble,21600,2,"), "{}", rows[16]);
    assert!(report.starts_with("# scenario short\n# scenario_sha256 "), "{report}");
    for f in ["report.csv", "summary.csv", "fairness.csv", "delivery.gp", "cost.gp", "latency.gp", "scenario.conf"] {
        assert_eq!(fs::read(outs[0].join(f)).unwrap(), fs::read(outs[1].join(f)).unwrap(), "{f}");
    }
    let summary = fs::read_to_string(outs[0].join("summary.csv")).unwrap();
    assert_eq!(summary.lines().filter(|l| !l.starts_with('#')).count(), 9);
}

#[test]
fn export_trace_is_stable_and_feeds_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let conf = short_mini(dir.path());
    let t1 = dir.path().join("t1.txt");
    let plan = dir.path().join("plan.txt");
    let pos = dir.path().join("pos.txt");
    let o = mau(&[
        "export-trace", &conf, "--seed", "1", "--out", t1.to_str().unwrap(), "--plan", plan.to_str().unwrap(),
        "--mobility", pos.to_str().unwrap(), "--mobility-every", "1h",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = mau(&["export-trace", &conf, "--seed", "1"]);
    let text = fs::read_to_string(&t1).unwrap();
    assert_eq!(stdout(&o), text);
    assert!(text.starts_with("NODES 30\nCONN "));
    assert!(fs::read_to_string(&plan).unwrap().starts_with("PAIR 0 "));
    // 37 hourly samples of 30 nodes.
    assert_eq!(fs::read_to_string(&pos).unwrap().lines().count(), 37 * 30);

    let first = text.lines().nth(1).unwrap();
    let f: Vec<&str> = first.split(' ').collect();
    let depart_ms: u64 = f[1].parse().unwrap();
    let o = mau(&["oracle", t1.to_str().unwrap(), f[2], f[3], &format!("{depart_ms}ms"), "1h"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), format!("arrival {depart_ms} ms (latency 0 ms)\n"));

    let o = mau(&["oracle", t1.to_str().unwrap(), "0", "0", "0", "1h"]);
    assert!(!o.status.success());
}
