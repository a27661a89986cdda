use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agentmpc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenario(name: &str) -> String {
    format!("{}/scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn demo_scenario_accepts() {
    let o = bin(&["run", &scenario("demo_sum.txt")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "ACCEPTED value=60 support=5/5\n");
}

#[test]
fn hazard_scenario_accepts_wrong_value() {
    let o = bin(&["run", &scenario("hazard_third.txt")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "ACCEPTED value=999 support=5/9\n");
}

#[test]
fn blind_scenario_opens_result() {
    let o = bin(&["run", &scenario("blind_wsum.txt")]);
    assert_eq!(o.status.code(), Some(0));
    // 5*3 + 9*1 + 2*4 + 6*1
    assert_eq!(stdout(&o), "ACCEPTED value=38 support=5/7\n");
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning: fragments_r=4"));
}

#[test]
fn malformed_key_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    let text = std::fs::read_to_string(scenario("demo_sum.txt"))
        .unwrap()
        .replace("agents_p: 5", "agentz_p: 5");
    std::fs::write(&path, text).unwrap();
    let o = bin(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 7: unknown key 'agentz_p'"), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn rejection_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tie.txt");
    std::fs::write(
        &path,
        "parties: 1\ninputs: 5\nfunction: sum\nfragments_r: 1\ndecision_makers_m: 1\n\
         agents_p: 4\nagents_selected_k: 4\nmalicious: 0:constant:1, 1:constant:1\n",
    )
    .unwrap();
    let o = bin(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "REJECTED ambiguous\n");
}

#[test]
fn seed_override_changes_transcript_not_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    let s = scenario("demo_sum.txt");
    let oa = bin(&["run", &s, "--transcript", a.to_str().unwrap()]);
    let ob = bin(&["run", &s, "--seed", "99", "--transcript", b.to_str().unwrap()]);
    assert_eq!(oa.stdout, ob.stdout);
    let ta = std::fs::read_to_string(&a).unwrap();
    let tb = std::fs::read_to_string(&b).unwrap();
    assert_ne!(ta, tb);
    for line in ta.lines().chain(tb.lines()) {
        let mut parts = line.splitn(3, ' ');
        parts.next().unwrap().parse::<usize>().unwrap();
        assert!(parts.next().is_some());
    }
}

#[test]
fn missing_file_is_an_error() {
    let o = bin(&["run", "/nonexistent/scenario.txt"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bin(&["probe", "eq9"]).status.code(), Some(1));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn probe_fig2_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fig2.csv");
    let o = bin(&[
        "probe", "eq1", "--r", "1..20", "--trials", "100000", "--seed", "7", "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,p_closed,p_mc,stderr"));
    assert_eq!(lines.count(), 20);
    assert!(!text.contains('\r'));
}

#[test]
fn probe_eq3_table() {
    let o = bin(&["probe", "eq3", "--m", "2..10", "--p", "10", "--trials", "100000"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("series=p_wrong_agent"));
    assert!(out.ends_with("rows=9 failed=0\n"));
}

#[test]
fn probe_domain_error() {
    assert_eq!(bin(&["probe", "eq1", "--r", "0..5"]).status.code(), Some(1));
    assert_eq!(bin(&["probe", "eq2"]).status.code(), Some(1));
}

#[test]
fn figures_writes_both_series() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["figures", "--out-dir", dir.path().to_str().unwrap(), "--trials", "20000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    for name in ["fig2.csv", "fig3.csv"] {
        let text = std::fs::read_to_string(Path::new(dir.path()).join(name)).unwrap();
        let points = agentmpc::analysis::parse_series_csv(&text).unwrap();
        assert_eq!(points.len(), 20);
        assert!(points.windows(2).all(|w| w[1].p_closed < w[0].p_closed));
    }
}

#[test]
fn selfcheck_is_stable() {
    let a = bin(&["selfcheck"]);
    let b = bin(&["selfcheck"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().filter(|l| l.starts_with("PASS")).count(), 6);
}
