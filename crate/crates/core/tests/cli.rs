use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn maxop(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_maxop"));
    c.args(args);
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("binary runs")
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn maximal_csv_has_one_row_per_point_and_dominates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.csv");
    let svg = dir.path().join("m.svg");
    let o = maxop(
        &["maximal", "--kernel", "poisson", "--grid-n", "512", "--out", out.to_str().unwrap(), "--svg", svg.to_str().unwrap()],
        &[],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(&out).unwrap();
    assert_eq!(r.headers().unwrap().iter().collect::<Vec<_>>(), ["x", "u", "ustar", "tstar"]);
    let rows: Vec<Vec<f64>> = r.records().map(|rec| rec.unwrap().iter().map(|f| f.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 512);
    for row in &rows {
        assert!(row[2] >= row[1].abs(), "{row:?}");
    }
    let plot = fs::read_to_string(&svg).unwrap();
    assert!(plot.starts_with("<svg") && !plot.contains("href"));
}

#[test]
fn verify_is_byte_identical_across_runs_and_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |d: &Path| vec!["verify".to_string(), "--suite".into(), "continuity".into(), "--seed".into(), "7".into(), "--out-dir".into(), d.display().to_string()];
    let run = |d: &Path, threads: &str| {
        let v = args(d);
        let refs: Vec<&str> = v.iter().map(String::as_str).collect();
        maxop(&refs, &[("MAXOP_THREADS", threads)])
    };
    let oa = run(a.path(), "1");
    let ob = run(b.path(), "2");
    assert!(oa.status.success(), "{}", String::from_utf8_lossy(&oa.stderr));
    assert!(ob.status.success());
    let ta = read_tree(a.path());
    assert_eq!(ta, read_tree(b.path()));
    let names: Vec<&str> = ta.iter().map(|(n, _)| n.as_str()).collect();
    for f in ["continuity.csv", "continuity.svg", "continuity.json", "summary.csv", "finite_intervals.json"] {
        assert!(names.contains(&f), "{names:?}");
    }
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"grid-n": 40, "function": {"type": "sawtooth", "params": {"teeth": 3}}}"#).unwrap();
    let out = dir.path().join("m.csv");
    let o = maxop(&["maximal", "--grid-n", "100", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv::Reader::from_path(&out).unwrap().records().count(), 40);
}

#[test]
fn usage_errors_name_the_field() {
    let o = maxop(&["maximal", "--grid-n", "8"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid-n"));
    let o = maxop(&["maximal", "--tol", "1e-5", "--delta", "1e-6"], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta"));
    let o = maxop(&["kernel", "--kernel", "fracpoisson", "--alpha", "0.995"], &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = maxop(&["kernel"], &[("MAXOP_THREADS", "0")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_suite_sets_exit_status_and_prints_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = maxop(&["verify", "--suite", "variation", "--kernel", "heat", "--corpus-n", "2", "--grid-n", "64", "--out-dir", dir.path().to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // an explicit zigzag input breaks the variation ceiling
    let zig = r#"{"breakpoints": [-2, -1.5, -1, -0.5, 0, 0.5, 1, 1.5, 2], "values": [0, 1, 0, 1, 0, 1, 0, 1, 0]}"#;
    let o = maxop(&["continuity", "--function", zig, "--kernel", "poisson", "--indices", "1,2", "--out-dir", dir.path().to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("continuity.json"));
}

#[test]
fn kernel_tabulate_and_bruteforce() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("k.csv");
    let svg = dir.path().join("k.svg");
    let o = maxop(
        &["kernel", "tabulate", "--grid-n", "33", "--grid-span", "4", "--out", csv_path.to_str().unwrap(), "--svg", svg.to_str().unwrap()],
        &[],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(&csv_path).unwrap();
    assert_eq!(r.headers().unwrap().len(), 4);
    assert_eq!(r.records().count(), 33);
    assert!(svg.exists());
    let o = maxop(&["bruteforce", "--kernel", "heat", "--grid-n", "16", "--scales", "2000"], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 17);
}
