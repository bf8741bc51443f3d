use std::path::Path;
use std::process::{Command, Output};

fn thinc(args: &[&str], dir: &Path, threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thinc"))
        .args(args)
        .current_dir(dir)
        .env("THINC_THREADS", threads)
        .output()
        .expect("cannot launch thinc")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("case.cfg");
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = thinc(&["verify"], dir.path(), "0");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count() >= 6);
    assert!(!stdout.contains("[FAIL]"));
}

#[test]
fn short_run_writes_every_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "case = zalesak\nsizes = 32\nfinal_time = 0.2\nsnapshots = 0.1\npsi = true\noutput_dir = out\n",
    );
    let out = thinc(&["run", "--config", &cfg, "--assert-acceptance"], dir.path(), "2");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("zalesak 32^2"));
    assert!(stdout.contains("no acceptance thresholds apply"));

    let base = dir.path().join("out");
    for kind in ["fields", "contour", "psi"] {
        for tag in ["t0.100000", "final"] {
            assert!(base.join(format!("zalesak_32_{kind}_{tag}.csv")).is_file(), "{kind} {tag}");
        }
    }
    let fields = std::fs::read_to_string(base.join("zalesak_32_fields_final.csv")).unwrap();
    assert_eq!(fields.lines().next(), Some("i,j,x,y,vof,phi"));
    assert_eq!(fields.lines().count(), 32 * 32 + 1);

    let mass = std::fs::read_to_string(base.join("zalesak_32_mass.csv")).unwrap();
    let steps: usize = stdout
        .split_whitespace()
        .zip(stdout.split_whitespace().skip(1))
        .find(|(_, next)| *next == "steps")
        .map(|(n, _)| n.parse().unwrap())
        .unwrap();
    assert_eq!(mass.lines().count(), steps + 2, "header plus t = 0 plus one row per step");
}

#[test]
fn threaded_and_sequential_runs_agree() {
    let dir = tempfile::tempdir().unwrap();
    let fields = |threads: &str| {
        let out_dir = format!("out{threads}");
        let cfg = write_config(
            dir.path(),
            &format!("case = rider_kothe\nsizes = 32\nfinal_time = 0.3\ncontours = false\nmass = false\noutput_dir = {out_dir}\n"),
        );
        assert!(thinc(&["run", "--config", &cfg], dir.path(), threads).status.success());
        std::fs::read(dir.path().join(out_dir).join("rider_kothe_32_fields_final.csv")).unwrap()
    };
    assert_eq!(fields("0"), fields("3"));
}

#[test]
fn config_errors_report_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "case = zalesak\n# fine so far\nbeta0 = -1\n");
    let out = thinc(&["run", "--config", &cfg], dir.path(), "0");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "case = zalesak\nfinal_time = 0\n");
    let out = thinc(&["run", "--config", &cfg], dir.path(), "many");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("THINC_THREADS"));
}

#[test]
fn converge_needs_two_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "case = rider_kothe\nsizes = 32\nfinal_time = 0.1\n");
    let out = thinc(&["converge", "--config", &cfg], dir.path(), "0");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn convergence_table_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "case = rider_kothe\nsizes = 16, 32\nfinal_time = 0.2\nfields = false\ncontours = false\nmass = false\noutput_dir = out\n",
    );
    let out = thinc(&["converge", "--config", &cfg], dir.path(), "0");
    assert!(out.status.success());
    let table = std::fs::read_to_string(dir.path().join("out/rider_kothe_convergence.txt")).unwrap();
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split_whitespace().collect::<Vec<_>>(), ["Method", "16^2", "Order", "32^2"]);
    assert!(lines[1].starts_with("THINC/scaling"));
}
