use std::path::Path;
use std::process::{Command, Output};

fn cliffent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cliffent")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

const T_GATE: &str = r#"{"d": 2, "entries": [[1, 0], [0, 0], [0, 0], [0.7071067811865476, 0.7071067811865476]]}"#;

#[test]
fn entropy_of_identity_and_t() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(dir.path(), "id.json", r#"{"d": 3, "entries": [[1,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]]}"#);
    let out = cliffent(&["entropy", "--matrix", &id]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("verdict: clifford"), "{text}");

    let t = write(dir.path(), "t.json", T_GATE);
    let csv = dir.path().join("t.csv");
    let out = cliffent(&["entropy", "--matrix", &t, "--out", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("H_2 = 0.250000000000") && text.contains("non-clifford"), "{text}");
    let body = std::fs::read_to_string(csv).unwrap();
    let mut lines = body.lines();
    assert!(lines.next().unwrap().starts_with("# cliffent"));
    assert_eq!(lines.next().unwrap(), "d,alpha,H_alpha,verdict,choi_residual");
    assert!(lines.next().unwrap().starts_with("2,2.0000000000000000e0,2.5000000000000000e-1,non-clifford,"));
}

#[test]
fn stabilizer_entropy_of_a_state() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "zero.json", r#"{"d": 2, "entries": [[1, 0], [0, 0]]}"#);
    let out = cliffent(&["entropy", "--state", &s]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("M_2 = 0.000000000000"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"d": 2, "entries": [[1, 0], [0, 0], [0, 0], [2, 0]]}"#);
    let out = cliffent(&["entropy", "--matrix", &bad]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("3.000e0"));

    let short = write(dir.path(), "short.json", r#"{"d": 2, "entries": [[1, 0]]}"#);
    let out = cliffent(&["entropy", "--matrix", &short]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("entries"));

    let garbage = write(dir.path(), "g.json", "not json");
    assert_eq!(cliffent(&["entropy", "--matrix", &garbage]).status.code(), Some(2));
    assert_eq!(cliffent(&["entropy", "--matrix", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(cliffent(&["subadd", "--d", "x"]).status.code(), Some(2));
    assert_eq!(cliffent(&["haar-avg", "--qudits", "3,2", "--samples", "5"]).status.code(), Some(3));
    assert_eq!(cliffent(&["haar-avg", "--d", "1", "--samples", "5"]).status.code(), Some(3));
    assert_eq!(cliffent(&["tcount", "--d", "2", "--t", "0"]).status.code(), Some(3));
    assert_eq!(cliffent(&["--help"]).status.code(), Some(0));
    assert_eq!(cliffent(&["--version"]).status.code(), Some(0));
}

#[test]
fn same_seed_same_bytes() {
    let args = ["subadd", "--d", "2..3", "--pairs", "50", "--reps", "2", "--seed", "5"];
    let a = cliffent(&args).stdout;
    assert_eq!(a, cliffent(&args).stdout);
    let other = cliffent(&["subadd", "--d", "2..3", "--pairs", "50", "--reps", "2", "--seed", "6"]).stdout;
    assert_ne!(a, other);
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "d,rep,n_pairs,seed,violations,frequency");
    assert_eq!(text.lines().count(), 2 + 4);
}

#[test]
fn maximize_saves_unitaries_per_dimension() {
    let dir = tempfile::tempdir().unwrap();
    let save = dir.path().join("best.json");
    let out = cliffent(&["maximize", "--d", "2,3", "--restarts", "2", "--save-unitary", save.to_str().unwrap()]);
    assert!(out.status.success());
    for d in [2, 3] {
        let path = dir.path().join(format!("best_d{d}.json"));
        let back = cliffent(&["entropy", "--matrix", path.to_str().unwrap()]);
        assert!(back.status.success(), "{}", String::from_utf8_lossy(&back.stderr));
    }
}

#[test]
fn sic_reports_purity_only_for_square_dimensions() {
    let out = cliffent(&["sic", "--dim", "3,4", "--restarts", "10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert!(rows[0].ends_with(",,"));
    assert!(rows[1].contains(",8.0000000000"));
}
