use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, toml: &str, extra: &[&str]) -> Output {
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, toml).unwrap();
    Command::new(env!("CARGO_BIN_EXE_cabcalc"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

const HYDROGEN: &str = r#"
command = "spectrum"
[problem]
preset = "hydrogen"
l = [0, 1]
[solve]
num_eigs = 2
"#;

#[test]
fn hydrogen_spectrum_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), HYDROGEN, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "spectrum.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "l,index,eigenvalue,residual,grid_points,s_min,s_max");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&first[..2], ["0", "0"]);
    let e: f64 = first[2].parse().unwrap();
    assert!((e + 0.25).abs() < 1e-3, "{e}");
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run(a.path(), HYDROGEN, &["--jobs", "1"]).status.success());
    assert!(run(b.path(), HYDROGEN, &["--jobs", "4"]).status.success());
    assert_eq!(read(a.path(), "spectrum.csv"), read(b.path(), "spectrum.csv"));
}

#[test]
fn classify_names_both_calculi() {
    let dir = tempfile::tempdir().unwrap();
    let toml = r#"
command = "classify"
output = "c.txt"
[problem]
n = 3
gamma = "3/2"
gamma_prime = "1/2"
potential = [[-1, "-3", "2"]]
"#;
    let out = run(dir.path(), toml, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(dir.path(), "c.txt");
    assert!(text.contains("c_{3/2,1/2}"), "{text}");
    assert!(text.contains("c_{5/2,3/2}"), "{text}");
    assert_eq!(text, String::from_utf8(out.stdout).unwrap());
}

#[test]
fn flow_csv_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let toml = r#"
command = "flow"
[flow]
strategy = "exponential"
weight = [[1, 1, 0]]
s = 0.5
x = [1, 2]
"#;
    let out = run(dir.path(), toml, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "flow.csv");
    let rows: Vec<Vec<f64>> =
        csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!((r[2] - r[1] * 0.5f64.exp()).abs() < 1e-12 * r[2]);
    }
}

#[test]
fn unknown_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "command = \"spectrum\"\n[problem]\npreset = \"hydrogen\"\nbogus = 1\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn unknown_solver_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "command = \"spectrum\"\n[problem]\npreset = \"hydrogen\"\n[solve]\nsolver = \"qr\"\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solve.solver"));
}

#[test]
fn incomplete_weight_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "command = \"flow\"\n[flow]\nweight = [[1, \"1/2\", 0]]\n", &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn literal_prefactor_has_no_parametrix() {
    let dir = tempfile::tempdir().unwrap();
    let toml = "command = \"parametrix\"\nprefactor = \"literal\"\n[problem]\npreset = \"hydrogen\"\nl = 0\n";
    let out = run(dir.path(), toml, &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
