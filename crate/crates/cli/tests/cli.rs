use std::path::PathBuf;
use std::process::{Command, Output};

fn freeqg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeqg")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = freeqg(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("freeqg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn dimensions() {
    assert_eq!(stdout(&["dim", "--N", "3", "--k", "3"]), "k,dim\n0,1\n1,3\n2,8\n3,21\n");
    assert_eq!(stdout(&["dim", "--N", "2", "--k", "0:3"]), "k,dim\n0,1\n1,2\n2,3\n3,4\n");
}

#[test]
fn moments() {
    let last = |args: &[&str]| stdout(args).lines().last().unwrap().rsplit(',').next().unwrap().to_string();
    assert_eq!(last(&["moment", "x[1,1]*x[1,1]", "--N", "5"]), "1/5");
    assert_eq!(last(&["moment", "x[1,1]^4", "--N", "3"]), "1/6");
    assert_eq!(last(&["moment", "x[1,1]*x[1,2]", "--N", "3"]), "0");
    assert_eq!(last(&["moment", "v[1,1]*v*[1,1]", "--model", "u+", "--N", "4"]), "1/4");
}

#[test]
fn exit_codes() {
    assert_eq!(freeqg(&["moment", "x[1,1", "--N", "3"]).status.code(), Some(2));
    assert_eq!(freeqg(&["moment", "x[4,1]*x[4,1]", "--N", "3"]).status.code(), Some(2));
    assert_eq!(freeqg(&["dn", "--N", "2"]).status.code(), Some(2));
    assert_eq!(freeqg(&["selectp", "--degree", "1", "--epsilon", "-0.5"]).status.code(), Some(2));
    assert_eq!(freeqg(&["lp", "x[1,1]", "--N", "4", "--p", "14"]).status.code(), Some(3));
    assert_eq!(freeqg(&["converge", "x[1,1]", "--N", "4", "--p", "2,14"]).status.code(), Some(3));
    assert_eq!(freeqg(&["lp", "x[1,1]", "--N", "4", "--p", "14", "--kmax", "14"]).status.code(), Some(0));
}

#[test]
fn converge_is_byte_identical() {
    for format in ["csv", "json"] {
        let a = scratch(&format!("a.{format}"));
        let b = scratch(&format!("b.{format}"));
        for path in [&a, &b] {
            let out = freeqg(&[
                "converge",
                "x[1,1] + 1/2*x[1,2]*x[2,1]",
                "--N",
                "8,3,4",
                "--p",
                "2,4",
                "--format",
                format,
                "--out",
                path.to_str().unwrap(),
            ]);
            assert!(out.status.success());
        }
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }
}

#[test]
fn converge_rows_follow_closed_form() {
    let csv = stdout(&["converge", "x[1,1]", "--N", "4,8,16", "--p", "4"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "N,p,lp_finite,lp_limit,gap,rd_bound");
    let mut prev_gap = f64::INFINITY;
    for (line, n) in lines[1..4].iter().zip([4.0f64, 8.0, 16.0]) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cells[2] - (2.0 * n / (n + 1.0)).powf(0.25)).abs() < 1e-15);
        assert!(cells[4] < prev_gap);
        assert!(cells[2] <= cells[5]);
        prev_gap = cells[4];
    }
    assert!(lines[4].starts_with("inf,4,1.189207115002721066"));
}

#[test]
fn dn_and_selectp() {
    let csv = stdout(&["dn", "--N", "3,50", "--r-max", "16", "--side-max", "8"]);
    let rows: Vec<Vec<String>> = csv.lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect();
    let upper = |r: &Vec<String>| r[2].parse::<f64>().unwrap();
    let scanned = |r: &Vec<String>| r[1].parse::<f64>().unwrap();
    assert!(upper(&rows[1]) < upper(&rows[0]));
    for r in &rows {
        assert!(scanned(r) >= 1.0 && scanned(r) <= upper(r));
    }
    let sel = stdout(&["selectp", "--degree", "2", "--epsilon", "0.5"]);
    let cells: Vec<&str> = sel.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(cells[3], "32");
    assert!(cells[4].parse::<f64>().unwrap() <= 1.5);
}

#[test]
fn check_passes() {
    let out = stdout(&["check"]);
    assert!(out.lines().all(|l| l.starts_with("PASS")), "{out}");
}
