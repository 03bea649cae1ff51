use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heston-stab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn single_case_check_passes() {
    let o = bin(&[
        "check", "--r", "0.05", "--kappa", "2", "--eta", "0.04", "--sigma", "0.2", "--rho", "-0.5",
        "--m2", "5",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert!(text.trim_end().ends_with("PASS"));
    for name in [
        "advection",
        "exp-bound",
        "diffusion",
        "similarity",
        "symbol",
        "conditions",
        "certificate",
    ] {
        assert!(
            text.contains(&format!("{name}: ")),
            "{name} missing from\n{text}"
        );
    }
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &["check", "--rho", "1.5"][..],
        &["check", "--m2", "2"],
        &["check", "--bogus"],
        &["check", "--eigensolver", "lanczos"],
        &["check", "--checks", "advection,nope"],
        &["sweep", "--m1", "10"],
        &["sweep", "--full", "--m2s", "5"],
        &["certificate", "--tol", "-1"],
    ] {
        let o = bin(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn failing_check_exits_1() {
    // a loose power-iteration tolerance cannot meet the 1e-8 sharpness check
    let o = bin(&[
        "check",
        "--checks",
        "advection",
        "--eigensolver",
        "power",
        "--tol",
        "1e-2",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL]"));
}

#[test]
fn selected_checks_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("checks.csv");
    let o = bin(&[
        "check",
        "--checks",
        "advection,similarity",
        "--out",
        path_arg(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "name,lhs,rhs,margin,tol,holds");
    assert_eq!(lines.len(), 1 + 4 + 1);
    assert!(lines[1..]
        .iter()
        .all(|l| l.split(',').count() == 6 && l.ends_with(",true")));
}

#[test]
fn operators_dump() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&[
        "operators",
        "--m2",
        "3",
        "--m1",
        "4",
        "--rho",
        "0.3",
        "--dump-dir",
        path_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("grid: m1=4 m2=3 m=12"));
    for name in ["A1", "A2", "A3", "A4", "A5", "A"] {
        let text = fs::read_to_string(dir.path().join(format!("{name}.txt"))).unwrap();
        let rows: Vec<Vec<f64>> = text
            .lines()
            .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 12, "{name}");
        assert!(rows.iter().all(|r| r.len() == 12), "{name}");
    }
}

#[test]
fn certificate_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let checks = dir.path().join("c.csv");
    let rows = dir.path().join("rows.csv");
    let o = bin(&[
        "certificate",
        "--m2",
        "4",
        "--y",
        "-0.3,0.75",
        "--out",
        path_arg(&checks),
        "--rows-out",
        path_arg(&rows),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let rows = fs::read_to_string(rows).unwrap();
    let lines: Vec<&str> = rows.lines().collect();
    assert_eq!(
        lines[0],
        "y,i,nu,eps,a,b,alpha,beta_mag,gamma_mag,theta,row_value"
    );
    // m1 = 8 rows for each y
    assert_eq!(lines.len(), 1 + 16);
    assert!(fs::read_to_string(checks)
        .unwrap()
        .starts_with("name,lhs,rhs,margin,tol,holds\n"));
}

#[test]
fn sweep_is_deterministic_and_plottable() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let plots = dir.path().join(format!("{name}.plots"));
        let o = bin(&[
            "sweep",
            "--m2s",
            "3,5",
            "--sigmas",
            "0.1",
            "--rhos",
            "-1,1",
            "--t-max",
            "10",
            "--out",
            path_arg(&csv),
            "--plot-dir",
            path_arg(&plots),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        (fs::read(&csv).unwrap(), plots)
    };
    let (first, plots) = run("a.csv");
    let (second, _) = run("b.csv");
    assert_eq!(first, second);

    let text = String::from_utf8(first).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "m2,m1,L,sigma,rho,S,V,max_norm2,t_argmax,max_normD,bound,within_bound"
    );
    assert_eq!(lines.len(), 1 + 2 * 2 * 2);
    // sorted by (L, sigma, rho, m2)
    assert!(lines[1]
        .starts_with("3,6,0.0000000000000000e0,1.0000000000000001e-1,-1.0000000000000000e0,"));
    assert!(lines[8].starts_with("5,10,1.0000000000000000e1,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));

    let mut series: Vec<String> = fs::read_dir(&plots)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    series.sort();
    assert_eq!(
        series,
        [
            "sigma0.1_rho-1_L0.csv",
            "sigma0.1_rho-1_L10.csv",
            "sigma0.1_rho1_L0.csv",
            "sigma0.1_rho1_L10.csv"
        ]
    );
    let one = fs::read_to_string(plots.join("sigma0.1_rho1_L10.csv")).unwrap();
    assert_eq!(one.lines().count(), 3);
    assert!(one.starts_with("m2,max_norm2\n3,"));
}

#[test]
fn sweep_csv_to_stdout() {
    let o = bin(&[
        "sweep",
        "--m2s",
        "3",
        "--sigmas",
        "0.2",
        "--rhos",
        "0",
        "--barriers",
        "0",
        "--t-max",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("PASS"));
}
