use std::path::Path;
use std::process::{Command, Output};

use lgi_harness::config::SystemId;
use lgi_harness::{run, Mode, RunConfig, Table};

fn lgi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgi"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = lgi(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn dir_arg(d: &Path) -> String {
    d.display().to_string()
}

#[test]
fn ten_steps_give_eleven_rows() {
    let d = tempfile::tempdir().unwrap();
    ok(&[
        "simulate",
        "--system",
        "pendulum",
        "--method",
        "rkmk4",
        "--steps",
        "10",
        "--t-end",
        "1",
        "--out",
        &dir_arg(d.path()),
    ]);
    let traj = Table::read(&d.path().join("trajectory.csv")).unwrap();
    assert_eq!(traj.rows.len(), 11);
    assert_eq!(traj.header.len(), 2 + 12);
    let t = traj.column("t").unwrap();
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(t[10], 1.0);
    let inv = Table::read(&d.path().join("invariants.csv")).unwrap();
    assert_eq!(
        inv.header,
        ["t", "energy", "sphere_defect", "tangency_defect"]
    );
    assert!(inv.meta.iter().any(|m| m == "system = pendulum"));
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let d = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::from_str_validated(
        "system = heavytop-body\nmethod = cf4\nt_end = 0.1\nsteps = 7\nperturb = 0.1\nseed = 9\n",
        Mode::Fixed,
    )
    .unwrap();
    cfg.out = d.path().to_path_buf();
    run(&cfg).unwrap();
    let p = d.path().join("trajectory.csv");
    let t = Table::read(&p).unwrap();
    let again = d.path().join("again.csv");
    t.write(&again).unwrap();
    assert_eq!(std::fs::read(&p).unwrap(), std::fs::read(&again).unwrap());
    assert_eq!(Table::read(&again).unwrap(), t);
    assert!(t.rows.iter().flatten().all(|x| x.is_finite()));
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(cfg.path(), "system = quadrotor\ncontrols = hover\nmethod = rkmk54\nt_end = 0.5\ntol = 1e-6\nperturb = 0.05\n").unwrap();
    for d in [&a, &b] {
        ok(&[
            "adapt",
            "--config",
            &cfg.path().display().to_string(),
            "--seed",
            "42",
            "--out",
            &dir_arg(d.path()),
        ]);
    }
    for f in ["trajectory.csv", "invariants.csv", "steps.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let c = tempfile::tempdir().unwrap();
    ok(&[
        "adapt",
        "--config",
        &cfg.path().display().to_string(),
        "--seed",
        "43",
        "--out",
        &dir_arg(c.path()),
    ]);
    assert_ne!(
        std::fs::read(a.path().join("trajectory.csv")).unwrap(),
        std::fs::read(c.path().join("trajectory.csv")).unwrap()
    );
}

#[test]
fn bad_input_exits_nonzero_with_a_diagnostic() {
    let d = tempfile::tempdir().unwrap();
    let out = lgi(&[
        "simulate",
        "--system",
        "pendulum",
        "--method",
        "rkmk4",
        "--h",
        "0.1",
        "--steps",
        "10",
        "--t-end",
        "1",
        "--out",
        &dir_arg(d.path()),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not both"));

    let cfg = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(cfg.path(), "system = pendulum\nmethod = rkmk4\nspeed = 3\n").unwrap();
    let out = lgi(&["simulate", "--config", &cfg.path().display().to_string()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("line 3") && err.contains("unknown key `speed`"),
        "{err}"
    );

    let out = lgi(&["simulate", "--system", "teapot"]);
    assert!(!out.status.success());
}

#[test]
fn adaptive_pendulum_step_log() {
    let d = tempfile::tempdir().unwrap();
    let stdout = ok(&[
        "adapt",
        "--preset",
        "pendulum-chain",
        "--method",
        "rkmk54",
        "--tol",
        "1e-6",
        "--out",
        &dir_arg(d.path()),
    ]);
    assert!(stdout.contains("smallest accepted step"), "{stdout}");
    let steps = Table::read(&d.path().join("steps.csv")).unwrap();
    assert_eq!(steps.header, ["t", "h", "error", "accepted"]);
    let acc: Vec<&Vec<f64>> = steps.rows.iter().filter(|r| r[3] == 1.0).collect();
    assert!(acc.iter().all(|r| r[2] <= 1e-6));
    assert!(steps.rows.iter().any(|r| r[3] == 0.0));
    let interior = &acc[..acc.len() - 1];
    let min = interior
        .iter()
        .min_by(|a, b| a[1].total_cmp(&b[1]))
        .unwrap();
    assert!((2.0..=2.4).contains(&min[0]), "minimum at t = {}", min[0]);
}

#[test]
fn bruls_top_symplectic_energy_stays_bounded() {
    let d = tempfile::tempdir().unwrap();
    ok(&[
        "simulate",
        "--preset",
        "bruls-top",
        "--method",
        "symplectic",
        "--theta",
        "0.5",
        "--h",
        "0.01",
        "--out",
        &dir_arg(d.path()),
    ]);
    let inv = Table::read(&d.path().join("invariants.csv")).unwrap();
    assert_eq!(inv.rows.len(), 6001);
    let e = inv.column("energy").unwrap();
    let err: Vec<f64> = e.iter().map(|x| (x - e[0]).abs()).collect();
    let first = err[1..=3000].iter().copied().fold(0.0, f64::max);
    let second = err[3000..].iter().copied().fold(0.0, f64::max);
    assert!(second <= 2.0 * first, "{first:e} {second:e}");
    let c = inv.column("gamma0_dot_pi").unwrap();
    assert!(c.iter().all(|x| (x - c[0]).abs() < 1e-10));
}

#[test]
fn order_table_slopes() {
    let d = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::from_str_validated(
        "system = heavytop-spatial\nmethods = lie-euler, symplectic\n",
        Mode::Converge,
    )
    .unwrap();
    cfg.out = d.path().to_path_buf();
    assert_eq!(cfg.system(), SystemId::HeavyTopSpatial);
    run(&cfg).unwrap();
    let t = Table::read(&d.path().join("order.csv")).unwrap();
    assert_eq!(t.rows.len(), 6);
    let slope = |label: &str| -> f64 {
        let line = t
            .meta
            .iter()
            .find(|m| m.starts_with(&format!("slope {label} =")))
            .unwrap();
        line.rsplit(' ').next().unwrap().parse().unwrap()
    };
    assert!((slope("lie-euler") - 1.0).abs() <= 0.2);
    assert!((slope("symplectic(theta=0.5)") - 2.0).abs() <= 0.2);

    let d = tempfile::tempdir().unwrap();
    ok(&[
        "converge",
        "--system",
        "pendulum",
        "--method",
        "rkmk54,rkmk54:aux",
        "--out",
        &dir_arg(d.path()),
    ]);
    let t = Table::read(&d.path().join("order.csv")).unwrap();
    let h = t.column("h:rkmk54").unwrap();
    let e = t.column("error:rkmk54").unwrap();
    let s = lgi_core::study::fit_slope(&h, &e).unwrap();
    assert!((s - 5.0).abs() <= 0.3, "{s}");
    assert!(t.meta.iter().any(|m| m.starts_with("slope rkmk54:aux")));
}
