use std::path::Path;
use std::process::{Command, Output};

fn epf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epf")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn simulate_writes_t_plus_one_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "model = sin\nsteps = 50\n");
    let out = dir.path().join("out");
    let o = epf(&["simulate", "--config", &cfg, "--seed", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x,y");
    assert_eq!(lines.len(), 1 + 51);
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(&first[..2], &[0.0, 0.0]);
}

#[test]
fn filter_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "model = sin\nsteps = 60\nfilter = epf\nparticles = 80\norder = 5\n");
    let run = |seed: &str, sub: &str| {
        let out = dir.path().join(sub);
        let o = epf(&["filter", "--config", &cfg, "--seed", seed, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("theta_1 = "));
        std::fs::read(out.join("epf.csv")).unwrap()
    };
    let a = run("11", "a");
    let b = run("11", "b");
    let c = run("12", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("t,theta_mean_1,theta_std_1,x_mean,ess,unique_theta\n"));
    assert_eq!(text.lines().count(), 1 + 60);
}

#[test]
fn filter_reads_a_simulated_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "model = linear\nsteps = 40\nfilter = storvik\nparticles = 50\n");
    let out = dir.path().to_str().unwrap();
    assert!(epf(&["simulate", "--config", &cfg, "--out", out]).status.success());
    let traj = dir.path().join("trajectory.csv");
    let o = epf(&["filter", "--config", &cfg, "--out", out, "--trajectory", traj.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(dir.path().join("storvik.csv")).unwrap().lines().count(), 41);
}

#[test]
fn gibbs_sweep_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.cfg", "model = sin\nsweep_t = 8, 32\nsweep_m = 1, 3\ngrid_points = 301\n");
    let o = epf(&["gibbs-sweep", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["gibbs_T8.csv", "gibbs_T32.csv", "shrinkage.csv", "kl_sweep.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let kl = std::fs::read_to_string(dir.path().join("kl_sweep.csv")).unwrap();
    assert_eq!(kl.lines().next(), Some("T,M,kl"));
    assert_eq!(kl.lines().count(), 1 + 4);
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "a.cfg", "filter = kalman\n");
    let storvik_on_sin = write_config(dir.path(), "b.cfg", "model = sin\nfilter = storvik\nsteps = 5\nparticles = 5\n");
    let missing = dir.path().join("absent.cfg");
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["filter", "--config", unknown.as_str(), "--out", out],
        vec!["filter", "--config", storvik_on_sin.as_str(), "--out", out],
        vec!["simulate", "--config", missing.to_str().unwrap(), "--out", out],
        vec!["filter", "--no-such-flag"],
        vec!["frobnicate"],
    ] {
        let o = epf(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn selftest_passes_and_catches_injected_fault() {
    let o = epf(&["selftest"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 7);

    let o = epf(&["selftest", "--inject-fault", "kf-coefficient"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let failed: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(failed.len(), 1);
    assert!(failed[0].contains("Kalman"));
}
