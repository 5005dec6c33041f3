use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn quatlie(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatlie"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "error")
        .output()
        .expect("spawn quatlie")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).expect("read json")).expect("parse json")
}

#[test]
fn constants_with_overrides_reproduce_the_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let o = quatlie(&["constants", "--A", "2", "--C1", "3", "--eps0", "10"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("constants.json"));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "constants");
    assert_eq!(v["config"]["constants"]["a"], 2.0);
    let th = &v["threshold"];
    assert_eq!(th["branch_A"], 2.4);
    let c1 = th["branch_C1"].as_f64().unwrap();
    assert!((c1 - 3.2f64.sqrt()).abs() < 1e-15);
    assert_eq!(th["eps_star"].as_f64(), Some(c1));
    assert_eq!(v["m_bound_curve"]["points"].as_array().unwrap().len(), 25);
}

#[test]
fn malformed_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "eps = \"wide\"\n").unwrap();
    let o = quatlie(&["constants", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));

    fs::write(&cfg, "no-such-key = 1\n").unwrap();
    let o = quatlie(&["constants", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));

    fs::write(&cfg, "[pde]\ngrid = 100\n").unwrap();
    let o = quatlie(&["pde", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));

    let o = quatlie(&["constants", "--eps", "-1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "eps0 = 1.0\n[constants]\na = 2.0\nc1 = 3.0\n").unwrap();
    let o = quatlie(&["constants", "--config", cfg.to_str().unwrap(), "--eps0", "10"], dir.path());
    assert!(o.status.success());
    let v = json(&dir.path().join("constants.json"));
    assert_eq!(v["config"]["eps0"], 10.0);
    assert!((v["threshold"]["eps_star"].as_f64().unwrap() - 1.7889).abs() < 1e-4);
}

#[test]
fn constant_initial_data_gives_identical_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("pde.toml");
    fs::write(&cfg, "[pde]\ngrid = 32\nt-end = 0.1\noutput-every = 5\nic = { kind = \"constant\", value = [0.5, 1.0, -2.0, 0.25] }\n").unwrap();
    let o = quatlie(&["pde", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,l2,hs,grad_linf,bkm_integral,energy_ratio"));
    let rows: Vec<&str> = lines.map(|l| l.split_once(',').unwrap().1).collect();
    assert_eq!(rows.len(), 21);
    assert!(rows.iter().all(|r| *r == rows[0]), "{rows:?}");
    for name in ["l2", "hs", "grad_linf", "bkm_integral", "energy_ratio"] {
        let svg = fs::read_to_string(dir.path().join(format!("plot_{name}.svg"))).unwrap();
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
    }
    assert_eq!(json(&dir.path().join("pde.json"))["status"]["status"], "completed");
}

#[test]
fn format_selection_limits_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = quatlie(&["pde", "--grid", "16", "--t-end", "0.01", "--format", "csv"], dir.path());
    assert!(o.status.success());
    assert!(dir.path().join("trajectory.csv").exists());
    assert!(!dir.path().join("pde.json").exists());
    assert!(!dir.path().join("plot_l2.svg").exists());
}

#[test]
fn verify_on_the_commutator_passes_every_identity_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("verify.toml");
    fs::write(&cfg, "samples = 200\nmax-evaluations = 1e7\n[bracket]\nfamily = \"commutator\"\nm = 1\n[verify]\ntrials = 3\nn-max = 1\n").unwrap();
    let o = quatlie(&["verify", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&dir.path().join("verify.json"));
    let checks = v["checks"].as_array().unwrap();
    let jac = checks.iter().find(|c| c["name"] == "jacobi_identity").unwrap();
    assert_eq!(jac["pass"], true);
    let failing: Vec<&str> = checks
        .iter()
        .filter(|c| c["direction"] == "identity" && c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failing.iter().all(|n| !n.starts_with("jacobi") && !n.starts_with("d_squared")), "{failing:?}");
    let table = fs::read_to_string(dir.path().join("verify.txt")).unwrap();
    assert!(table.starts_with("check"));
}

#[test]
fn sweep_writes_one_directory_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(
        &cfg,
        "[sweep]\ncommand = \"pde\"\nworkers = 2\n[sweep.grid]\n\"pde.dt\" = [1e-3, 2e-3]\n\"pde.grid\" = [16, 32]\n[pde]\nt-end = 0.01\n",
    )
    .unwrap();
    let o = quatlie(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let idx = json(&dir.path().join("index.json"));
    let points = idx["points"].as_array().unwrap();
    assert_eq!(points.len(), 4);
    let mut seen = Vec::new();
    for p in points {
        assert_eq!(p["exit_code"], 0);
        let sub = dir.path().join(p["dir"].as_str().unwrap());
        let run = json(&sub.join("pde.json"));
        seen.push((run["config"]["pde"]["grid"].as_u64().unwrap(), run["config"]["pde"]["dt"].as_f64().unwrap()));
    }
    seen.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(seen, vec![(16, 1e-3), (16, 2e-3), (32, 1e-3), (32, 2e-3)]);
}

#[test]
fn sweep_requires_a_grid() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    fs::write(&cfg, "[sweep]\ncommand = \"constants\"\n").unwrap();
    let o = quatlie(&["sweep", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let args = ["pde", "--grid", "32", "--t-end", "0.05", "--ic", "analytic"];
    quatlie(&args, &out);
    let first = (fs::read(out.join("pde.json")).unwrap(), fs::read(out.join("trajectory.csv")).unwrap());
    fs::remove_dir_all(&out).unwrap();
    quatlie(&args, &out);
    let second = (fs::read(out.join("pde.json")).unwrap(), fs::read(out.join("trajectory.csv")).unwrap());
    assert_eq!(first, second);
}
