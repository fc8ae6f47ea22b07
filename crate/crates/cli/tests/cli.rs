use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn polgyro(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polgyro")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn small_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("run.toml");
    let text = format!(
        r#"
name = "tiny"

[grid]
nx = 32
ny = 32
lx = 16.0
ly = 16.0
boundary = "dirichlet-zero"

[solver]
t_end = 0.4

[output]
record_interval = 0.2
{extra}
"#
    );
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = dir.path().join("out");
    let o = polgyro(&["run", "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = fs::read_to_string(out.join("summary.toml")).unwrap();
    assert!(summary.contains("status = \"completed\""));
    let csv = fs::read_to_string(out.join("observables.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "t,norm,peak_density");
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn overrides_reach_the_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = dir.path().join("out");
    let o = polgyro(&[
        "run", "--config", &cfg, "--out", out.to_str().unwrap(),
        "--override", "params.g=0.25", "--override", "solver.t_end=0",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let resolved = fs::read_to_string(out.join("config.toml")).unwrap();
    assert!(resolved.contains("g = 0.25"), "{resolved}");
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "bogus = 1");
    let o = polgyro(&["run", "--config", &cfg]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));

    let cfg = small_config(dir.path(), "");
    assert_eq!(code(&polgyro(&["run", "--config", &cfg, "--override", "params.eta=-1"])), 1);
    assert_eq!(code(&polgyro(&["run", "--config", &cfg, "--override", "noequals"])), 1);
    assert_eq!(code(&polgyro(&["run", "--preset", "fig-nothing"])), 1);
    assert_eq!(code(&polgyro(&["run", "--no-such-flag"])), 1);
    assert_eq!(code(&polgyro(&["run", "--config", "/nonexistent.toml"])), 1);
}

#[test]
fn blow_up_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = dir.path().join("out");
    let o = polgyro(&[
        "run", "--config", &cfg, "--out", out.to_str().unwrap(),
        "--override", "solver.dt=5.0", "--override", "solver.t_end=500",
        "--override", "solver.allow_unstable_dt=true",
    ]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("last_good.pgyr").exists());
}

#[test]
fn sweep_aggregates_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "snapshots = false\nimages = false");
    let out = dir.path().join("sweep");
    let o = polgyro(&[
        "sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", "2",
        "--axis", "params.g=0.5,1", "--axis", "params.gamma+params.eta=1,2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("run,params.g,params.gamma+params.eta,status"));
    assert!(lines[4].starts_with("003,1,2,completed"));
    assert!(out.join("run_003/summary.toml").exists());
}

#[test]
fn analyze_reads_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = dir.path().join("out");
    assert_eq!(code(&polgyro(&["run", "--config", &cfg, "--out", out.to_str().unwrap()])), 0);
    let snap = out.join("final.pgyr");
    let o = polgyro(&["analyze", snap.to_str().unwrap(), "--radius", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("[[snapshot]]") && text.contains("radius = 3.0"), "{text}");
    assert_eq!(code(&polgyro(&["analyze", "/nonexistent.pgyr"])), 1);
}

#[test]
fn metrology_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = polgyro(&["metrology", "--out", dir.path().to_str().unwrap(), "--omega", "7.3e-5"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("ring laser") && text.contains("polariton vortex l=1"), "{text}");
    assert!(dir.path().join("gyroscopes.csv").exists());

    let gyros = dir.path().join("gyros.toml");
    fs::write(&gyros, "[[gyro]]\nkind = \"vortex-superposition\"\nl = 0\nt = 1.0\nphoton_rate = 1.0\n").unwrap();
    assert_eq!(code(&polgyro(&["metrology", "--config", gyros.to_str().unwrap()])), 1);
}

#[test]
fn presets_list_and_print() {
    let o = polgyro(&["presets"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 9);
    let o = polgyro(&["presets", "fig-ring-l5"]);
    let text = String::from_utf8_lossy(&o.stdout).to_string();
    assert!(text.contains("kind = \"mexican-hat\""), "{text}");
    assert_eq!(code(&polgyro(&["presets", "fig-nothing"])), 1);
}

#[test]
fn seed_flag_sets_the_disorder_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = polgyro(&[
        "run", "--preset", "fig-disorder", "--seed", "7", "--out", out.to_str().unwrap(),
        "--override", "grid.nx=32", "--override", "grid.ny=32", "--override", "solver.t_end=0",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let resolved = fs::read_to_string(out.join("config.toml")).unwrap();
    assert!(resolved.contains("seed = 7"), "{resolved}");
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<_> = ["a", "b"]
        .iter()
        .map(|name| {
            let out = dir.path().join(name);
            let o = polgyro(&[
                "run", "--preset", "fig-disorder", "--seed", "3", "--out", out.to_str().unwrap(),
                "--override", "grid.nx=48", "--override", "grid.ny=48", "--override", "solver.t_end=0.5",
                "--override", "output.record_interval=0.25",
            ]);
            assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
            out
        })
        .collect();
    let mut files: Vec<_> = fs::read_dir(outputs[0].join("snapshots")).unwrap().map(|e| e.unwrap().file_name()).collect();
    files.sort();
    assert_eq!(files.len(), 3);
    for f in &files {
        let a = fs::read(outputs[0].join("snapshots").join(f)).unwrap();
        assert_eq!(a, fs::read(outputs[1].join("snapshots").join(f)).unwrap(), "{f:?}");
    }
    for f in ["observables.csv", "final.pgyr", "summary.toml"] {
        assert_eq!(fs::read(outputs[0].join(f)).unwrap(), fs::read(outputs[1].join(f)).unwrap(), "{f}");
    }
}

#[test]
fn sweep_without_axes_is_a_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "snapshots = false\nimages = false");
    let out = dir.path().join("sweep");
    let o = polgyro(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(out.join("sweep.csv")).unwrap().lines().count(), 2);
}

/// Ten lobes survive a change of the Mexican-hat depth. Takes several
/// minutes on one core; run with `--ignored`.
#[test]
#[ignore]
fn ring_l5_lobes_survive_a_depth_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep");
    let o = polgyro(&[
        "sweep", "--preset", "fig-ring-l5", "--out", out.to_str().unwrap(),
        "--override", "output.snapshots=false", "--override", "output.images=false",
        "--axis", "potential.v0+pump.v0+seed.v0=0.5,1.0,2.0",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        assert_eq!(cols[6], "10", "{row}");
    }
}
