use std::path::Path;
use std::process::{Command, Output};

use sphwave_cli::config::ExperimentConfig;
use tempfile::TempDir;

fn sphwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphwave")).args(args).output().expect("spawn sphwave")
}

fn run_config(cmd: &str, json: &str, dir: &Path) -> Output {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, json).unwrap();
    let out = dir.join("out");
    sphwave(&[cmd, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn ok(o: &Output) {
    assert!(o.status.success(), "stdout:\n{}\nstderr:\n{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr));
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let head = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect();
    (head, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn constant_field_gives_two_sqrt_pi() {
    let dir = TempDir::new().unwrap();
    let o = run_config(
        "transform",
        r#"{"experiment":"c","cases":[{"name":"one","partition":{"n_theta":3,"m_phi":4},"n":6,"l_max":5,
            "wave":{"type":"constant","value":1.0}}]}"#,
        dir.path(),
    );
    ok(&o);
    let (head, rows) = read_csv(&dir.path().join("out/one_coefficients.csv"));
    assert_eq!(head, ["l", "m", "re", "im"]);
    assert!((num(&rows[0][2]) - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
    for r in &rows[1..] {
        assert!(num(&r[2]).abs() < 1e-13 && num(&r[3]).abs() < 1e-13, "{r:?}");
    }
    assert!(String::from_utf8_lossy(&o.stdout).contains("a_0^0 = 3.54490770181"));
}

#[test]
fn unknown_key_is_rejected() {
    let dir = TempDir::new().unwrap();
    let o = run_config(
        "transform",
        r#"{"experiment":"c","cases":[{"name":"one","partition":{"n_theta":3,"m_phi":4},"n":6,"l_max":5,
            "wave":{"type":"constant","value":1.0},"lmax":7}]}"#,
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("lmax") && err.contains("line"), "{err}");
}

#[test]
fn zero_wave_gives_zero_outputs() {
    let dir = TempDir::new().unwrap();
    let o = run_config(
        "scatter-single",
        r#"{"experiment":"z","cases":[{"name":"z","partition":{"n_theta":3,"m_phi":4},"n":8,"l_max":8,"radius":0.5,
            "wave":{"type":"zero","k":5.0},"slices":[{"plane":"xy","half_width":1.0,"points":11,"total":true}]}]}"#,
        dir.path(),
    );
    ok(&o);
    for f in ["z_coefficients.csv", "z_decay.csv", "z_slice0.csv"] {
        let (head, rows) = read_csv(&dir.path().join("out").join(f));
        assert!(!rows.is_empty(), "{f}");
        for r in rows {
            for (h, v) in head.iter().zip(&r) {
                if h.starts_with("max") || h.ends_with("re") || h.ends_with("im") {
                    assert_eq!(num(v), 0.0, "{f}: {h}");
                }
            }
        }
    }
}

#[test]
fn em_slices_have_all_components() {
    let dir = TempDir::new().unwrap();
    let o = run_config(
        "scatter-single",
        r#"{"experiment":"e","cases":[{"name":"e","partition":{"n_theta":3,"m_phi":4},"n":16,"l_max":14,"radius":0.25,
            "wave":{"type":"em_plane","k":10.0},"slices":[{"plane":"xz","half_width":1.0,"points":21}]}]}"#,
        dir.path(),
    );
    ok(&o);
    let (head, rows) = read_csv(&dir.path().join("out/e_slice0.csv"));
    assert_eq!(head.len(), 18);
    // grid points strictly inside r < 0.25 are skipped
    assert!(rows.len() < 21 * 21 && rows.len() > 21 * 21 - 30);
    assert!(rows.iter().flatten().all(|v| num(v).is_finite()));
}

#[test]
fn one_scatterer_matches_single_solver() {
    let dir = TempDir::new().unwrap();
    let case = r#""partition":{"n_theta":3,"m_phi":4},"n":20,"l_max":16,"radius":0.4,
        "wave":{"type":"spherical","k":8.0,"source":[0.2,1.5,-0.3]},
        "slices":[{"plane":"xz","half_width":1.5,"points":15}]"#;
    let single = format!(r#"{{"experiment":"s","cases":[{{"name":"a",{case}}}]}}"#);
    let multi = format!(r#"{{"experiment":"m","cases":[{{"name":"a",{case},"scatterers":[{{"center":[0,0,0],"radius":0.4}}]}}]}}"#);
    let d1 = TempDir::new().unwrap();
    ok(&run_config("scatter-single", &single, d1.path()));
    ok(&run_config("scatter-multi", &multi, dir.path()));
    let (_, a) = read_csv(&d1.path().join("out/a_slice0.csv"));
    let (_, b) = read_csv(&dir.path().join("out/a_slice0.csv"));
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        let d = (num(&x[6]) - num(&y[6])).hypot(num(&x[7]) - num(&y[7]));
        assert!(d < 1e-12, "{x:?} vs {y:?}");
    }
    let (_, res) = read_csv(&dir.path().join("out/a_residual.csv"));
    // truncation at L=16, not solver agreement
    assert!(num(&res[0][1]) < 1e-8, "{res:?}");
}

#[test]
fn oversized_system_is_refused() {
    let dir = TempDir::new().unwrap();
    let o = run_config(
        "scatter-multi",
        r#"{"experiment":"big","cases":[{"name":"b","partition":{"n_theta":3,"m_phi":4},"n":8,"l_max":60,
            "wave":{"type":"plane","k":5.0,"direction":[0,0,1]},
            "scatterers":[{"center":[-2,0,0],"radius":0.2},{"center":[0,0,0],"radius":0.2},
                          {"center":[2,0,0],"radius":0.2},{"center":[4,0,0],"radius":0.2},
                          {"center":[6,0,0],"radius":0.2},{"center":[8,0,0],"radius":0.2}]}]}"#,
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("l_max ≤ 56"), "{err}");
}

#[test]
fn sweep_writes_convergence_table() {
    let dir = TempDir::new().unwrap();
    let o = run_config(
        "transform",
        r#"{"experiment":"c","cases":[{"name":"s","partition":{"n_theta":3,"m_phi":4},"n":8,"l_max":10,
            "wave":{"type":"plane","k":4.0,"direction":[1,1,1]},"sweep":{"kind":"degree","values":[6,10,14,18]}}]}"#,
        dir.path(),
    );
    ok(&o);
    let (head, rows) = read_csv(&dir.path().join("out/s_convergence.csv"));
    assert_eq!(head, ["elements", "n", "dof", "error"]);
    let e: Vec<f64> = rows.iter().map(|r| num(&r[3])).collect();
    assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
    assert!(e[3] < 1e-12, "{e:?}");
}

#[test]
fn identical_runs_are_bit_identical() {
    let cfg = r#"{"experiment":"r","cases":[{"name":"r","partition":{"n_theta":3,"m_phi":4},"n":12,"l_max":10,
        "wave":{"type":"vector_plane","k":6.0,"direction":[0,1,1]}}]}"#;
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    ok(&run_config("transform", cfg, a.path()));
    ok(&run_config("transform", cfg, b.path()));
    for f in ["r_coefficients.csv", "r_degrees.csv"] {
        assert_eq!(std::fs::read(a.path().join("out").join(f)).unwrap(), std::fs::read(b.path().join("out").join(f)).unwrap());
    }
}

#[test]
fn verify_passes_and_detects_perturbation() {
    let o = sphwave(&["verify"]);
    ok(&o);
    assert!(String::from_utf8_lossy(&o.stdout).contains("Psi_{90,90}^{2,0}"));
    let o = sphwave(&["verify", "--inject-perturbation"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        ExperimentConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e:#}", p.display()));
        n += 1;
    }
    assert!(n >= 10);
}
