// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.


use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn sirg(args: &[&str]) -> Output {
    sirg_env(args, &[])
}

fn sirg_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sirg"));
    c.args(args);
    for (k, _) in std::env::vars() {
        if k.starts_with("SIRG_") {
            c.env_remove(k);
        }
    }
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("spawn sirg")
}

fn ok(o: &Output) {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn out_arg(d: &TempDir, sub: &str) -> String {
    d.path().join(sub).display().to_string()
}

#[test]
fn generate_is_reproducible_and_readable() {
    let d = TempDir::new().unwrap();
    for sub in ["a", "b"] {
        ok(&sirg(&["--out", &out_arg(&d, sub), "--seed", "5", "generate", "--n", "400", "--torus"]));
    }
    let a = std::fs::read(d.path().join("a/graph.txt")).unwrap();
    assert_eq!(a, std::fs::read(d.path().join("b/graph.txt")).unwrap());
    let g = sirg_cli::commands::read_graph(&d.path().join("a/graph.txt")).unwrap();
    assert_eq!(g.n(), 400);
    assert!(g.is_torus());

    ok(&sirg(&["--out", &out_arg(&d, "c"), "--seed", "5", "generate", "--n", "400", "--torus", "--format", "binary"]));
    let h = sirg_cli::commands::read_graph(&d.path().join("c/graph.bin")).unwrap();
    assert_eq!(g.edges().collect::<Vec<_>>(), h.edges().collect::<Vec<_>>());
}

#[test]
fn invalid_beta_exits_2() {
    let d = TempDir::new().unwrap();
    let o = sirg(&["--out", &out_arg(&d, "x"), "--beta", "1.5", "generate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("beta"));
    assert_eq!(sirg(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(sirg(&["--set", "colour=red", "phase-diagram", "--out", &out_arg(&d, "y")]).status.code(), Some(2));
}

#[test]
fn estimation_failure_exits_3() {
    let d = TempDir::new().unwrap();
    let o = sirg(&["--out", &out_arg(&d, "x"), "--set", "triangles=1", "triangle-geometry"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_graph_exits_4() {
    let d = TempDir::new().unwrap();
    let missing = d.path().join("nope.txt").display().to_string();
    let o = sirg(&["--out", &out_arg(&d, "x"), "spectrum", "--graph", &missing]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn phase_diagram_labels() {
    let d = TempDir::new().unwrap();
    let out = out_arg(&d, "p");
    // a step 0.5, beta step 0.1
    ok(&sirg(&["--out", &out, "--set", "a_max=4", "--set", "beta_min=2", "--set", "beta_max=6", "--set", "resolution=41", "phase-diagram"]));
    let mut rdr = csv::Reader::from_path(Path::new(&out).join("phase.csv")).unwrap();
    let mut found = 0;
    for rec in rdr.records() {
        let r = rec.unwrap();
        let a: f64 = r[0].parse().unwrap();
        let b: f64 = r[1].parse().unwrap();
        let want = [(0.0, 2.5, "INVERSE_LINEAR"), (1.0, 2.5, "CRITICAL_LOG"), (2.0, 2.9, "CONSTANT")];
        for (wa, wb, case) in want {
            if (a - wa).abs() < 1e-9 && (b - wb).abs() < 1e-9 {
                assert_eq!(&r[2], case, "a={} beta={}", a, b);
                found += 1;
            }
        }
    }
    assert_eq!(found, 3);
    assert!(read(&Path::new(&out).join("phase.svg")).starts_with("<svg"));
}

#[test]
fn sandwich_is_ordered() {
    let d = TempDir::new().unwrap();
    let out = out_arg(&d, "s");
    ok(&sirg(&["--out", &out, "--samples", "20000", "--set", "w_grid=8:256:3", "sandwich"]));
    let mut rdr = csv::Reader::from_path(Path::new(&out).join("sandwich.csv")).unwrap();
    let rows: Vec<(String, f64, f64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[1].to_string(), r[2].parse().unwrap(), r[3].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 9);
    for t in rows.chunks(3) {
        assert_eq!((t[0].0.as_str(), t[1].0.as_str(), t[2].0.as_str()), ("t_lower", "t_hat", "t_upper"));
        assert!(t[0].1 <= t[1].1 + 3.0 * t[1].2);
        assert!(t[1].1 - 3.0 * t[1].2 <= t[2].1);
    }
}

fn csv_outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn replay_reproduces_outputs() {
    let d = TempDir::new().unwrap();
    let out = out_arg(&d, "t");
    ok(&sirg(&["--out", &out, "--samples", "5000", "--beta", "3", "--set", "k_grid=10,50", "--set", "w_grid=8,32", "theory"]));
    let first = csv_outputs(Path::new(&out));
    assert_eq!(first.len(), 2);
    let manifest = Path::new(&out).join("manifest.txt");
    assert!(read(&manifest).contains("config.beta=3"));
    // the environment must not leak into a replay
    let o2 = out_arg(&d, "t2");
    ok(&sirg_env(&["--out", &o2, "replay", &manifest.display().to_string()], &[("SIRG_BETA", "5")]));
    assert_eq!(first, csv_outputs(Path::new(&o2)));
    // default output directory is the manifest's own
    std::fs::remove_file(Path::new(&out).join("theory.csv")).unwrap();
    ok(&sirg(&["replay", &manifest.display().to_string()]));
    assert_eq!(first, csv_outputs(Path::new(&out)));
}

#[test]
fn thread_count_does_not_change_results() {
    let d = TempDir::new().unwrap();
    for t in ["1", "4"] {
        let out = out_arg(&d, t);
        ok(&sirg(&["--out", &out, "--threads", t, "--seed", "3", "spectrum", "--n", "2000"]));
        ok(&sirg(&["--out", &out, "--threads", t, "--seed", "3", "--samples", "20000", "--set", "w_grid=8,64", "sandwich"]));
    }
    assert_eq!(csv_outputs(&d.path().join("1")), csv_outputs(&d.path().join("4")));
}

#[test]
fn precedence_file_env_flag() {
    let d = TempDir::new().unwrap();
    let file = d.path().join("params.txt");
    std::fs::write(&file, "# model\nbeta=3.5\na=0.5\nn=300\n").unwrap();
    let f = file.display().to_string();
    let out = out_arg(&d, "g");
    let manifest = Path::new(&out).join("manifest.txt");

    ok(&sirg(&["--out", &out, "--params", &f, "generate"]));
    let m = read(&manifest);
    assert!(m.contains("config.beta=3.5") && m.contains("config.a=0.5") && m.contains("config.n=300"));

    ok(&sirg_env(&["--out", &out, "--params", &f, "generate"], &[("SIRG_BETA", "4.5")]));
    let m = read(&manifest);
    assert!(m.contains("config.beta=4.5") && m.contains("config.a=0.5"));

    ok(&sirg_env(&["--out", &out, "--params", &f, "--beta", "5", "generate"], &[("SIRG_BETA", "4.5")]));
    assert!(read(&manifest).contains("config.beta=5"));
}
