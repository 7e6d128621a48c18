//! One line per acceptance criterion: each preset is run through the binary
//! and passes when every assertion in it passes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

const CRITERIA: [(u32, &str, &str, &str); 11] = [
    (1, "symbol bounds", "c01_symbol_bounds", "symbols"),
    (2, "stokes convergence", "c02_stokes_convergence", "convergence"),
    (3, "adjointness and quadrature oracle", "c03_adjoint_oracle", "oracle"),
    (4, "helmholtz exactness", "c04_helmholtz", "helmholtz"),
    (5, "vector identity", "c05_vector_identity", "oracle"),
    (6, "rho suite", "c06_rho_suite", "energy-1d"),
    (7, "doubly nonlocal factorization", "c07_double_nonlocal", "energy-1d"),
    (8, "korn and energy", "c08_korn_energy", "navier"),
    (9, "navier convergence", "c09_navier_convergence", "convergence"),
    (10, "evolution", "c10_evolution", "convergence"),
    (11, "div-curl and friedrichs", "c11_divcurl", "divcurl"),
];

fn preset(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../presets")
        .join(format!("{name}.json"))
}

fn run(name: &str, sub: &str, out: &Path, threads: usize) -> (bool, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_halfball"))
        .arg(sub)
        .arg("--config")
        .arg(preset(name))
        .arg("--out")
        .arg(out)
        .arg("--threads")
        .arg(threads.to_string())
        .output()
        .expect("binary runs");
    let mut text = String::from_utf8_lossy(&o.stdout).into_owned();
    text.push_str(&String::from_utf8_lossy(&o.stderr));
    (o.status.success(), text)
}

fn csv_bodies(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect()
}

fn main() {
    let tmp = tempfile::tempdir().unwrap();
    let mut failed = Vec::new();
    for (id, label, name, sub) in CRITERIA {
        let start = Instant::now();
        let (ok, text) = run(name, sub, &tmp.path().join(name), 4);
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {id:2} {label}: {} ({secs:.1} s)",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            eprintln!("{text}");
            failed.push(id);
        }
    }

    let start = Instant::now();
    let mut same = true;
    for (name, sub) in [("c12_determinism", "stokes"), ("c02_stokes_convergence", "convergence")] {
        let a = tmp.path().join("det_a").join(name);
        let b = tmp.path().join("det_b").join(name);
        let (ok_a, _) = run(name, sub, &a, 1);
        let (ok_b, _) = run(name, sub, &b, 4);
        let (ca, cb) = (csv_bodies(&a), csv_bodies(&b));
        same &= ok_a && ok_b && !ca.is_empty() && ca == cb;
    }
    let secs = start.elapsed().as_secs_f64();
    println!(
        "criterion 12 determinism: {} ({secs:.1} s)",
        if same { "PASS" } else { "FAIL" }
    );
    if !same {
        failed.push(12);
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
