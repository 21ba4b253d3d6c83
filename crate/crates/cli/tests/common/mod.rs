#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_citegan"))
        .args(args)
        .output()
        .expect("spawn citegan")
}

pub fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "citegan {args:?} exited {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Three-node cycle a -> b -> c -> a, every edge a background citation.
pub fn write_cycle(dir: &Path) -> PathBuf {
    let path = dir.join("cycle.csv");
    std::fs::write(
        &path,
        "citing_id,cited_id,intent,confidence\na,b,background,\nb,c,background,\nc,a,background,\n",
    )
    .unwrap();
    path
}
