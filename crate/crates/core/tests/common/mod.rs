#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chronograph::pipeline::{run_pipeline, PipelineConfig, RunReport, Stage, MANIFEST};

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Full five-stage run of the bundled fixture config into `out`.
pub fn run_fixture_pipeline(out: &Path) -> RunReport {
    let mut cfg = PipelineConfig::load(&fixtures().join("pipeline.json")).expect("fixture config");
    cfg.out_dir = out.to_path_buf();
    run_pipeline(&cfg, &Stage::ALL.into_iter().collect()).expect("fixture run")
}

/// Every file under `dir` except the manifest, keyed by relative path.
pub fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let key = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
                if key != MANIFEST {
                    out.insert(key, std::fs::read(&path).unwrap());
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(dir, dir, &mut out);
    out
}

/// Compares a run's artifacts against the committed golden tree, or rewrites
/// the golden tree when `UPDATE_GOLDEN=1`. Returns the mismatching paths.
pub fn check_golden(actual: &BTreeMap<String, Vec<u8>>) -> Vec<String> {
    let dir = golden_dir();
    if std::env::var("UPDATE_GOLDEN").is_ok_and(|v| v == "1") {
        let _ = std::fs::remove_dir_all(&dir);
        for (key, bytes) in actual {
            let path = dir.join(key);
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(path, bytes).unwrap();
        }
        return Vec::new();
    }
    if !dir.is_dir() {
        return vec![format!("missing golden directory {}", dir.display())];
    }
    let expected = read_tree(&dir);
    let mut bad: Vec<String> = expected
        .keys()
        .filter(|k| !actual.contains_key(*k))
        .map(|k| format!("{k} (missing from run)"))
        .collect();
    for (key, bytes) in actual {
        match expected.get(key) {
            None => bad.push(format!("{key} (not in golden)")),
            Some(e) if e != bytes => bad.push(format!("{key} (differs)")),
            Some(_) => {}
        }
    }
    bad
}
