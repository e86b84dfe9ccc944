use std::process::{Command, Output};

fn hyperlat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperlat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn mass_of_the_seed_genus() {
    let o = hyperlat(&["mass", "--lattice", "D8+E8(2)"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "64150367/28766348771328000");
}

#[test]
fn shortvec_counts_roots_of_e8() {
    let o = hyperlat(&["shortvec", "--lattice", "E8", "--norm", "-2", "--count"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "240");
    let o = hyperlat(&["shortvec", "--lattice", "A2", "--norm", "-2"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], 6);
    assert_eq!(v["vectors"].as_array().unwrap().len(), 3);
}

#[test]
fn aut_of_d4() {
    let o = hyperlat(&["aut", "--lattice", "D4"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("|O| = 1152"), "{s}");
    assert!(s.contains("root type D4"), "{s}");
}

#[test]
fn gram_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a1.json");
    std::fs::write(&path, "[[-2]]").unwrap();
    let o = hyperlat(&["aut", "--gram", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("|O| = 2"));
}

#[test]
fn bad_prime_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperlat(&["classify", "--p", "9", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = hyperlat(&["tables", "--p", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unparsable_lattice_is_a_config_error() {
    let o = hyperlat(&["mass", "--lattice", "F4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_of_a_missing_bundle_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperlat(&["verify", dir.path().join("none").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exhausted_walk_budget_is_resumable() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = dir.path().join("out");
    let args = ["classify", "--max-iter", "3", "--cache", cache.to_str().unwrap(), "--out", out.to_str().unwrap()];
    let o = hyperlat(&args);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_dir(&cache).unwrap().next().is_some(), "checkpoint written");
    // resuming with a larger budget finishes the walk
    let o = hyperlat(&["classify", "--cache", cache.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("17 classes"));
    assert!(out.join("classes").join("list.json").exists());
}
