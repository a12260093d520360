//! Exit-code contract, the Hecke cache and report determinism.

use std::fs;
use std::path::Path;
use std::process::Command as Proc;

use mtlab::cli::{
    execute, execute_in, run, CacheEntry, CacheKey, Command, DiskCache, JobConfig, Session, SignChoice, VerifyMode,
    EXIT_CONSTRUCTION, EXIT_OK, EXIT_UNCERTIFIED,
};
use mtlab::modsym::{build_space, hecke_matrix, HeckeOp};

fn args(extra: &[&str], out: &Path) -> Vec<String> {
    let mut v = vec!["mtlab".to_string()];
    v.extend(extra.iter().map(|s| s.to_string()));
    v.push("--out".into());
    v.push(out.display().to_string());
    v
}

#[test]
fn exit_codes_follow_the_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let cases: &[(&[&str], i32)] = &[
        (&["invariants", "--level", "11", "--weight", "2", "--p", "5"], EXIT_OK),
        (&["invariants", "--level", "11", "--weight", "2", "--p", "5", "--nmax", "0"], EXIT_CONSTRUCTION),
        (&["invariants", "--level", "11", "--weight", "2", "--p", "2"], EXIT_CONSTRUCTION),
        (&["invariants", "--level", "11", "--weight", "2", "--p", "9"], EXIT_CONSTRUCTION),
        (&["invariants", "--level", "11", "--weight", "2", "--p", "11"], EXIT_CONSTRUCTION),
        (&["invariants", "--level", "11", "--weight", "3", "--p", "5"], EXIT_CONSTRUCTION),
        (&["invariants", "--level", "11", "--weight", "2", "--p", "5", "--precision", "1"], EXIT_CONSTRUCTION),
        (&["verify", "--mode", "bogus", "--level", "11", "--weight", "2", "--p", "5"], EXIT_CONSTRUCTION),
        (&["verify", "--mode", "three-term", "--level", "11", "--weight", "2", "--p", "5"], EXIT_OK),
        (&["verify", "--mode", "atkin-lehner", "--level", "11", "--weight", "4", "--p", "5", "--sign", "both"], EXIT_OK),
        // α needs k − 2 ≡ 0 mod p − 1
        (&["verify", "--mode", "alphastick", "--level", "11", "--weight", "2", "--p", "5"], EXIT_CONSTRUCTION),
        (&["verify", "--mode", "wt2-patterns", "--level", "11", "--weight", "4", "--p", "5"], EXIT_CONSTRUCTION),
        // θ_{1,1} of the level-17 minus symbol at 3 vanishes identically
        (&["invariants", "--level", "17", "--weight", "2", "--p", "3", "--sign", "-"], EXIT_UNCERTIFIED),
        (&["mu-min", "--level", "11", "--weight", "4", "--p", "3", "--sign", "both"], EXIT_OK),
        (&["eigenforms", "--level", "23", "--weight", "2", "--p", "3"], EXIT_OK),
        (&["stabilize", "--level", "11", "--weight", "2", "--p", "7"], EXIT_OK),
    ];
    for (a, code) in cases {
        assert_eq!(run(args(a, out)), *code, "{a:?}");
    }
    assert!(out.join("invariants.json").exists());
    assert!(out.join("invariants.csv").exists());
}

#[test]
fn invariant_csv_for_x0_11() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(args(&["invariants", "--level", "11", "--weight", "2", "--p", "5"], dir.path())), EXIT_OK);
    let mut reader = csv::Reader::from_path(dir.path().join("invariants.csv")).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["form", "sign", "n", "i", "mu", "lambda", "certified"]);
    let lambdas: Vec<String> = reader
        .records()
        .map(Result::unwrap)
        .filter(|r| &r[3] == "0")
        .map(|r| r[5].to_string())
        .collect();
    assert_eq!(lambdas, ["0", "4", "24", "124"]);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("invariants.json")).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["level"], 11);
}

#[test]
fn binary_honours_env_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("env-cache");
    let status = Proc::new(env!("CARGO_BIN_EXE_mtlab"))
        .args(["eigenforms", "--level", "11", "--weight", "4", "--p", "5", "--cache", "/nonexistent/ignored", "--out"])
        .arg(dir.path())
        .env("MTLAB_CACHE", &cache)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_OK));
    assert!(fs::read_dir(&cache).unwrap().count() > 0);
    let bad = Proc::new(env!("CARGO_BIN_EXE_mtlab"))
        .args(["invariants", "--level", "11", "--weight", "2", "--p", "5", "--nmax", "0", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_CONSTRUCTION));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("n_max"));
}

#[test]
fn weight_18_t2_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cache = DiskCache::open(dir.path()).unwrap();
    let space = build_space(11, 18).unwrap();
    let m = hecke_matrix(&space, HeckeOp::T(2)).unwrap();
    let entry = CacheEntry { key: CacheKey::new(11, 18, HeckeOp::T(2)), matrix: m };
    cache.store(&entry).unwrap();
    assert_eq!(cache.load(&entry.key).unwrap(), Some(entry));
}

fn config(cache: Option<&Path>) -> JobConfig {
    let mut c = JobConfig::new(11, 6, 3);
    c.sign = SignChoice::Both;
    c.n_max = 2;
    c.cache_dir = cache.map(Path::to_path_buf);
    c
}

#[test]
fn warm_cache_skips_recomputation() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = Command::Verify(VerifyMode::ThreeTerm);
    let mut cold = Session::new(config(Some(dir.path()))).unwrap();
    let r1 = execute_in(&mut cold, cmd).unwrap();
    let store = cold.store.clone().unwrap();
    assert!(store.misses() > 0);
    assert_eq!(store.hits(), 0);

    let mut warm = Session::new(config(Some(dir.path()))).unwrap();
    let r2 = execute_in(&mut warm, cmd).unwrap();
    let store2 = warm.store.clone().unwrap();
    assert_eq!(store2.hits(), store.misses());
    assert_eq!(store2.misses(), 0);
    assert_eq!(r1.json_text(), r2.json_text());
}

#[test]
fn corrupted_entry_is_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cmd = Command::Invariants;
    let uncached = execute(cmd, &config(None)).unwrap();
    let first = execute(cmd, &config(Some(dir.path()))).unwrap();

    let key = CacheKey::new(11, 6, HeckeOp::Iota);
    let path = dir.path().join(format!("hecke-{}.json", key.label()));
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let sum = v["checksum"].as_str().unwrap().to_string();
    let flipped = format!("{}{}", if sum.starts_with('0') { '1' } else { '0' }, &sum[1..]);
    v["checksum"] = serde_json::json!(flipped);
    fs::write(&path, v.to_string()).unwrap();

    let mut s = Session::new(config(Some(dir.path()))).unwrap();
    let again = execute_in(&mut s, cmd).unwrap();
    let store = s.store.clone().unwrap();
    assert_eq!(store.corrupt_count(), 1);
    // the rewritten entry is valid again
    assert!(store.load(&key).unwrap().is_some());
    assert_eq!(again.json_text(), first.json_text());
    assert_eq!(again.json["results"], uncached.json["results"]);
    assert_eq!(again.csv, uncached.csv);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for cmd in [Command::Eigenforms, Command::MuMin, Command::Verify(VerifyMode::Degen)] {
        let a = execute(cmd, &config(None)).unwrap();
        let b = execute(cmd, &config(None)).unwrap();
        assert_eq!(a.json_text(), b.json_text(), "{}", cmd.name());
        assert_eq!(a.csv, b.csv);
    }
}
