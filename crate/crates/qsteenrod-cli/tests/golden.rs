use std::fs;
use std::path::PathBuf;

use qsteenrod::localization_engine::InsertionClass;
use qsteenrod::PrimeModulus;
use qsteenrod_cli::checks::pairing_values_json;
use qsteenrod_cli::golden::{default_fixture_dir, GoldenStore};
use qsteenrod_cli::report::Status;

fn all_pairs() -> Vec<(InsertionClass, InsertionClass)> {
    let all = InsertionClass::ALL;
    all.iter().flat_map(|&a| all.iter().map(move |&b| (a, b))).collect()
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qsteenrod-golden-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    dir
}

#[test]
fn shipped_fixtures_match() {
    let store = GoldenStore::new(default_fixture_dir());
    for p in [3u64, 5, 7] {
        let q = 3 * p as u32;
        let values = pairing_values_json(PrimeModulus::new(p).unwrap(), q, 2, &all_pairs()).unwrap();
        let o = store.check(p, q, 2, &values, false).unwrap();
        assert_eq!(o.status, Status::Pass, "p = {p}: {}", o.detail);
    }
}

#[test]
fn corrupted_fixture_fails_only_its_own_key() {
    let dir = scratch_dir("corrupt");
    let store = GoldenStore::new(&dir);
    let pairs = all_pairs();
    let v3 = pairing_values_json(PrimeModulus::new(3).unwrap(), 6, 2, &pairs).unwrap();
    let v5 = pairing_values_json(PrimeModulus::new(5).unwrap(), 6, 2, &pairs).unwrap();
    store.check(3, 6, 2, &v3, true).unwrap();
    store.check(5, 6, 2, &v5, true).unwrap();

    let path = store.path(3, 6, 2);
    let mut doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let key = doc["pairing_values"].as_object().unwrap().keys().next().unwrap().clone();
    doc["pairing_values"][&key] = serde_json::json!("tampered");
    fs::write(&path, doc.to_string()).unwrap();

    let bad = store.check(3, 6, 2, &v3, false).unwrap();
    assert_eq!(bad.status, Status::Fail);
    assert_eq!(bad.defect.unwrap()["differing_pairs"], serde_json::json!([key]));
    assert_eq!(store.check(5, 6, 2, &v5, false).unwrap().status, Status::Pass);

    fs::write(&path, "{not json").unwrap();
    assert_eq!(store.check(3, 6, 2, &v3, false).unwrap().status, Status::Fail);
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn missing_fixture_is_inconclusive() {
    let dir = scratch_dir("missing");
    let store = GoldenStore::new(&dir);
    let v = pairing_values_json(PrimeModulus::new(3).unwrap(), 3, 1, &all_pairs()).unwrap();
    assert_eq!(store.check(3, 3, 1, &v, false).unwrap().status, Status::Inconclusive);
}
