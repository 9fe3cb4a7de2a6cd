mod common;

use common::*;
use superknap::intersect::TwoSidedInput;
use superknap::KnapsackInstance;

const SINGLE: [&str; 3] = [
    "knapsack-b841.json",
    "knapsack-b863.json",
    "non-superincreasing.json",
];
const PAIRS: [&str; 3] = [
    "two-sided-gap-one.json",
    "two-sided-gap-two.json",
    "zero-coefficient-7var.json",
];

#[test]
fn single_instances_round_trip() {
    for name in SINGLE {
        let first = KnapsackInstance::from_json(&fixture(name)).unwrap();
        let again = KnapsackInstance::from_json(&first.to_json()).unwrap();
        assert_eq!(first, again, "{name}");
    }
}

#[test]
fn pairs_round_trip() {
    for name in PAIRS {
        let first = TwoSidedInput::from_json(&fixture(name)).unwrap();
        let text = first.to_json();
        let again = TwoSidedInput::from_json(&text).unwrap();
        assert_eq!(text, again.to_json(), "{name}");
    }
}

#[test]
fn every_fixture_is_listed() {
    let dir = fixture_path("");
    let mut found: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    found.sort();
    let mut listed: Vec<String> = SINGLE
        .iter()
        .chain(PAIRS.iter())
        .map(|s| s.to_string())
        .collect();
    listed.sort();
    assert_eq!(found, listed);
}
