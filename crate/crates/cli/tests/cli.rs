use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    root()
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(name),
    )
    .unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_superknap"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn facets_match_golden() {
    let o = run(&["facets", &fixture("knapsack-b841.json")]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text, golden("facets-b841.txt"));
    assert!(text.starts_with(
        "x1 + 3x2 + 9x3 + 18x4 + 18x5 <= 72\nx2 + 2x3 + 4x4 + 4x5 <= 17\nx3 + x4 + x5 <= 4\n"
    ));
}

#[test]
fn greedy_reports_the_second_packing() {
    let o = run(&["greedy", &fixture("knapsack-b863.json")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), golden("greedy-b863.txt"));
}

#[test]
fn seeded_runs_are_byte_stable() {
    let args = [
        "--format",
        "json",
        "optimize",
        &fixture("knapsack-b841.json"),
        "--random",
        "3",
        "--seed",
        "5",
        "--verify",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a), golden("optimize-b841-seed5.json"));
    let other = run(&[
        "--format",
        "json",
        "optimize",
        &fixture("knapsack-b841.json"),
        "--random",
        "3",
        "--seed",
        "6",
    ]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn generated_instances_round_trip() {
    let o = run(&["gen", "--random-superincreasing", "5", "--seed", "11"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert_eq!(text, golden("gen-random-5-seed11.json"));
    let inst = superknap::KnapsackInstance::from_json(&text).unwrap();
    assert_eq!(format!("{}\n", inst.to_json()), text);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gen.json");
    std::fs::write(&path, &text).unwrap();
    assert_eq!(code(&run(&["verify", path.to_str().unwrap()])), 0);
}

#[test]
fn verify_passes_on_every_fixture() {
    let names = [
        "knapsack-b841.json",
        "knapsack-b863.json",
        "two-sided-gap-one.json",
        "two-sided-gap-two.json",
        "zero-coefficient-7var.json",
    ];
    let mut args = vec!["--format".to_string(), "json".into(), "verify".into()];
    args.extend(names.iter().map(|n| fixture(n)));
    let o = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["result"]["failed"], 0);
    assert_eq!(doc["manifest"]["outcome"], "ok");
}

#[test]
fn zero_weight_pair_yields_flagged_relaxation() {
    let o = run(&["intersect", &fixture("zero-coefficient-7var.json")]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("relaxation: true"));
    assert!(
        text.contains("fractional vertex (0, 0, 2, 1, 1, 7/2, 1)\n"),
        "{text}"
    );

    let o = run(&[
        "--format",
        "json",
        "intersect",
        &fixture("zero-coefficient-7var.json"),
    ]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["result"]["relaxation"], true);
    assert_eq!(doc["result"]["exact"], false);
}

#[test]
fn pair_file_and_two_files_agree() {
    let pair: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("two-sided-gap-two.json")).unwrap())
            .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let le = dir.path().join("le.json");
    let ge = dir.path().join("ge.json");
    std::fs::write(&le, pair["le"].to_string()).unwrap();
    std::fs::write(&ge, pair["ge"].to_string()).unwrap();
    let a = run(&["intersect", &fixture("two-sided-gap-two.json"), "--extend"]);
    let b = run(&[
        "intersect",
        le.to_str().unwrap(),
        ge.to_str().unwrap(),
        "--extend",
    ]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("case = gap-at-least-two\n"));
    assert!(stdout(&a).contains("disjunctive formulation:\n"));
}

#[test]
fn gap_one_pair_prints_extended_system() {
    let o = run(&[
        "--format",
        "json",
        "intersect",
        &fixture("two-sided-gap-one.json"),
        "--extend",
    ]);
    assert_eq!(code(&o), 0);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["result"]["summary"]["case"], "gap_one");
    assert!(doc["result"]["extended"].is_object());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p.to_string_lossy().into_owned()
    };
    assert_eq!(code(&run(&["check", &fixture("knapsack-b841.json")])), 0);
    assert_eq!(
        code(&run(&["check", &fixture("non-superincreasing.json")])),
        2
    );
    assert_eq!(
        code(&run(&["greedy", &fixture("non-superincreasing.json")])),
        2
    );
    assert_eq!(code(&run(&["check", &write("bad.json", "{\"n\": 1}")])), 2);
    assert_eq!(code(&run(&["check", "/nonexistent/instance.json"])), 2);
    assert_eq!(
        code(&run(&[
            "optimize",
            &fixture("knapsack-b841.json"),
            "--c",
            "1,2"
        ])),
        2
    );

    let infeasible = write(
        "ge.json",
        r#"{"n": 2, "a": ["1", "3"], "u": ["1", "1"], "b": "5", "sense": "ge"}"#,
    );
    assert_eq!(code(&run(&["greedy", &infeasible])), 3);
    let empty = write(
        "pair.json",
        r#"{"le": {"n": 2, "a": ["1", "3"], "u": ["1", "1"], "b": "3", "sense": "le"},
            "ge": {"n": 2, "a": ["1", "3"], "u": ["1", "1"], "b": "4", "sense": "ge"}}"#,
    );
    assert_eq!(code(&run(&["intersect", &empty])), 3);

    let huge = write(
        "huge.json",
        r#"{"n": 3, "a": ["1", "100001", "10000200002"], "u": ["100000", "100000", "100000"], "b": "500000000000000", "sense": "le"}"#,
    );
    assert_eq!(code(&run(&["facets", &huge])), 0);
    assert_eq!(code(&run(&["verify", &huge])), 4);
    assert_eq!(
        code(&run(&["optimize", &huge, "--random", "1", "--verify"])),
        4
    );
}

#[test]
fn ge_instances() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ge.json");
    std::fs::write(&p, r#"{"n": 5, "a": ["1", "4", "25", "75", "160"], "u": ["3", "5", "2", "1", "2"], "b": "200", "sense": "ge"}"#)
        .unwrap();
    let path = p.to_str().unwrap();
    let o = run(&["greedy", path]);
    assert_eq!(code(&o), 0);
    assert!(
        stdout(&o).starts_with("gamma = (3,3,1,0,1)\n"),
        "{}",
        stdout(&o)
    );
    assert_eq!(code(&run(&["verify", path])), 0);
}

#[test]
fn generators() {
    let o = run(&[
        "--format", "json", "gen", "--alpha", "10", "--ubound", "907",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["result"]["a"], serde_json::json!(["1", "10", "100"]));
    assert_eq!(
        code(&run(&[
            "gen",
            "--basis",
            "1,2,5",
            "--bound",
            "1",
            "--capacity",
            "4"
        ])),
        2
    );
    assert_eq!(code(&run(&["gen", "--alpha", "1", "--ubound", "9"])), 2);
    assert_ne!(code(&run(&["gen", "--alpha", "3"])), 0);
    assert_ne!(
        code(&run(&[
            "gen",
            "--alpha",
            "3",
            "--ubound",
            "9",
            "--random-superincreasing",
            "3"
        ])),
        0
    );
}

#[test]
fn mixed_hull_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("mixed.json");
    std::fs::write(
        &p,
        r#"{"a": ["1", "3"], "u": ["2", "2"], "ub_cont": "5/2", "b": "15/2"}"#,
    )
    .unwrap();
    let o = run(&["mixed", p.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(
        text.starts_with("theta(floor b) = (1,2)\ntheta(floor(b - ub)) = (2,1)\n"),
        "{text}"
    );
    assert!(text.contains("lambda"), "{text}");
}
